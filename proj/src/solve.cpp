#include "sublin/solve.hpp"

#include "sublin/eigen.hpp"
#include "sublin/errors.hpp"
#include "sublin/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sublin {

namespace {

double scale_of(std::span<const double> a, double q, std::span<const double> u)
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::abs(a[i] * positive_power(u[i], q)));
    return std::max(s, std::numeric_limits<double>::min());
}

// Contiguous block of nodes with optional Dirichlet data at one neighbour.
struct Subproblem {
    std::vector<std::size_t> nodes;
    SymTridiag K;
    std::vector<double> M, a, boundary;

    std::size_t size() const { return nodes.size(); }

    std::vector<double> restrict_field(const Field& f) const
    {
        std::vector<double> v(size());
        for (std::size_t j = 0; j < size(); ++j) v[j] = f[nodes[j]];
        return v;
    }

    // Convergence threshold: relative tolerance, but never below the
    // roundoff floor of evaluating −Δ_h u in floating point. The floor is
    // capped so that a field whose amplitude swamps the equation is not
    // mistaken for a solution.
    double threshold(std::span<const double> u, double q, double tol) const
    {
        double opnorm = 0.0;
        for (std::size_t j = 0; j < size(); ++j) opnorm = std::max(opnorm, 2.0 * K.diag[j] / M[j]);
        double umax = 0.0;
        for (double x : u) umax = std::max(umax, std::abs(x));
        const double scale = scale_of(a, q, u);
        const double roundoff = 256.0 * std::numeric_limits<double>::epsilon() * opnorm * umax;
        return std::max(tol * scale, std::min(roundoff, 1e-6 * scale));
    }

    // (K u − boundary)/M − a u^q
    std::vector<double> residual(std::span<const double> u, double q) const
    {
        auto r = K.apply(u);
        for (std::size_t j = 0; j < size(); ++j) r[j] = (r[j] - boundary[j]) / M[j] - a[j] * positive_power(u[j], q);
        return r;
    }
};

Subproblem whole(const Grid& grid, const Weight& w)
{
    Subproblem s;
    s.nodes.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s.nodes[i] = i;
    s.K = stiffness_matrix(grid);
    s.M.assign(grid.cell_measures().begin(), grid.cell_measures().end());
    s.a.assign(w.values().values().begin(), w.values().values().end());
    s.boundary.assign(grid.size(), 0.0);
    return s;
}

Subproblem dirichlet_block(const Grid& grid, const Weight& w, std::size_t d, double g, bool upper)
{
    const std::size_t n = grid.size();
    if (d >= n || (!upper && d == 0) || (upper && d + 1 >= n))
        throw std::invalid_argument("Dirichlet node leaves an empty subdomain");
    const std::size_t first = upper ? d + 1 : 0;
    const std::size_t last = upper ? n - 1 : d - 1;
    const SymTridiag full = stiffness_matrix(grid);
    const auto faces = grid.face_weights();
    Subproblem s;
    for (std::size_t i = first; i <= last; ++i) {
        s.nodes.push_back(i);
        s.K.diag.push_back(full.diag[i]);
        if (i < last) s.K.off.push_back(full.off[i]);
        s.M.push_back(grid.cell_measures()[i]);
        s.a.push_back(w[i]);
        s.boundary.push_back(0.0);
    }
    if (upper)
        s.boundary.front() = faces[d] * g;
    else
        s.boundary.back() = faces[d - 1] * g;
    return s;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> run_monotone(const Subproblem& s, double q, std::vector<double> u, const std::vector<double>& sup,
                                 const SolveParams& params, MonotoneTrace* trace, const char* who)
{
    const std::size_t n = s.size();
    const double top = std::max(*std::max_element(sup.begin(), sup.end()), std::numeric_limits<double>::min());
    const double floor = 1e-12 * top;
    std::vector<double> boost(n, 1.0);
    MonotoneTrace local;
    local.minIncrement = std::numeric_limits<double>::infinity();

    for (int it = 0; it < params.maxIterations; ++it) {
        const auto r = s.residual(u, q);
        if (max_abs(r) <= s.threshold(u, q, params.tolerance)) {
            local.iterations = it;
            if (trace) *trace = local;
            return u;
        }
        for (int attempt = 0;; ++attempt) {
            SymTridiag A = s.K;
            std::vector<double> rhs(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double lam = boost[j] * q * std::abs(s.a[j]) * std::pow(std::max(u[j], floor), q - 1.0);
                A.diag[j] += s.M[j] * lam;
                rhs[j] = s.M[j] * (s.a[j] * positive_power(u[j], q) + lam * u[j]) + s.boundary[j];
            }
            auto next = solve(A, rhs);
            bool ok = true;
            double minInc = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                const double inc = next[j] - u[j];
                minInc = std::min(minInc, inc);
                if (inc < -1e-12 * top) {
                    ok = false;
                    boost[j] *= 2.0;
                }
            }
            if (ok) {
                local.minIncrement = std::min(local.minIncrement, minInc / top);
                u = std::move(next);
                break;
            }
            ++local.shiftDoublings;
            if (attempt >= 60) throw SolverError(std::string(who) + ": monotonicity lost after 60 shift doublings");
        }
    }
    throw SolverError(std::string(who) + ": iteration cap reached (residual " +
                      std::to_string(max_abs(s.residual(u, q)) / scale_of(s.a, q, u)) + " relative)");
}

void check_pair(const SubSuperPair& pair, const Subproblem& s)
{
    const double top = std::max(pair.super.max(), 0.0);
    for (std::size_t i : s.nodes) {
        if (pair.orderedCheck && pair.sub[i] > pair.super[i] + 1e-12 * top)
            throw std::invalid_argument("monotone_iterate: pair is not ordered at node " + std::to_string(i));
        if (pair.sub[i] < 0.0) throw std::invalid_argument("monotone_iterate: subsolution is negative at node " + std::to_string(i));
    }
}

}  // namespace

const char* to_string(Positivity p)
{
    switch (p) {
    case Positivity::trivial: return "trivial";
    case Positivity::deadCore: return "deadCore";
    case Positivity::positiveInterior: return "positiveInterior";
    case Positivity::interiorOfCone: return "interiorOfCone";
    }
    return "unknown";
}

PositivityClass classify_positivity(const Field& u, double scaleTol)
{
    PositivityClass out;
    const Grid& g = u.grid();
    const std::size_t n = u.size();
    const double top = u.max();
    out.minValue = u.min();
    out.boundaryMin = g.is_ball() ? u[n - 1] : std::min(u[0], u[n - 1]);
    if (u.max_abs() <= std::numeric_limits<double>::min()) {
        out.cls = Positivity::trivial;
        return out;
    }
    if (out.minValue < -scaleTol * std::max(top, 0.0))
        throw std::invalid_argument("classify_positivity: field has negative values beyond tolerance");
    const double coarse = scaleTol * top;
    const double fine = scaleTol * scaleTol * top;
    if (out.minValue > coarse) {
        out.cls = Positivity::interiorOfCone;
        return out;
    }
    bool core = false;
    for (std::size_t i = 0; i < n;) {
        if (u[i] > coarse) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && u[j + 1] <= coarse) ++j;
        const double width = static_cast<double>(j - i);
        for (std::size_t k = i; k <= j;) {
            if (u[k] > fine) {
                ++k;
                continue;
            }
            std::size_t l = k;
            while (l + 1 <= j && u[l + 1] <= fine) ++l;
            out.zeroSet.push_back({k, l});
            const double cells = static_cast<double>(l - k);
            if (cells >= 2.0 && cells >= 0.5 * width) core = true;
            k = l + 1;
        }
        i = j + 1;
    }
    out.cls = core ? Positivity::deadCore : Positivity::positiveInterior;
    return out;
}

double relative_residual(const Weight& w, double q, const Field& u)
{
    const Field r = residual(w.values(), q, u);
    return r.max_abs() / scale_of(w.values().values(), q, u.values());
}

namespace {

// Zero-mean solve after removing the mean of rhs, with no compatibility test.
Field neumann_solve_centred(const Grid& grid, const Field& rhs)
{
    const std::size_t n = grid.size();
    const double vol = grid.measure();
    const double mean = integrate(rhs) / vol;
    const auto m = grid.cell_measures();
    const SymTridiag K = stiffness_matrix(grid);
    // pin w₀ = 0, solve the reduced (nonsingular) system, then remove the mean
    SymTridiag red{std::vector<double>(K.diag.begin() + 1, K.diag.end()), std::vector<double>(K.off.begin() + 1, K.off.end())};
    std::vector<double> b(n - 1);
    for (std::size_t i = 1; i < n; ++i) b[i - 1] = m[i] * (rhs[i] - mean);
    const auto x = solve(red, b);
    std::vector<double> w(n, 0.0);
    std::copy(x.begin(), x.end(), w.begin() + 1);
    double avg = 0.0;
    for (std::size_t i = 0; i < n; ++i) avg += m[i] * w[i];
    avg /= vol;
    for (double& v : w) v -= avg;
    return Field(rhs.grid_ptr(), std::move(w));
}

}  // namespace

Field solve_linear_neumann(const Grid& grid, const Field& rhs)
{
    if (rhs.size() != grid.size()) throw std::invalid_argument("solve_linear_neumann: grid mismatch");
    const double total = integrate(rhs);
    if (std::abs(total) > 1e-8 * std::max(rhs.max_abs(), std::numeric_limits<double>::min()) * grid.measure())
        throw ConditionError("compatibility", total, 0.0,
                             "Neumann problem needs a zero-mean right-hand side, integral is " + std::to_string(total));
    return neumann_solve_centred(grid, rhs);
}

Field large_supersolution(const Grid& grid, const Weight& w, double q, double floor)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("large_supersolution: q must lie in (0, 1)");
    const double total = integrate(w.values());
    if (!(total < 0.0)) throw ConditionError("H0", total, 0.0, "large_supersolution needs a negative integral of a");
    const Field psi = neumann_solve_centred(grid, w.values());
    const double m = psi.max_abs();
    // κ^{1−q} = (M+m)^q ≥ (M+ψ)^q makes the a>0 part harmless; the remaining
    // a<0 defect is O(M^{q−1}) against the gain |ā|(M+m)^q.
    double M = m + 1.0;
    for (int k = 0; k < 400; ++k, M *= 2.0) {
        const double kappa = std::pow(M + m, q / (1.0 - q));
        if (!std::isfinite(kappa * (M + m))) break;
        std::vector<double> u(w.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = kappa * (M + psi[i]);
        Field uf(w.grid_ptr(), std::move(u));
        const Field r = residual(w.values(), q, uf);
        if (r.min() >= -1e-8 * scale_of(w.values().values(), q, uf.values()) && uf.min() >= floor) return uf;
    }
    throw SolverError("large_supersolution: amplitude overflow before the residual became nonnegative");
}

Field branch_extension_subsolution(const Field& u0, double q0, double q)
{
    if (!(q0 <= q && q < 1.0 && q0 > 0.0)) throw std::invalid_argument("branch_extension_subsolution: needs 0 < q0 <= q < 1");
    if (!(u0.min() > 0.0)) throw std::invalid_argument("branch_extension_subsolution: u0 must be strictly positive");
    const double gamma = (1.0 - q0) / (1.0 - q);
    const double c = std::pow(gamma, -1.0 / (1.0 - q));
    std::vector<double> v(u0.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * std::pow(u0[i], gamma);
    return Field(u0.grid_ptr(), std::move(v));
}

Field monotone_iterate(const Grid& grid, const Weight& w, double q, const SubSuperPair& pair, const SolveParams& params,
                       MonotoneTrace* trace)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("monotone_iterate: q must lie in (0, 1)");
    const Subproblem s = whole(grid, w);
    check_pair(pair, s);
    auto u = run_monotone(s, q, s.restrict_field(pair.sub), s.restrict_field(pair.super), params, trace, "monotone_iterate");
    return Field(w.grid_ptr(), std::move(u));
}

Field monotone_iterate_dirichlet(const Grid& grid, const Weight& w, double q, const SubSuperPair& pair,
                                 std::size_t boundaryNode, double boundaryValue, bool upper, const SolveParams& params,
                                 MonotoneTrace* trace)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("monotone_iterate_dirichlet: q must lie in (0, 1)");
    const Subproblem s = dirichlet_block(grid, w, boundaryNode, boundaryValue, upper);
    check_pair(pair, s);
    auto u = run_monotone(s, q, s.restrict_field(pair.sub), s.restrict_field(pair.super), params, trace,
                          "monotone_iterate_dirichlet");
    std::vector<double> full(grid.size(), 0.0);
    for (std::size_t j = 0; j < s.size(); ++j) full[s.nodes[j]] = u[j];
    full[boundaryNode] = boundaryValue;
    return Field(w.grid_ptr(), std::move(full));
}

double energy(const Weight& w, double q, const Field& u)
{
    const auto m = u.grid().cell_measures();
    double pot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) pot += m[i] * w[i] * std::pow(std::max(u[i], 0.0), q + 1.0);
    return 0.5 * dirichlet_energy(u.grid(), u.values()) - pot / (q + 1.0);
}

// t^p − u^p without cancellation when t ≈ u.
double power_difference(double t, double u, double p)
{
    if (u <= 0.0 || t <= 0.0 || std::abs(t - u) > 0.5 * u) return std::pow(std::max(t, 0.0), p) - std::pow(std::max(u, 0.0), p);
    return std::pow(u, p) * std::expm1(p * std::log1p((t - u) / u));
}

// Exact coordinate minimisation at absorbing nodes (a < 0) below `cap`.
// The energy is not twice differentiable where such a node meets zero and
// Newton crawls there; with the neighbours frozen the scalar problem
// K_ii v + b + M|a| v^q = 0 is monotone in v and is solved by bisection.
void relax_absorbing_layer(const Subproblem& s, double q, std::vector<double>& u, double cap, double& e)
{
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (s.a[i] >= 0.0 || u[i] > cap) continue;
        double b = -s.boundary[i];
        if (i > 0) b += s.K.off[i - 1] * u[i - 1];
        if (i + 1 < n) b += s.K.off[i] * u[i + 1];
        const double kd = s.K.diag[i], ma = -s.M[i] * s.a[i];
        auto g = [&](double v) { return kd * v + b + ma * positive_power(v, q); };
        double v = 0.0;
        if (b < 0.0) {
            double lo = 0.0, hi = -b / kd;
            for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) < 0.0 ? lo : hi) = mid;
            }
            v = 0.5 * (lo + hi);
        }
        const double old = u[i];
        // f(v) − f(old) for f(v) = ½K_ii v² + b v + M|a| v^{q+1}/(q+1)
        e += 0.5 * kd * (v * v - old * old) + b * (v - old) +
             ma * (std::pow(v, q + 1.0) - std::pow(old, q + 1.0)) / (q + 1.0);
        u[i] = v;
    }
}

Field minimize_energy(const Grid& grid, const Weight& w, double q, const Field& init, const SolveParams& params,
                      MinimizeTrace* trace)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("minimize_energy: q must lie in (0, 1)");
    if (init.size() != grid.size()) throw std::invalid_argument("minimize_energy: grid mismatch");
    const std::size_t n = grid.size();
    const Subproblem s = whole(grid, w);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::max(init[i], 0.0);
    auto E = [&](const std::vector<double>& v) { return energy(w, q, Field(w.grid_ptr(), v)); };
    double e = E(u);
    MinimizeTrace local;
    local.energies.push_back(e);

    for (int it = 0; it < params.maxIterations; ++it) {
        const double top = *std::max_element(u.begin(), u.end());
        if (!(top > 0.0)) throw SolverError("minimize_energy: descent collapsed to the trivial solution");
        relax_absorbing_layer(s, q, u, 1e-3 * top, e);
        const auto r = s.residual(u, q);  // M⁻¹ ∇E
        // Projected gradient. Nodes in the layer u ≤ 1e-6·max u count only
        // while the step they call for is visible at the solver tolerance:
        // a decrease is capped by u itself, and under absorption (a < 0) a
        // node grows like (−r/|a|)^{1/q} against the curvature q|a|u^{q−1}.
        const double layer = 1e-6 * top;
        double pg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i] > layer) {
                pg = std::max(pg, std::abs(r[i]));
                continue;
            }
            const double curv =
                (s.a[i] < 0.0 && u[i] > 0.0) ? s.M[i] * q * -s.a[i] * std::pow(u[i], q - 1.0) : 0.0;
            double step = std::abs(r[i]) * s.M[i] / (s.K.diag[i] + curv);
            if (r[i] > 0.0) step = std::min(step, u[i]);
            if (r[i] < 0.0 && s.a[i] < 0.0) step = std::min(step, std::pow(-r[i] / -s.a[i], 1.0 / q));
            if (step > params.tolerance * top) pg = std::max(pg, std::abs(r[i]));
        }
        if (pg <= s.threshold(u, q, params.tolerance)) {
            local.iterations = it;
            if (trace) *trace = std::move(local);
            return Field(w.grid_ptr(), std::move(u));
        }

        // active: at (or numerically near) the bound with the gradient not pulling
        // inward. Zero-gradient nodes stay put, so cores do not nucleate mass.
        double eps = 0.0;
        for (std::size_t i = 0; i < n; ++i) eps = std::max(eps, std::abs(u[i] - std::max(u[i] - r[i], 0.0)));
        eps = std::min(eps, 1e-8 * top);
        std::vector<char> active(n, 0);
        for (std::size_t i = 0; i < n; ++i) active[i] = (u[i] <= eps && r[i] >= 0.0) ? 1 : 0;

        const double ufloor = 1e-10 * top;
        auto build = [&](bool modified) {
            SymTridiag H = s.K;
            double apmax = 0.0;
            for (double ai : s.a) apmax = std::max(apmax, ai);
            const double tau = q * apmax * std::pow(top, q - 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double curv = q * s.a[i] * std::pow(std::max(u[i], ufloor), q - 1.0);
                H.diag[i] -= s.M[i] * (modified ? std::min(curv, 0.0) - tau : curv);
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (!active[i]) continue;
                H.diag[i] = 1.0;
                if (i > 0) H.off[i - 1] = 0.0;
                if (i + 1 < n) H.off[i] = 0.0;
            }
            return H;
        };
        SymTridiag H = build(false);
        if (count_below(H, 0.0) > 0) H = build(true);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = active[i] ? -u[i] : -s.M[i] * r[i];
        std::vector<double> d;
        try {
            d = solve(H, rhs);
        } catch (const std::runtime_error&) {
            d.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) d[i] = -r[i];
        }

        // E(t) − E(u) evaluated from differences; near a free boundary the
        // change is far below the roundoff of E itself.
        auto energy_change = [&](const std::vector<double>& t) {
            std::vector<double> du(n), su(n);
            for (std::size_t i = 0; i < n; ++i) {
                du[i] = t[i] - u[i];
                su[i] = t[i] + u[i];
            }
            const auto ks = s.K.apply(su);
            double de = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (du[i] == 0.0) continue;
                de += 0.5 * du[i] * ks[i];
                de -= s.M[i] * s.a[i] * power_difference(t[i], u[i], q + 1.0) / (q + 1.0);
            }
            return de;
        };
        auto try_direction = [&](const std::vector<double>& dir, double alpha0) -> bool {
            double alpha = alpha0;
            for (int k = 0; k < 60; ++k, alpha *= 0.5) {
                std::vector<double> t(n);
                double decrease = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    t[i] = std::max(u[i] + alpha * dir[i], 0.0);
                    decrease += s.M[i] * r[i] * (t[i] - u[i]);
                }
                const double de = energy_change(t);
                if (de <= 1e-4 * decrease && de <= 0.0) {
                    u = std::move(t);
                    e += de;
                    return true;
                }
            }
            return false;
        };
        if (!try_direction(d, 1.0)) {
            std::vector<double> gdir(n);
            for (std::size_t i = 0; i < n; ++i) gdir[i] = -r[i];
            if (!try_direction(gdir, top / std::max(max_abs(r), std::numeric_limits<double>::min())))
                throw SolverError("minimize_energy: line search failed (projected gradient " + std::to_string(pg) + ")");
        }
        local.energies.push_back(e);
    }
    local.iterations = params.maxIterations;
    if (trace) *trace = std::move(local);
    throw SolverError("minimize_energy: iteration cap reached");
}

Field newton_refine(const Grid& grid, const Weight& w, double q, const Field& guess, const SolveParams& params)
{
    if (guess.size() != grid.size()) throw std::invalid_argument("newton_refine: grid mismatch");
    const double top = guess.max();
    if (!(top > 0.0)) throw std::invalid_argument("newton_refine: guess is below the positivity floor everywhere");
    const double floor = params.positivityFloor >= 0.0 ? params.positivityFloor : 1e-12 * top;
    if (guess.min() < -floor) throw std::invalid_argument("newton_refine: guess is negative, below the positivity floor");
    const Subproblem s = whole(grid, w);
    const std::size_t n = grid.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::max(guess[i], floor);

    // Residual projected onto the constraint u ≥ floor: a node held at the
    // floor that still wants to decrease is treated as satisfied.
    auto projected = [&](const std::vector<double>& v) {
        auto r = s.residual(v, q);
        for (std::size_t i = 0; i < n; ++i)
            if (v[i] <= floor && r[i] > 0.0) r[i] = 0.0;
        return r;
    };
    auto merit = [&](std::span<const double> r) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += s.M[i] * r[i] * r[i];
        return m;
    };
    const int cap = std::min(params.maxIterations, 200);
    for (int it = 0; it < cap; ++it) {
        auto r = projected(u);
        if (max_abs(r) <= s.threshold(u, q, params.tolerance)) return Field(w.grid_ptr(), std::move(u));
        SymTridiag J = s.K;
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            J.diag[i] -= s.M[i] * q * s.a[i] * std::pow(u[i], q - 1.0);
            rhs[i] = -s.M[i] * r[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!(u[i] <= floor && r[i] == 0.0)) continue;
            J.diag[i] = 1.0;
            rhs[i] = 0.0;
            if (i > 0) J.off[i - 1] = 0.0;
            if (i + 1 < n) J.off[i] = 0.0;
        }
        std::vector<double> d;
        try {
            d = solve(J, rhs);
        } catch (const std::runtime_error&) {
            SymTridiag sym = J;
            for (std::size_t i = 0; i < n; ++i) sym.diag[i] /= s.M[i];
            for (std::size_t i = 0; i + 1 < n; ++i) sym.off[i] /= std::sqrt(s.M[i] * s.M[i + 1]);
            throw SolverError("newton_refine: singular Jacobian, near-kernel eigenvalue " +
                              std::to_string(min_eigenvalue(sym, 1e-14 * sym.norm_bound())));
        }
        const double m0 = merit(r);
        bool accepted = false;
        double alpha = 1.0;
        for (int k = 0; k < 40 && !accepted; ++k, alpha *= 0.5) {
            std::vector<double> t(n);
            for (std::size_t i = 0; i < n; ++i) t[i] = std::max(u[i] + alpha * d[i], std::max(floor, 0.1 * u[i]));
            const double mt = merit(projected(t));
            if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * alpha) * m0) {
                u = std::move(t);
                accepted = true;
            }
        }
        if (!accepted) throw SolverError("newton_refine: damping exhausted without merit decrease");
    }
    throw SolverError("newton_refine: no convergence within " + std::to_string(cap) + " iterations");
}

}  // namespace sublin
