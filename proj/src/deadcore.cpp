#include "sublin/deadcore.hpp"

#include "sublin/eigen.hpp"
#include "sublin/errors.hpp"
#include "sublin/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace sublin {

namespace {

double barrier_constant(double alpha, int N) { return alpha * (alpha - 1.0) + (N - 1) * alpha; }

// Distance of every node to ∂G, G = {b₂ > 0}; zero off G. The centre of a
// ball is not a boundary point.
std::vector<double> distance_to_boundary_of_G(const Grid& g, const Field& b2)
{
    const std::size_t n = g.size();
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n;) {
        if (!(b2[i] > 0.0)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && b2[j + 1] > 0.0) ++j;
        const double inf = std::numeric_limits<double>::infinity();
        const double lo = (i == 0) ? (g.is_ball() ? -inf : g.left()) : g.coordinate(i - 1);
        const double hi = (j + 1 == n) ? g.right() : g.coordinate(j + 1);
        for (std::size_t k = i; k <= j; ++k) d[k] = std::min(g.coordinate(k) - lo, hi - g.coordinate(k));
        i = j + 1;
    }
    return d;
}

std::vector<Interval> node_runs(const Grid& g, const std::vector<bool>& mask)
{
    std::vector<Interval> out;
    for (std::size_t i = 0; i < mask.size();) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < mask.size() && mask[j + 1]) ++j;
        out.push_back({g.coordinate(i), g.coordinate(j)});
        i = j + 1;
    }
    return out;
}

bool covered(const std::vector<Interval>& inner, const std::vector<Interval>& outer, double slack)
{
    return std::all_of(inner.begin(), inner.end(), [&](const Interval& p) {
        return std::any_of(outer.begin(), outer.end(),
                           [&](const Interval& m) { return m.lo - slack <= p.lo && p.hi <= m.hi + slack; });
    });
}

// Smooth positive start with negative energy: smoothed indicator of {a > 0},
// scaled to the minimiser of t ↦ E(t v).
// Smooth nonnegative start with negative energy: smoothed indicator of
// {a > 0}, scaled to the minimiser of t ↦ E(t v). When strong absorption
// makes every smoothed tail too costly, the tail is cut off at {a < 0}.
Field initial_guess(const Grid& g, const Weight& w, double q)
{
    const std::size_t n = g.size();
    const auto m = g.cell_measures();
    const SymTridiag K = stiffness_matrix(g);
    for (int cut = 0; cut < 2; ++cut) {
        for (double ell : {0.05, 0.01}) {
            const double ell2 = ell * ell * g.measure() * g.measure();
            SymTridiag A = K;
            for (std::size_t i = 0; i < n; ++i) A.diag[i] = m[i] + ell2 * A.diag[i];
            for (double& o : A.off) o *= ell2;
            for (double base : {1e-2, 1e-4, 0.0}) {
                std::vector<double> rhs(n);
                for (std::size_t i = 0; i < n; ++i) rhs[i] = m[i] * ((w[i] > 0.0 ? 1.0 : 0.0) + base);
                std::vector<double> v = solve(A, rhs);
                for (std::size_t i = 0; i < n; ++i) v[i] = (cut && w[i] < 0.0) ? 0.0 : std::max(v[i], 0.0);
                double gain = 0.0;
                for (std::size_t i = 0; i < n; ++i) gain += m[i] * w[i] * std::pow(v[i], q + 1.0);
                const double dir = dirichlet_energy(g, v);
                if (!(gain > 0.0 && dir > 0.0)) continue;
                const double t = std::pow(gain / dir, 1.0 / (1.0 - q));
                for (double& x : v) x *= t;
                return Field(w.grid_ptr(), std::move(v));
            }
        }
    }
    throw SolverError("verify_deadcore_formation: no starting field with negative energy");
}

}  // namespace

BarrierSpec barrier_profile(const GridPtr& grid, double q, double A, double deltaA0)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("barrier_profile: q must lie in (0, 1)");
    if (!(A > 0.0)) throw std::invalid_argument("barrier_profile: A must be positive");
    const Grid& g = *grid;
    if (!g.is_ball() || std::abs(g.right() - 1.0) > 1e-14) throw std::invalid_argument("barrier_profile: needs the unit ball");
    BarrierSpec b;
    b.A = A;
    b.alpha = 2.0 / (1.0 - q);
    b.profile = sample(grid, [&](double r) { return r <= 0.5 ? 0.0 : A * std::pow(r - 0.5, b.alpha); });
    b.c2LHS = A;
    b.c2RHS = std::pow(deltaA0 / barrier_constant(b.alpha, g.dimension()), 1.0 / (1.0 - q));
    b.c2Holds = b.c2LHS <= b.c2RHS * (1.0 + 1e-14);

    const std::size_t k = g.nearest_node(0.5);
    if (k >= 2 && k + 2 < g.size()) {
        const double h = g.spacing();
        const auto& z = b.profile;
        const double left = (z[k] - 2.0 * z[k - 1] + z[k - 2]) / (h * h);
        const double right = (z[k + 2] - 2.0 * z[k + 1] + z[k]) / (h * h);
        b.secondDifferenceJump = std::abs(left - right);
    }
    return b;
}

bool barrier_window_nonempty(double q, int N, double deltaA0, double eps)
{
    const double alpha = 2.0 / (1.0 - q);
    return std::pow(2.0, alpha) * eps <= std::pow(deltaA0 / barrier_constant(alpha, N), 1.0 / (1.0 - q));
}

double deadcore_threshold(double q, int N, double a0, double delta, double C)
{
    if (!(q > 0.0 && q < 1.0) || N < 1 || !(a0 > 0.0) || !(delta > 0.0) || !(C > 0.0))
        throw std::invalid_argument("deadcore_threshold: inputs must be positive with q < 1");
    const double alpha = 2.0 / (1.0 - q);
    return 2.0 * std::sqrt(C * barrier_constant(alpha, N) / (delta * a0));
}

std::vector<Interval> measure_deadcore(const Field& u, double scaleTol)
{
    const PositivityClass pc = classify_positivity(u, scaleTol);
    std::vector<Interval> out;
    if (pc.cls == Positivity::trivial) return out;
    const Grid& g = u.grid();
    const double coarse = scaleTol * u.max();
    for (const IndexRange& r : pc.zeroSet) {
        // widen to the enclosing candidate run to apply the qualification rule
        std::size_t i = r.first, j = r.last;
        while (i > 0 && u[i - 1] <= coarse) --i;
        while (j + 1 < u.size() && u[j + 1] <= coarse) ++j;
        const double cells = static_cast<double>(r.last - r.first);
        if (cells >= 2.0 && cells >= 0.5 * static_cast<double>(j - i))
            out.push_back({g.coordinate(r.first), g.coordinate(r.last)});
    }
    return out;
}

std::vector<DeadCoreReport> verify_deadcore_formation(const GridPtr& grid, const Field& b1, const Field& b2, double sigma,
                                                      double qbar, const std::vector<double>& deltas,
                                                      const SolveParams& params)
{
    const Grid& g = *grid;
    if (deltas.empty()) throw std::invalid_argument("verify_deadcore_formation: no delta values");
    if (!(qbar > 0.0 && qbar < 1.0)) throw std::invalid_argument("verify_deadcore_formation: qbar must lie in (0, 1)");
    if (!(sigma > 0.0)) throw std::invalid_argument("verify_deadcore_formation: sigma must be positive");
    for (std::size_t i = 0; i < g.size(); ++i)
        if (b1[i] > 0.0 && b2[i] > 0.0)
            throw ConditionError("H2", b1[i], 0.0,
                                 "supports of b1 and b2 overlap at x = " + std::to_string(g.coordinate(i)));

    const double delta2 = *std::min_element(deltas.begin(), deltas.end());
    const Weight w2 = make_weight(grid, DeltaFamily{b1, b2, delta2});
    const double total = integrate(w2.values());
    if (!(total < 0.0)) throw ConditionError("lem:bound", total, 0.0, "integral of b1 - delta b2 must be negative");

    const auto dist = distance_to_boundary_of_G(g, b2);
    double a0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (dist[i] > 0.5 * sigma) a0 = std::min(a0, b2[i]);
    if (!std::isfinite(a0) || !(a0 > 0.0)) throw ConditionError("a0", 0.0, 0.0, "G_{sigma/2} contains no grid node");

    const double alphaBar = 2.0 / (1.0 - qbar);
    const double slack = 2.0 * g.spacing();
    std::vector<DeadCoreReport> reports;
    bool anyNontrivial = false;
    for (double q : {0.5 * qbar, qbar}) {
        const double C = large_supersolution(g, w2, q, 0.0).max();
        for (double delta : deltas) {
            DeadCoreReport rep;
            rep.delta = delta;
            rep.q = q;
            rep.a0 = a0;
            rep.uniformBound = C;
            const Weight w = make_weight(grid, DeltaFamily{b1, b2, delta});
            rep.u = minimize_energy(g, w, q, initial_guess(g, w, q), params);
            rep.positivity = classify_positivity(rep.u).cls;
            anyNontrivial = anyNontrivial || rep.positivity != Positivity::trivial;
            rep.maxU = rep.u.max();
            rep.boundHolds = rep.maxU < C;
            rep.measuredZeroSet = measure_deadcore(rep.u);

            rep.dDelta = deadcore_threshold(qbar, g.dimension(), a0, delta, C);
            rep.windowOK = barrier_window_nonempty(qbar, g.dimension(), delta * a0, C * std::pow(rep.dDelta, -alphaBar));
            std::vector<bool> predicted(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) predicted[i] = dist[i] >= 0.5 * sigma + rep.dDelta;
            rep.predictedCore = node_runs(g, predicted);
            rep.containmentOK = covered(rep.predictedCore, rep.measuredZeroSet, slack);

            rep.coreDistance = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (dist[i] <= 0.0) continue;
                const double x = g.coordinate(i);
                const bool inCore = std::any_of(rep.measuredZeroSet.begin(), rep.measuredZeroSet.end(),
                                                [&](const Interval& m) { return m.lo <= x && x <= m.hi; });
                if (inCore && !(rep.coreDistance <= dist[i])) rep.coreDistance = dist[i];
            }
            reports.push_back(std::move(rep));
        }
    }
    if (!anyNontrivial) throw SolverError("verify_deadcore_formation: every solve returned the trivial solution");
    return reports;
}

std::optional<double> empirical_deadcore_onset(const std::vector<DeadCoreReport>& reports, double q)
{
    std::optional<double> best;
    for (const auto& r : reports)
        if (r.q == q && !r.measuredZeroSet.empty() && (!best || r.delta < *best)) best = r.delta;
    return best;
}

double core_distance_slope(const std::vector<DeadCoreReport>& reports, double q)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& r : reports) {
        if (r.q != q || !(r.coreDistance > 0.0)) continue;
        const double x = std::log(r.delta), y = std::log(r.coreDistance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_sweep_csv(std::ostream& out, const std::vector<DeadCoreReport>& reports)
{
    out << "delta,q,dDelta,coreLeft,coreRight,containmentOK\n" << std::setprecision(17);
    for (const auto& r : reports) {
        out << r.delta << ',' << r.q << ',' << r.dDelta << ',';
        if (r.measuredZeroSet.empty())
            out << "nan,nan";
        else
            out << r.measuredZeroSet.front().lo << ',' << r.measuredZeroSet.back().hi;
        out << ',' << (r.containmentOK ? "true" : "false") << '\n';
    }
}

BoundaryPositivityReport boundary_positivity_check(const Grid& grid, const Weight& w, double collarWidth, double q,
                                                   const Field& u)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("boundary_positivity_check: q must lie in (0, 1)");
    if (!(collarWidth > 0.0)) throw std::invalid_argument("boundary_positivity_check: collar width must be positive");
    if (u.min() < 0.0) throw std::invalid_argument("boundary_positivity_check: u must be nonnegative");

    std::vector<Collar> collars;
    if (grid.is_ball()) {
        collars.push_back({grid.right() - collarWidth, true});
    } else {
        collars.push_back({grid.left() + collarWidth, false});
        collars.push_back({grid.right() - collarWidth, true});
    }

    std::vector<double> plus(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) plus[i] = std::max(w[i], 0.0);
    const Weight wplus = make_weight(w.grid_ptr(), Sampled{Field(w.grid_ptr(), std::move(plus))});

    BoundaryPositivityReport rep;
    rep.epsilon = std::numeric_limits<double>::infinity();
    rep.sigma1 = std::numeric_limits<double>::infinity();
    for (const Collar& c : collars) {
        const std::size_t d = grid.nearest_node(c.edge);
        const std::size_t first = c.upper ? d + 1 : 0;
        const std::size_t last = c.upper ? grid.size() - 1 : d - 1;
        for (std::size_t i = first; i <= last; ++i)
            if (!(w[i] > 0.0))
                throw ConditionError("collar", w[i], 0.0,
                                     "collar is not inside the positive set of a (a = " + std::to_string(w[i]) +
                                         " at x = " + std::to_string(grid.coordinate(i)) + ")");
        const EigenPair ep = mixed_eigen(grid, wplus, c);
        rep.sigma1 = std::min(rep.sigma1, ep.eigenvalue);
        for (std::size_t i = first; i <= last; ++i)
            rep.epsilon = std::min(rep.epsilon, u[i] / ep.eigenfunction[i]);
        rep.boundaryValues.push_back(u[c.upper ? grid.size() - 1 : 0]);
    }
    rep.positive = rep.epsilon > 0.0 && *std::min_element(rep.boundaryValues.begin(), rep.boundaryValues.end()) > 0.0;
    return rep;
}

}  // namespace sublin
