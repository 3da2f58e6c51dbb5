#include "sublin/branch.hpp"

#include "sublin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sublin {

namespace {

double weighted(const Grid& g, const Weight& w, const Field& phi, auto&& f)
{
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] * phi[i] * phi[i] * f(phi[i]);
    return integrate(g, v);
}

double relative_gap(const Field& a, const Field& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d / std::max({a.max_abs(), b.max_abs(), std::numeric_limits<double>::min()});
}

// t v with t minimising E(t v); empty when ∫a v^{q+1} ≤ 0.
std::optional<Field> energy_scaled(const Grid& g, const Weight& w, double q, std::vector<double> v)
{
    const auto m = g.cell_measures();
    double gain = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) gain += m[i] * w[i] * std::pow(v[i], q + 1.0);
    const double dir = dirichlet_energy(g, v);
    if (!(gain > 0.0) || !(dir > 0.0)) return std::nullopt;
    const double t = std::pow(gain / dir, 1.0 / (1.0 - q));
    for (double& x : v) x *= t;
    return Field(w.grid_ptr(), std::move(v));
}

std::vector<double> random_smooth(const Grid& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    double coef[5];
    for (double& x : coef) x = c(rng);
    std::vector<double> v(g.size());
    const double L = g.right() - g.left();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double s = (g.coordinate(i) - g.left()) / L;
        double f = 1.0;
        for (int k = 0; k < 5; ++k) f += coef[k] * std::cos((k + 1) * std::numbers::pi * s);
        v[i] = std::max(f, 0.05);
    }
    return v;
}

std::vector<double> random_bump(const Grid& g, std::mt19937_64& rng)
{
    const double L = g.right() - g.left();
    std::uniform_real_distribution<double> centre(g.left(), g.right());
    std::uniform_real_distribution<double> width(0.05 * L, 0.4 * L);
    const double c = centre(rng), wd = width(rng);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double z = (g.coordinate(i) - c) / wd;
        v[i] = z * z < 1.0 ? (1.0 - z * z) * (1.0 - z * z) : 0.0;
    }
    return v;
}

void record(ProbeEvidence& ev, const Field& u)
{
    const PositivityClass pc = classify_positivity(u);
    if (pc.cls == Positivity::trivial) {
        ++ev.trivial;
        return;
    }
    if (pc.cls == Positivity::interiorOfCone)
        ev.foundInterior = true;
    else
        ev.foundNonInterior = true;
    for (const Field& s : ev.distinctSolutions)
        if (relative_gap(s, u) <= 1e-5) return;
    ev.distinctSolutions.push_back(u);
    ev.distinctClasses.push_back(pc.cls);
}

double gamma_at(const Grid& grid, const Weight& w, double q, const Field& guess, const SolveParams& params)
{
    const BranchPoint p = branch_point(grid, w, q, guess, params);
    if (!p.gamma1) throw SolverError("ls_identities: branch point at q = " + std::to_string(q) + " is not positive");
    return *p.gamma1;
}

}  // namespace

const char* to_string(Termination t)
{
    switch (t) {
    case Termination::reachedQmin: return "reachedQmin";
    case Termination::positivityLost: return "positivityLost";
    case Termination::newtonFailed: return "newtonFailed";
    }
    return "unknown";
}

double compute_tstar(const Grid& grid, const Weight& w, const EigenPair& pair)
{
    const Field& phi = pair.eigenfunction;
    if (!(phi.min() > 0.0)) throw SolverError("compute_tstar: eigenfunction is not positive");
    const double den = weighted(grid, w, phi, [](double) { return 1.0; });
    if (!(den > 0.0))
        throw SolverError("compute_tstar: integral of a phi^2 is " + std::to_string(den) + ", expected positive");
    const double num = weighted(grid, w, phi, [](double p) { return std::log(p); });
    return std::exp(-num / den);
}

Field asymptotic_state(const Weight& w, const EigenPair& pair, double tstar, double q)
{
    if (q == 1.0) throw std::invalid_argument("asymptotic_state: q must differ from 1");
    const double c = std::pow(pair.eigenvalue, -1.0 / (1.0 - q)) * tstar;
    std::vector<double> v(pair.eigenfunction.values().begin(), pair.eigenfunction.values().end());
    for (double& x : v) x *= c;
    return Field(w.grid_ptr(), std::move(v));
}

BranchPoint branch_point(const Grid& grid, const Weight& w, double q, const Field& guess, const SolveParams& params)
{
    BranchPoint p;
    p.q = q;
    p.u = newton_refine(grid, w, q, guess, params);
    p.minU = p.u.min();
    p.maxU = p.u.max();
    p.positivity = classify_positivity(p.u);
    p.residual = relative_residual(w, q, p.u);
    if (p.positivity.cls == Positivity::interiorOfCone) p.gamma1 = linearized_eigen(grid, w, q, p.u).gamma1;
    return p;
}

Branch trace_branch(const Grid& grid, const Weight& w, const BranchSchedule& sch, const SolveParams& params)
{
    if (!(sch.qMin > 0.0 && sch.qMin < sch.qStart && sch.qStart < 1.0))
        throw std::invalid_argument("trace_branch: need 0 < qMin < qStart < 1");
    Branch br;
    const EigenPair pair = principal_indefinite_eigen(grid, w);
    br.mu1 = pair.eigenvalue;
    br.tstar = compute_tstar(grid, w, pair);

    std::ostringstream history;
    double q0 = sch.qStart;
    for (;;) {
        try {
            BranchPoint p = branch_point(grid, w, q0, asymptotic_state(w, pair, br.tstar, q0), params);
            if (p.positivity.cls != Positivity::interiorOfCone)
                throw SolverError("initial point is not in the interior of the cone");
            br.points.push_back(std::move(p));
            break;
        } catch (const SolverError& e) {
            history << " q=" << q0 << ": " << e.what() << ';';
            if (1.0 - q0 <= std::ldexp(1.0, -12)) throw SolverError("trace_branch: initial refine failed;" + history.str());
            q0 = 1.0 - 0.5 * (1.0 - q0);
        }
    }

    std::vector<double> stops = sch.stops;
    stops.push_back(sch.qMin);
    std::sort(stops.begin(), stops.end(), std::greater<>());

    double step = sch.initialStep;
    while (br.points.back().q > sch.qMin) {
        const BranchPoint& cur = br.points.back();
        double qn = cur.q - step;
        for (double s : stops)
            if (s < cur.q && s >= qn) {
                qn = s;
                break;
            }
        // Secant in log of the normalised field μ₁^{1/(1−q)}u, which stays
        // O(1) near q = 1 while u itself scales like μ₁^{−1/(1−q)}.
        auto lognorm = [&](const BranchPoint& p, std::size_t i) { return std::log(p.u[i]) + std::log(br.mu1) / (1.0 - p.q); };
        std::vector<double> guess(grid.size());
        const double f = br.points.size() >= 2 ? (qn - cur.q) / (cur.q - br.points[br.points.size() - 2].q) : 0.0;
        for (std::size_t i = 0; i < guess.size(); ++i) {
            double v = lognorm(cur, i);
            if (br.points.size() >= 2) v += f * (v - lognorm(br.points[br.points.size() - 2], i));
            guess[i] = std::exp(v - std::log(br.mu1) / (1.0 - qn));
        }
        try {
            BranchPoint p = branch_point(grid, w, qn, Field(w.grid_ptr(), std::move(guess)), params);
            const bool interior = p.positivity.cls == Positivity::interiorOfCone;
            br.points.push_back(std::move(p));
            if (!interior) {
                br.terminationReason = Termination::positivityLost;
                return br;
            }
            step = std::min(step * 1.5, sch.maxStep);
        } catch (const SolverError&) {
            step *= 0.5;
            if (step < sch.minStep) {
                br.terminationReason = Termination::newtonFailed;
                return br;
            }
        }
    }
    br.terminationReason = Termination::reachedQmin;
    return br;
}

BranchPoint probe_above_one(const Grid& grid, const Weight& w, const EigenPair& pair, double tstar, double q,
                            const SolveParams& params)
{
    if (!(q > 1.0)) throw std::invalid_argument("probe_above_one: q must exceed 1");
    return branch_point(grid, w, q, asymptotic_state(w, pair, tstar, q), params);
}

void write_branch_csv(std::ostream& out, const Branch& branch)
{
    out << "q,minU,maxU,gamma1,positivityClass,residual\n" << std::setprecision(17);
    for (const auto& p : branch.points) {
        out << p.q << ',' << p.minU << ',' << p.maxU << ',';
        if (p.gamma1)
            out << *p.gamma1;
        else
            out << "nan";
        out << ',' << to_string(p.positivity.cls) << ',' << p.residual << '\n';
    }
}

ProbeEvidence probe_exponent(const Grid& grid, const Weight& w, double q, const MultistartParams& ms,
                             const std::vector<Field>& seeds, const SolveParams& params)
{
    ProbeEvidence ev;
    ev.q = q;
    std::mt19937_64 rng(ms.seed);
    for (int k = 0; k < ms.starts; ++k) {
        ++ev.attempts;
        auto v = k % 2 == 0 ? random_smooth(grid, rng) : random_bump(grid, rng);
        auto init = energy_scaled(grid, w, q, v);
        if (!init) {
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!(w[i] > 0.0)) v[i] *= 0.01;
            init = energy_scaled(grid, w, q, v);
        }
        if (!init) {
            ++ev.trivial;
            continue;
        }
        try {
            record(ev, minimize_energy(grid, w, q, *init, params));
        } catch (const SolverError&) {
            ++ev.failed;
        }
    }
    for (const Field& s : seeds) {
        ++ev.attempts;
        try {
            record(ev, newton_refine(grid, w, q, s, params));
        } catch (const SolverError&) {
            ++ev.failed;
        }
    }
    // the maximum of two solutions is a subsolution
    if (ev.distinctSolutions.size() >= 2) {
        ++ev.attempts;
        std::vector<double> sub(grid.size(), 0.0);
        for (const Field& s : ev.distinctSolutions)
            for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = std::max(sub[i], s[i]);
        Field lower(w.grid_ptr(), std::move(sub));
        try {
            const Field upper = large_supersolution(grid, w, q, lower.max());
            record(ev, monotone_iterate(grid, w, q, {lower, upper, true}, params));
        } catch (const std::exception&) {
            ++ev.failed;
        }
    }
    return ev;
}

IntervalEstimate estimate_interval_I(const Grid& grid, const Weight& w, const Branch& branch,
                                     const std::vector<double>& probes, const MultistartParams& ms,
                                     const SolveParams& params)
{
    if (branch.points.empty()) throw std::invalid_argument("estimate_interval_I: empty branch");
    IntervalEstimate est;
    const BranchPoint* lowest = nullptr;
    for (const auto& p : branch.points)
        if (p.positivity.cls == Positivity::interiorOfCone && p.q < est.qiUpper) {
            est.qiUpper = p.q;
            lowest = &p;
        }
    std::vector<double> sorted = probes;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (double q : sorted) {
        std::vector<Field> seeds;
        if (lowest) seeds.push_back(lowest->u);
        ProbeEvidence ev = probe_exponent(grid, w, q, ms, seeds, params);
        if (ev.foundInterior && q < est.qiUpper) est.qiUpper = q;
        est.evidence.push_back(std::move(ev));
    }
    for (const auto& ev : est.evidence)
        if (!ev.foundInterior && ev.q < est.qiUpper && (!est.qiLower || ev.q > *est.qiLower)) est.qiLower = ev.q;
    return est;
}

UniquenessCheck multistart_uniqueness(const Grid& grid, const Weight& w, double q, const Field& u, int count,
                                      std::uint64_t seed, const SolveParams& params)
{
    UniquenessCheck out;
    std::mt19937_64 rng(seed);
    for (int k = 0; k < count; ++k) {
        auto f = random_smooth(grid, rng);  // in [0.05, 3.5]
        std::vector<double> g(u.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = u[i] * (0.5 + 0.3 * f[i]);
        try {
            const Field v = newton_refine(grid, w, q, Field(w.grid_ptr(), std::move(g)), params);
            if (classify_positivity(v).cls != Positivity::interiorOfCone) continue;
            ++out.converged;
            out.maxDeviation = std::max(out.maxDeviation, relative_gap(v, u));
        } catch (const SolverError&) {
        }
    }
    return out;
}

bool LSReport::identity_ok() const { return std::abs(tstarIdentity) <= 1e-9 * tstarIdentityScale + 1e-12; }

bool LSReport::slope_ok(double rel) const
{
    const double ratio = gammaSlopeMeasured / gammaSlopePredicted;
    return ratio >= 1.0 - rel && ratio <= 1.0 + rel;
}

LSReport ls_identities(const Grid& grid, const Weight& w, const EigenPair& pair, double tstar, const Branch* branch,
                       const SolveParams& params)
{
    const Weight wn = w.scaled(pair.eigenvalue);
    const Field& phi = pair.eigenfunction;
    LSReport r;
    r.phiQT = weighted(grid, wn, phi, [](double) { return 1.0; });
    r.tstarIdentityScale = std::abs(weighted(grid, wn, phi, [](double p) { return std::log(p); }));
    r.tstarIdentity = weighted(grid, wn, phi, [tstar](double p) { return std::log(tstar * p); });
    r.gammaSlopePredicted = -r.phiQT;

    EigenPair unit = pair;
    unit.eigenvalue = 1.0;
    for (double q : {0.99, 0.97}) {
        std::optional<double> g;
        if (branch)
            for (const auto& p : branch->points)
                if (std::abs(p.q - q) < 1e-12 && p.gamma1) g = p.gamma1;
        if (!g) g = gamma_at(grid, wn, q, asymptotic_state(wn, unit, tstar, q), params);
        r.gammaSamples.emplace_back(q, *g);
    }
    // quadratic through (1, 0), (1 − h1, γa), (1 − h2, γb), differentiated at 1
    const double h1 = 0.01, h2 = 0.03;
    const double ga = r.gammaSamples[0].second, gb = r.gammaSamples[1].second;
    r.gammaSlopeMeasured = -ga * h2 / (h1 * (h2 - h1)) + gb * h1 / (h2 * (h2 - h1));
    return r;
}

NearZeroReport near_zero_analysis(const Grid& grid, const Weight& a0weight, double t0, const std::vector<double>& epsilons)
{
    NearZeroReport rep;
    rep.volume = grid.measure();
    const double total = integrate(a0weight.values());
    if (std::abs(total) > 1e-8 * a0weight.values().max_abs() * rep.volume)
        throw ConditionError("compatibility", total, 0.0, "the q = 0 problem needs a zero-integral weight");
    const Field w0 = solve_linear_neumann(grid, a0weight.values());
    std::vector<double> u0(grid.size());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = t0 + w0[i];
    rep.u0 = Field(a0weight.grid_ptr(), u0);
    rep.positivityMargin = rep.u0.min();
    if (!(rep.positivityMargin > 0.0))
        throw ConditionError("positivity", rep.positivityMargin, 0.0, "u0 = t0 + w0 is not positive; increase t0");
    std::vector<double> alog(grid.size());
    for (std::size_t i = 0; i < alog.size(); ++i) alog[i] = a0weight[i] * std::log(u0[i]);
    rep.S = integrate(grid, alog);
    if (!(rep.S > 0.0)) throw SolverError("near_zero_analysis: integral of a log u0 is not positive");
    rep.predictedSlope = rep.volume / rep.S;

    for (double eps : epsilons) {
        if (!(eps > 0.0)) throw std::invalid_argument("near_zero_analysis: epsilon must be positive");
        NearZeroEntry e;
        e.epsilon = eps;
        auto psi = [&](double q) {
            std::vector<double> w(w0.values().begin(), w0.values().end()), f(grid.size());
            for (int it = 0; it < 200; ++it) {
                for (std::size_t i = 0; i < f.size(); ++i) {
                    const double u = t0 + w[i];
                    if (!(u > 0.0)) throw SolverError("near_zero_analysis: Picard iterate lost positivity");
                    f[i] = (a0weight[i] - eps) * std::pow(u, q);
                }
                const double mean = integrate(grid, f) / rep.volume;
                for (double& x : f) x -= mean;
                const Field next = solve_linear_neumann(grid, Field(a0weight.grid_ptr(), f));
                double change = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i) change = std::max(change, std::abs(next[i] - w[i]));
                w.assign(next.values().begin(), next.values().end());
                e.picardIterations = std::max(e.picardIterations, it + 1);
                if (change <= 1e-14 * std::max(1.0, t0)) break;
            }
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = (a0weight[i] - eps) * std::pow(t0 + w[i], q);
            return integrate(grid, f);
        };
        double lo = 0.0, hi = 0.2;
        if (!(psi(hi) > 0.0)) throw SolverError("near_zero_analysis: no sign change of the reduced function on (0, 0.2]");
        for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (psi(mid) > 0.0 ? hi : lo) = mid;
        }
        e.qEpsilon = 0.5 * (lo + hi);
        e.ratio = e.qEpsilon / eps;
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace sublin
