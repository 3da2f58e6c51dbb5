#include "sublin/acceptance.hpp"

#include "sublin/branch.hpp"
#include "sublin/deadcore.hpp"
#include "sublin/eigen.hpp"
#include "sublin/errors.hpp"
#include "sublin/radial.hpp"
#include "sublin/solve.hpp"
#include "sublin/weights.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sublin {

namespace {

constexpr double pi = std::numbers::pi;

class Recorder {
public:
    explicit Recorder(AcceptanceItem& item) : item_(item) {}

    bool check(bool ok, const std::string& what)
    {
        item_.details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        if (!ok) failed_ = true;
        return ok;
    }
    void note(const std::string& what) { item_.details.push_back("     " + what); }
    bool failed() const { return failed_; }

private:
    AcceptanceItem& item_;
    bool failed_ = false;
};

std::string fmt(double x)
{
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

double max_gap(const Field& a, const Field& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Field times(const Field& u, double c)
{
    auto v = std::vector<double>(u.values().begin(), u.values().end());
    for (double& x : v) x *= c;
    return Field(u.grid_ptr(), std::move(v));
}

// Composite 5-point Gauss-Legendre on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels)
{
    static const double x[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640, -0.9061798459386640};
    static const double wt[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                 0.2369268850561891};
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int k = 0; k < 5; ++k) s += wt[k] * f(mid + 0.5 * h * x[k]);
    }
    return 0.5 * h * s;
}

// ---- 1: closed-form solution on (0, π) -----------------------------------

void exact_solution(Recorder& rec, const AcceptanceOptions&)
{
    const CorpusCase cc{"remark-q0", {{"q", 0.5}}};
    double previous = 0.0;
    for (std::size_t nodes : {1024u, 2048u, 4096u}) {
        const auto g = build_grid(GridSpec::interval(0.0, pi, nodes));
        const auto ex = corpus_exact(cc, g);
        const double res = residual(ex.weight.values(), 0.5, ex.solutions.front()).max_abs();
        if (nodes == 1024) rec.check(res <= 1e-4, "residual of exact field at 1024 nodes " + fmt(res) + " <= 1e-4");
        if (previous > 0.0) {
            const double ratio = previous / res;
            rec.check(ratio >= 3.5, "residual reduction " + std::to_string(nodes / 2) + " -> " +
                                        std::to_string(nodes) + " nodes: " + fmt(ratio) + " >= 3.5");
        }
        previous = res;
    }
    const auto g = build_grid(GridSpec::interval(0.0, pi, 2048));
    const auto ex = corpus_exact(cc, g);
    const Field& u = ex.solutions.front();
    const Field guess = sample(g, [&](double x) { return 1.0 + 1e-3 * std::cos(3.0 * x); });
    std::vector<double> pert(u.size());
    for (std::size_t i = 0; i < pert.size(); ++i) pert[i] = u[i] * guess[i];
    const Field v = newton_refine(*g, ex.weight, 0.5, Field(g, std::move(pert)));
    const double err = max_gap(u, v);
    rec.check(err <= 1e-5, "Newton from a 1e-3 perturbation, max error at 2048 nodes " + fmt(err) + " <= 1e-5");
}

// ---- 2: two-solution corpus on (−2, 2) ------------------------------------

void ti_cubic(Recorder& rec, const AcceptanceOptions&)
{
    const double q = 0.5;
    const auto p = ti_cubic_polynomial(q);
    const double id[4] = {p.value(1.0) - 4.0, p.derivative(1.0) - 8.0, p.second_derivative(1.0) - 12.0, p.derivative(2.0)};
    double worst = 0.0;
    for (double d : id) worst = std::max(worst, std::abs(d));
    rec.check(worst <= 1e-12, "p(1)=4, p'(1)=8, p''(1)=12, p'(2)=0, worst defect " + fmt(worst));
    const double ref[4] = {-20.0 / 3.0, 26.0, -24.0, 26.0 / 3.0};
    double cdef = 0.0;
    for (int k = 0; k < 4; ++k) cdef = std::max(cdef, std::abs(p.coefficients.at(k) - ref[k]));
    rec.check(cdef <= 1e-12, "(alpha, beta, gamma, delta) = (-20/3, 26, -24, 26/3), defect " + fmt(cdef));

    const auto g = build_grid(GridSpec::interval(-2.0, 2.0, 2049));
    const auto ex = corpus_exact(CorpusCase{"ti-cubic", {{"q", q}}}, g);
    const Weight& w = ex.weight;
    double jump = 0.0;
    for (double x : {-1.0, 1.0}) {
        const std::size_t i = g->nearest_node(x);
        jump = std::max(jump, std::abs(w.limit_at(i, -1) - w.limit_at(i, +1)));
    }
    rec.check(jump <= 1e-8, "weight continuity at x = +-1, jump " + fmt(jump));

    const Field& u1 = ex.solutions.at(0);
    const Field& u2 = ex.solutions.at(1);
    const Field m1 = minimize_energy(*g, w, q, sample(g, [](double x) { return x > 0.0 ? 1.0 : 0.0; }));
    const Field m2 = minimize_energy(*g, w, q, sample(g, [](double x) { return x < 0.0 ? 1.0 : 0.0; }));
    const double e1 = max_gap(m1, u1), e2 = max_gap(m2, u2);
    rec.check(e1 <= 1e-3, "energy descent from 1{x>0} recovers u1, max error " + fmt(e1));
    rec.check(e2 <= 1e-3, "energy descent from 1{x<0} recovers u2, max error " + fmt(e2));

    const Field& sub = *ex.subsolution;
    const Field u = monotone_iterate(*g, w, q, {sub, large_supersolution(*g, w, q, sub.max()), true});
    const auto pc = classify_positivity(u);
    rec.check(pc.cls == Positivity::interiorOfCone,
              std::string("monotone iteration from max(u1, u2) gives ") + to_string(pc.cls) + ", min " + fmt(pc.minValue));

    const auto c1 = classify_positivity(u1);
    const auto cores = measure_deadcore(u1);
    const double h = g->spacing();
    const bool found = c1.cls == Positivity::deadCore && cores.size() == 1 &&
                       std::abs(cores[0].lo + 2.0) <= 2.0 * h && std::abs(cores[0].hi + 1.0) <= 2.0 * h;
    std::string where = cores.empty() ? "none" : "[" + fmt(cores[0].lo) + ", " + fmt(cores[0].hi) + "]";
    rec.check(found, std::string("u1 is ") + to_string(c1.cls) + " with zero set " + where + ", expected [-2, -1] +- 2h");
}

// ---- remark-q0 branch shared by items 3 to 5 -------------------------------

struct Q0Setup {
    GridPtr grid;
    Weight w;
    EigenPair pair;
    double tstar = 0.0;
};

Q0Setup q0_setup(std::size_t nodes)
{
    auto g = build_grid(GridSpec::interval(0.0, pi, nodes));
    Weight w = make_weight(g, CorpusCase{"remark-q0", {{"q", 0.5}}});
    EigenPair pair = principal_indefinite_eigen(*g, w);
    const double ts = compute_tstar(*g, w, pair);
    return {g, std::move(w), std::move(pair), ts};
}

BranchSchedule q0_schedule(double qMin)
{
    BranchSchedule s;
    s.qMin = qMin;
    s.stops = {0.99, 0.97, 0.95, 0.9, 0.75, 0.7};
    return s;
}

// ---- 3 ---------------------------------------------------------------------

void ls_items(Recorder& rec, const AcceptanceOptions& opt)
{
    const auto s = q0_setup(1025);
    const double ts = opt.invertTstar ? 1.0 / s.tstar : s.tstar;
    rec.note("mu1 = " + fmt(s.pair.eigenvalue) + ", t* = " + fmt(ts));
    const Weight wn = s.w.scaled(s.pair.eigenvalue);
    const Branch nb = trace_branch(*s.grid, wn, q0_schedule(0.9));
    const LSReport ls = ls_identities(*s.grid, s.w, s.pair, ts, &nb);
    const double rel = std::abs(ls.tstarIdentity) / ls.tstarIdentityScale;
    rec.check(ls.identity_ok(), "int a phi^2 log(t* phi) = " + fmt(ls.tstarIdentity) + ", relative " + fmt(rel) + " <= 1e-9");
    rec.check(ls.phiQT > 0.0, "int a phi^2 = " + fmt(ls.phiQT) + " > 0");
    rec.check(ls.slope_ok(0.05), "d gamma1/dq at q = 1: measured " + fmt(ls.gammaSlopeMeasured) + ", predicted " +
                                     fmt(ls.gammaSlopePredicted) + " (5%)");
}

// ---- 4 ---------------------------------------------------------------------

void asymptotics(Recorder& rec, const AcceptanceOptions&)
{
    const auto s = q0_setup(1025);
    const BranchSchedule sch = q0_schedule(0.75);
    const Branch b = trace_branch(*s.grid, s.w, sch);
    const double mu = s.pair.eigenvalue;
    const Branch bn = trace_branch(*s.grid, s.w.scaled(mu), sch);

    std::map<double, const BranchPoint*> at;
    for (const auto& p : b.points) at[p.q] = &p;
    std::vector<double> dist;
    for (double q : {0.9, 0.95, 0.99}) {
        const auto it = at.find(q);
        if (it == at.end()) {
            rec.check(false, "branch has no point at q = " + fmt(q));
            return;
        }
        const Field v = times(it->second->u, std::pow(mu, 1.0 / (1.0 - q)));
        dist.push_back(max_gap(v, times(s.pair.eigenfunction, s.tstar)));
    }
    rec.check(dist[0] > dist[1] && dist[1] > dist[2], "|mu1^{1/(1-q)} u_q - t* phi1| at q = 0.9, 0.95, 0.99: " +
                                                           fmt(dist[0]) + ", " + fmt(dist[1]) + ", " + fmt(dist[2]));

    double worst = 0.0;
    int common = 0;
    for (const auto& p : bn.points) {
        const auto it = at.find(p.q);
        if (it == at.end()) continue;
        ++common;
        const Field v = times(it->second->u, std::pow(mu, 1.0 / (1.0 - p.q)));
        worst = std::max(worst, max_gap(v, p.u) / p.u.max_abs());
    }
    rec.check(common >= 3 && worst <= 1e-6, "rescaling a -> mu1 a over " + std::to_string(common) +
                                                " common exponents, worst relative gap " + fmt(worst));

    const BranchPoint up = probe_above_one(*s.grid, s.w, s.pair, s.tstar, 1.0 + 1.0 / 128.0);
    rec.check(up.gamma1 && *up.gamma1 < 0.0,
              "q = 1 + 1/128 probe: gamma1 = " + (up.gamma1 ? fmt(*up.gamma1) : std::string("n/a")) + " < 0");
}

// ---- 5 ---------------------------------------------------------------------

void interval_bracket(Recorder& rec, const AcceptanceOptions& opt)
{
    // Inner-positive construction on the half interval, seen as a ball of
    // radius π/2 centred at π/2; 1537 nodes put R0 = π/6 on a node.
    {
        const auto g = build_grid(GridSpec::ball(pi / 2.0, 1, 1537));
        const Weight w = make_weight(g, CorpusCase{"remark-q0", {{"q", 0.5}}});
        const double q = 0.75;
        const auto rc = check_radial_conditions(w, q, pi / 6.0);
        rec.check(rc.infernoHolds && q > rc.cqThreshold,
                  "q = 0.75 above the inner-positive threshold " + fmt(rc.cqThreshold));
        const CCConstruction cc = build_cc(w, q, pi / 6.0);
        const auto rep = verify_weak_subsolution(w.scaled(cc.gamma), q, cc.glued, cc.split);
        rec.check(cc.fluxCheck.ok && rep.verdict, "glued subsolution: flux " + fmt(cc.fluxCheck.vPrime) + " <= " +
                                                       fmt(cc.fluxCheck.zPrime) + ", weak residual " +
                                                       fmt(rep.maxWeakResidual));
        const Field sub = rescale_solution(cc.glued, 1.0 / cc.gamma, q);
        const Field u = monotone_iterate(*g, w, q, {sub, large_supersolution(*g, w, q, sub.max()), true});
        const auto pc = classify_positivity(u);
        rec.check(pc.cls == Positivity::interiorOfCone,
                  std::string("monotone iteration at q = 0.75 gives ") + to_string(pc.cls) + ", min " + fmt(pc.minValue));
    }

    const auto s = q0_setup(1025);
    const Branch b = trace_branch(*s.grid, s.w, q0_schedule(0.6));
    bool at075 = false;
    for (const auto& p : b.points)
        if (p.q == 0.75) at075 = p.positivity.cls == Positivity::interiorOfCone && p.gamma1 && *p.gamma1 > 0.0;
    rec.check(at075, "branch point at q = 0.75 is interior to the cone and stable");

    MultistartParams ms;
    ms.seed = opt.seed;
    const IntervalEstimate est = estimate_interval_I(*s.grid, s.w, b, {0.5, 0.6, 0.65, 0.68}, ms);
    for (const auto& e : est.evidence) {
        std::string cls;
        for (auto c : e.distinctClasses) cls += std::string(" ") + to_string(c);
        rec.note("q = " + fmt(e.q) + ": " + std::to_string(e.attempts) + " starts, " + std::to_string(e.trivial) +
                 " trivial, " + std::to_string(e.failed) + " failed, classes" + (cls.empty() ? " none" : cls));
        if (e.q == 0.5) {
            const bool only = e.foundNonInterior && !e.foundInterior && e.distinctClasses.size() == 1 &&
                              e.distinctClasses[0] == Positivity::positiveInterior;
            rec.check(only, "q = 0.5: the only nontrivial solution found is positive inside, zero on the boundary");
        }
    }
    const bool inside = est.qiLower && *est.qiLower >= 0.5 && est.qiUpper <= 0.71;
    rec.check(inside, "q_i bracket [" + (est.qiLower ? fmt(*est.qiLower) : std::string("none")) + ", " +
                          fmt(est.qiUpper) + "] within [0.5, 0.71]");
}

// ---- 6 ---------------------------------------------------------------------

void rad2(Recorder& rec, const AcceptanceOptions&)
{
    const double sigma = 0.9, q = 0.5;
    const auto g = build_grid(GridSpec::ball(1.0, 1, 1025));
    const Weight w = make_weight(g, CorpusCase{"rem-I01", {{"sigma", sigma}}});
    const auto rc = check_radial_conditions(w, q, 0.5);
    rec.check(rc.sipiHolds, "sipi: " + fmt(rc.sipiLHS) + " < " + fmt(rc.sipiRHS));
    const Rad2Construction r = build_rad2(w, q, 0.5);
    std::string trail;
    for (const auto& c : r.conditionTrail) trail += " " + c.name + (c.holds ? "" : "(fails)");
    rec.check(r.all_hold(), "condition trail:" + trail);
    const Field sub = rescale_solution(r.glued, 1.0 / r.gammaEps, q);
    const Field u = monotone_iterate(*g, w, q, {sub, large_supersolution(*g, w, q, sub.max()), true});
    const auto pc = classify_positivity(u);
    rec.check(pc.cls == Positivity::interiorOfCone,
              std::string("monotone iteration gives ") + to_string(pc.cls) + ", min " + fmt(pc.minValue));
    const double expected = 0.1 / 1.9;
    const double got = rc.KNinterval ? rc.KNinterval->first : std::numeric_limits<double>::quiet_NaN();
    rec.check(rc.KNinterval && std::abs(got - expected) <= 1e-12,
              "interval endpoint (1-KN)/(1-KN+2K) = " + fmt(got) + ", expected 0.1/1.9, K = " + fmt(rc.K));
}

// ---- 7 ---------------------------------------------------------------------

void near_zero(Recorder& rec, const AcceptanceOptions&)
{
    const double exact = pi * (2.0 - std::sqrt(3.0));
    const double quad = gauss_legendre([](double x) { return std::cos(x) * std::log(2.0 + std::cos(x)); }, 0.0, pi, 64);
    rec.check(std::abs(quad - exact) <= 1e-8, "int_0^pi cos x log(2 + cos x) dx = " + fmt(quad) + " vs pi(2 - sqrt 3), gap " +
                                                  fmt(std::abs(quad - exact)));
    const auto g = build_grid(GridSpec::interval(0.0, pi, 1025));
    const Weight a0 = make_weight(g, CorpusCase{"cosine", {{"amplitude", 1.0}, {"shift", 0.0}}});
    const NearZeroReport r = near_zero_analysis(*g, a0, 2.0, {1e-3, 1e-4});
    rec.note("grid S = " + fmt(r.S) + ", predicted q/eps = " + fmt(r.predictedSlope));
    const double target = 2.0 + std::sqrt(3.0);
    for (const auto& e : r.entries) {
        const double rel = std::abs(e.ratio - target) / target;
        if (e.epsilon == 1e-4)
            rec.check(rel <= 0.1, "q(eps)/eps at eps = 1e-4: " + fmt(e.ratio) + " vs 2 + sqrt 3, relative " + fmt(rel));
        else
            rec.note("q(eps)/eps at eps = " + fmt(e.epsilon) + ": " + fmt(e.ratio));
    }
}

// ---- 8 ---------------------------------------------------------------------

void deadcore_sweep(Recorder& rec, const AcceptanceOptions&)
{
    const auto g = build_grid(GridSpec::interval(-1.0, 1.0, 2049));
    const Field b1 = sample(g, [](double x) { return std::abs(x) > 0.5 ? 1.0 : 0.0; });
    const Field b2 = sample(g, [](double x) { return std::max(0.25 - x * x, 0.0); });
    const std::vector<double> deltas = {10.0, 40.0, 160.0};
    const auto reports = verify_deadcore_formation(g, b1, b2, 0.2, 0.5, deltas);
    const double h = g->spacing();

    for (double q : {0.25, 0.5}) {
        std::vector<const DeadCoreReport*> rs;
        for (const auto& r : reports)
            if (r.q == q) rs.push_back(&r);
        std::string cores;
        bool nonempty = true, nested = true;
        const Interval* prev = nullptr;
        for (const auto* r : rs) {
            const bool has = !r->measuredZeroSet.empty();
            cores += " delta=" + fmt(r->delta) + ":" +
                     (has ? "[" + fmt(r->measuredZeroSet[0].lo) + "," + fmt(r->measuredZeroSet[0].hi) + "]" : "empty");
            if (!has) {
                nonempty = false;
                continue;
            }
            const Interval& c = r->measuredZeroSet.front();
            if (prev && !(c.lo <= prev->lo + h && c.hi >= prev->hi - h)) nested = false;
            prev = &c;
        }
        rec.check(nonempty, "q = " + fmt(q) + " core nonempty at every delta:" + cores);
        rec.check(nested, "q = " + fmt(q) + " cores grow with delta");
        const double slope = core_distance_slope(reports, q);
        rec.check(std::abs(slope + 0.5) <= 0.15, "q = " + fmt(q) + " log-log slope of core distance to the support " +
                                                     fmt(slope) + " within -0.5 +- 0.15");
        bool contained = true, bounded = true;
        for (const auto* r : rs) {
            contained = contained && r->containmentOK;
            bounded = bounded && r->boundHolds;
        }
        rec.check(contained, "q = " + fmt(q) + " predicted core inside the measured zero set (2h)");
        rec.check(bounded, "q = " + fmt(q) + " max u below the uniform bound C = " + fmt(rs.front()->uniformBound));
    }
}

// ---- 9 ---------------------------------------------------------------------

void properties(Recorder& rec, const AcceptanceOptions& opt)
{
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);

    // operator: symmetric, constants in the kernel, positive semidefinite
    for (const GridSpec& spec : {GridSpec::interval(-1.0, 2.0, 257), GridSpec::ball(1.0, 3, 257)}) {
        const auto g = build_grid(spec);
        std::vector<double> x(g->size()), y(g->size()), one(g->size(), 1.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = U(rng);
            y[i] = U(rng);
        }
        const auto kx = apply_stiffness(*g, x), ky = apply_stiffness(*g, y), k1 = apply_stiffness(*g, one);
        double xy = 0.0, yx = 0.0, scale = 0.0, kern = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            xy += y[i] * kx[i];
            yx += x[i] * ky[i];
            scale += std::abs(y[i] * kx[i]);
            kern = std::max(kern, std::abs(k1[i]));
        }
        const bool ok = std::abs(xy - yx) <= 1e-12 * scale && kern <= 1e-12 && dirichlet_energy(*g, x) >= 0.0;
        rec.check(ok, std::string(spec.kind == GridKind::Ball ? "ball" : "interval") +
                          " stiffness: symmetry defect " + fmt(std::abs(xy - yx) / scale) + ", |K 1| " + fmt(kern));
    }

    // eigenpair and the 𝒫° branch point at q = 0.75 on remark-q0
    const auto s = q0_setup(1025);
    const Field& phi = s.pair.eigenfunction;
    const double num = dirichlet_energy(*s.grid, phi.values());
    std::vector<double> aphi2(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) aphi2[i] = s.w[i] * phi[i] * phi[i];
    const double rq = num / integrate(*s.grid, aphi2);
    const double rel = std::abs(rq - s.pair.eigenvalue) / s.pair.eigenvalue;
    rec.check(rel <= 1e-8, "Rayleigh quotient matches mu1 to " + fmt(rel));

    BranchSchedule sch = q0_schedule(0.75);
    const Branch b = trace_branch(*s.grid, s.w, sch);
    const Field& u = b.points.back().u;
    const double q = b.points.back().q;

    std::vector<double> auq(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) auq[i] = s.w[i] * std::pow(u[i], q + 1.0);
    const double lhs = dirichlet_energy(*s.grid, u.values()), rhs = integrate(*s.grid, auq);
    const double eid = std::abs(lhs - rhs) / std::abs(rhs);
    rec.check(eid <= 1e-5, "energy identity int|grad u|^2 = int a u^{q+1} at q = " + fmt(q) + ", relative " + fmt(eid));

    double hom = 0.0;
    for (double c : {0.5, 2.0, s.pair.eigenvalue}) {
        const Weight wc = s.w.scaled(c);
        const Field target = rescale_solution(u, c, q);
        const Field v = newton_refine(*s.grid, wc, q, times(target, 1.0 + 1e-3));
        hom = std::max(hom, max_gap(v, target) / target.max_abs());
    }
    rec.check(hom <= 1e-6, "homogeneity c a <-> c^{1/(1-q)} u for c = 0.5, 2, mu1, worst relative gap " + fmt(hom));

    const UniquenessCheck uq = multistart_uniqueness(*s.grid, s.w, q, u, 5, opt.seed);
    rec.check(uq.converged == 5 && uq.maxDeviation <= 1e-6, "multistart uniqueness: " + std::to_string(uq.converged) +
                                                               "/5 converged, max deviation " + fmt(uq.maxDeviation));

    // monotone iteration and energy descent on the two-solution corpus
    const auto g = build_grid(GridSpec::interval(-2.0, 2.0, 1025));
    const auto ex = corpus_exact(CorpusCase{"ti-cubic", {{"q", 0.5}}}, g);
    const Field& sub = *ex.subsolution;
    const Field sup = large_supersolution(*g, ex.weight, 0.5, sub.max());
    MonotoneTrace mt;
    const Field m = monotone_iterate(*g, ex.weight, 0.5, {sub, sup, true}, {}, &mt);
    double below = 0.0, above = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        below = std::max(below, sub[i] - m[i]);
        above = std::max(above, m[i] - sup[i]);
    }
    rec.check(mt.minIncrement >= 0.0 && below <= 1e-12 * sup.max() && above <= 0.0,
              "monotone iteration: min increment " + fmt(mt.minIncrement) + ", sub <= u <= super");

    MinimizeTrace tr;
    minimize_energy(*g, ex.weight, 0.5, sample(g, [](double x) { return 1.0 + 0.5 * std::sin(2.0 * x); }), {}, &tr);
    bool descent = true;
    for (std::size_t k = 1; k < tr.energies.size(); ++k) descent = descent && tr.energies[k] <= tr.energies[k - 1];
    rec.check(descent, "energy nonincreasing over " + std::to_string(tr.energies.size()) + " descent iterates");
}

struct Entry {
    const char* name;
    void (*run)(Recorder&, const AcceptanceOptions&);
};

const std::map<int, Entry>& registry()
{
    static const std::map<int, Entry> r = {
        {1, {"exact_solution", exact_solution}}, {2, {"two_solution_corpus", ti_cubic}},
        {3, {"ls_identities", ls_items}},        {4, {"asymptotics", asymptotics}},
        {5, {"interval_bracket", interval_bracket}}, {6, {"rad2_construction", rad2}},
        {7, {"near_zero", near_zero}},           {8, {"deadcore_sweep", deadcore_sweep}},
        {9, {"property_suites", properties}},
    };
    return r;
}

}  // namespace

std::vector<int> acceptance_ids()
{
    std::vector<int> ids;
    for (const auto& [id, e] : registry()) ids.push_back(id);
    return ids;
}

const char* acceptance_name(int id) { return registry().at(id).name; }

AcceptanceItem run_acceptance_item(int id, const AcceptanceOptions& options)
{
    const Entry& e = registry().at(id);
    AcceptanceItem item;
    item.id = id;
    item.name = e.name;
    Recorder rec(item);
    const auto start = std::chrono::steady_clock::now();
    try {
        e.run(rec, options);
    } catch (const std::exception& ex) {
        rec.check(false, std::string("aborted: ") + ex.what());
    }
    item.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    item.pass = !rec.failed();
    return item;
}

void print_acceptance_table(std::ostream& out, const std::vector<AcceptanceItem>& items)
{
    for (const auto& it : items) {
        out << (it.pass ? "PASS " : "FAIL ") << it.id << ' ' << it.name << '\n';
        for (const auto& d : it.details) out << "    " << d << '\n';
    }
}

}  // namespace sublin
