#include "sublin/radial.hpp"

#include "sublin/errors.hpp"
#include "sublin/solve.hpp"

#include <algorithm>
#include <cmath>

namespace sublin {

namespace {

double rpow(double r, int e) { return e == 0 ? 1.0 : std::pow(r, e); }

// Backward cumulative integrals on the outer part j = k..n-1:
//   I_j   = ∫_{r_j}^R f(a(y)) y^{N-1} dy
//   phi_j = ∫_{r_j}^R t^{1-N} I(t) dt
template <class F>
void outer_quadratures(const RadialProfile& prof, F&& f, std::vector<double>& I, std::vector<double>& phi)
{
    const RadialSplit& s = prof.split();
    const std::size_t n = s.order.size();
    const double h = s.h;
    I.assign(n, 0.0);
    phi.assign(n, 0.0);
    auto g = [&](std::size_t j) { return f(prof.at(j, false)) * rpow(s.radius(j), s.N - 1); };
    for (std::size_t j = n - 1; j-- > s.k;) I[j] = I[j + 1] + 0.5 * h * (g(j) + g(j + 1));
    auto ig = [&](std::size_t j) { return I[j] / rpow(s.radius(j), s.N - 1); };
    for (std::size_t j = n - 1; j-- > s.k;) phi[j] = phi[j + 1] + 0.5 * h * (ig(j) + ig(j + 1));
}

Field place(const RadialSplit& s, const GridPtr& grid, const std::vector<double>& radial)
{
    std::vector<double> v(grid->size(), 0.0);
    for (std::size_t j = 0; j < radial.size(); ++j) v[s.order[j]] = radial[j];
    return Field(grid, std::move(v));
}

ConditionCheck check(std::string name, double lhs, double rhs, bool strict)
{
    return {std::move(name), lhs, rhs, strict ? lhs < rhs : lhs <= rhs};
}

[[noreturn]] void fail(const ConditionCheck& c, const std::string& why)
{
    throw ConditionError(c.name, c.lhs, c.rhs, why);
}

}  // namespace

bool Rad2Construction::all_hold() const
{
    return std::all_of(conditionTrail.begin(), conditionTrail.end(), [](const ConditionCheck& c) { return c.holds; });
}

Field rescale_solution(const Field& u, double c, double q)
{
    const double f = std::pow(c, 1.0 / (1.0 - q));
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x *= f;
    return Field(u.grid_ptr(), std::move(v));
}

CCConstruction build_cc(const Weight& w, double q, double R0, Orientation side)
{
    const ConditionReport rep = check_radial_conditions(w, q, R0, side);
    CCConstruction cc;
    cc.q = q;
    cc.split = radial_split(w.grid(), R0, side);
    const RadialSplit& s = cc.split;
    cc.R0 = s.R0;
    cc.C = (1.0 - q) / (1.0 + q);
    cc.gamma = 1.0 / (1.0 - q);

    cc.conditionTrail.push_back(check("inferno", rep.infernoLHS, rep.infernoRHS, false));
    cc.conditionTrail.push_back({"a>=0 on inner ball", 0.0, 0.0, rep.innerNonnegative});
    cc.conditionTrail.push_back({"a<=0 on outer annulus", 0.0, 0.0, rep.outerNonpositive});
    cc.conditionTrail.push_back({"a nonincreasing on outer annulus", 0.0, 0.0, rep.monotoneOuterOK});
    for (const auto& c : cc.conditionTrail)
        if (!c.holds) fail(c, "hypothesis of the inner-positive construction fails");

    const RadialProfile prof(w, s);
    const std::size_t n = s.order.size();
    const std::size_t k = s.k;
    std::vector<double> I, phi;
    outer_quadratures(prof, [](double a) { return std::max(-a, 0.0); }, I, phi);
    std::vector<double> z(n, 0.0);
    for (std::size_t j = k; j < n; ++j) z[j] = std::pow(cc.C * phi[j], cc.gamma);
    cc.phi = place(s, w.grid_ptr(), phi);
    cc.z = place(s, w.grid_ptr(), z);

    // Inner Dirichlet problem -Δv = γ a v^q, v = z(R0): constant sub, and a
    // quadratic super V = z(R0) + c S^q (R0² - r²)/(2N) with V ≤ S.
    const Weight ga = w.scaled(cc.gamma);
    const double zb = z[k];
    const double c = cc.gamma * std::max(0.0, [&] {
        double m = prof.at(k, true);
        for (std::size_t j = 0; j < k; ++j) m = std::max(m, prof.at(j, true));
        return m;
    }());
    const double zeta = s.R0 * s.R0 / (2.0 * s.N);
    double S = zb + 1.0;
    for (int it = 0; it < 500; ++it) S = zb + c * std::pow(S, q) * zeta;
    S *= 2.0;
    std::vector<double> sub(n, zb), sup(n, zb);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = s.radius(j);
        sup[j] = zb + c * std::pow(S, q) * std::max(0.0, s.R0 * s.R0 - r * r) / (2.0 * s.N);
    }
    SolveParams params;
    params.tolerance = 1e-11;
    const Field vfull = monotone_iterate_dirichlet(w.grid(), ga, q,
                                                   {place(s, w.grid_ptr(), sub), place(s, w.grid_ptr(), sup), true},
                                                   s.order[k], zb, s.reversed, params);
    std::vector<double> v(n, 0.0), glued(n, 0.0);
    for (std::size_t j = 0; j <= k; ++j) v[j] = vfull[s.order[j]];
    for (std::size_t j = 0; j < n; ++j) glued[j] = j <= k ? v[j] : z[j];
    cc.v = place(s, w.grid_ptr(), v);
    cc.glued = place(s, w.grid_ptr(), glued);

    cc.fluxCheck.vPrime = (v[k] - v[k - 1]) / s.h;
    cc.fluxCheck.zPrime = (z[k + 1] - z[k]) / s.h;
    const double ftol = 1e-10 * std::max({std::abs(cc.fluxCheck.vPrime), std::abs(cc.fluxCheck.zPrime), 1e-300});
    cc.fluxCheck.ok = cc.fluxCheck.vPrime <= cc.fluxCheck.zPrime + ftol;
    cc.conditionTrail.push_back({"flux", cc.fluxCheck.vPrime, cc.fluxCheck.zPrime, cc.fluxCheck.ok});
    if (!cc.fluxCheck.ok) fail(cc.conditionTrail.back(), "interface flux condition v'(R0) <= z'(R0) fails");
    return cc;
}

Rad2Construction build_rad2(const Weight& w, double q, double R0, Orientation side)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("build_rad2: q must lie in (0, 1)");
    const ConditionReport rep = check_radial_conditions(w, q, R0, side);
    Rad2Construction out;
    out.q = q;
    out.split = radial_split(w.grid(), R0, side);
    const RadialSplit& s = out.split;
    out.R0 = s.R0;
    auto& trail = out.conditionTrail;

    trail.push_back(check("sipi", rep.sipiLHS, rep.sipiRHS, true));
    if (!trail.back().holds) fail(trail.back(), "inner-negative construction needs the sipi inequality");
    trail.push_back({"a>=0 on outer annulus", 0.0, 0.0, rep.outerNonnegative});
    if (!trail.back().holds) fail(trail.back(), "weight is negative on the outer annulus");

    const RadialProfile prof(w, s);
    const std::size_t n = s.order.size();
    const std::size_t k = s.k;
    const int N = s.N;
    const double Rk = s.R0;
    const double am = std::max(0.0, -prof.inner_min());
    std::vector<double> I, phi;
    outer_quadratures(prof, [](double a) { return a; }, I, phi);
    const double Aint = I[k];  // ∫_{R0}^R a y^{N-1} dy

    out.gamma0 = 1.0 / (1.0 - q);
    auto gamma_of = [&](double e) { return (1.0 - e) / (1.0 - q); };
    auto C_of = [&](double e) {
        return std::pow(std::pow(Rk, 2.0 * e) / 2.0 * am / (2.0 * (gamma_of(e) - 1.0) + N) + e, 1.0 / (1.0 - e));
    };

    // ε by halving from q/2 until (b) holds; (a) is the same statement.
    double eps = q / 2.0;
    ConditionCheck b;
    for (int it = 0; it <= 60; ++it, eps *= 0.5) {
        const double C = C_of(eps);
        b = check("b", 2.0 * std::pow(C, 1.0 - eps) * rpow(Rk, N), std::pow(Rk, 2.0 * eps) * Aint, true);
        if (b.holds) break;
    }
    const double C = C_of(eps);
    const double ge = gamma_of(eps);
    const double u0R = C * Rk * Rk;
    trail.push_back(check("a", 2.0 * C * Rk, std::pow(u0R, eps) * Aint / rpow(Rk, N - 1), true));
    trail.push_back(b);
    if (!b.holds) fail(b, "no epsilon in the halving budget satisfies (b)");
    out.epsilon = eps;
    out.gammaEps = ge;
    out.Ceps = C;

    // δ by halving from 1 until (casa) holds on a fine sample of [0, R0].
    auto casa_min = [&](double d) {
        double m = std::numeric_limits<double>::infinity();
        constexpr int samples = 8192;
        for (int i = 0; i <= samples; ++i) {
            const double r = Rk * i / samples;
            const double u = C * r * r + d;
            m = std::min(m, 4.0 * C * C * r * r * (ge - 1.0) / u + 2.0 * N * C - am * std::pow(u, eps));
        }
        return m;
    };
    double delta = 1.0;
    ConditionCheck casa;
    for (int it = 0; it <= 60; ++it, delta *= 0.5) {
        casa = check("casa", 0.0, casa_min(delta), true);
        if (casa.holds) break;
    }
    trail.push_back(casa);
    if (!casa.holds) fail(casa, "no delta in the halving budget satisfies (casa)");
    out.delta = delta;

    const double uR = C * Rk * Rk + delta;
    trail.push_back(check("ad", 2.0 * C * Rk, std::pow(uR, eps) * Aint / rpow(Rk, N - 1), true));

    std::vector<double> ud(n, 0.0), zin(n, 0.0), wout(n, 0.0), vout(n, 0.0), glued(n, 0.0);
    double laaa = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= k; ++j) {
        const double r = s.radius(j);
        ud[j] = C * r * r + delta;
        zin[j] = std::pow(ud[j], ge);
        const double lap = ge * (4.0 * C * C * r * r * (ge - 1.0) * std::pow(ud[j], ge - 2.0) +
                                 2.0 * N * C * std::pow(ud[j], ge - 1.0));
        laaa = std::min(laaa, (lap - ge * am * std::pow(zin[j], q)) / std::max(lap, 1e-300));
    }
    trail.push_back(check("laaa", -1e-12, laaa, false));

    const double ratio = ge / out.gamma0;
    out.K = ratio * phi[k] + std::pow(uR, ratio);
    double ann = -std::numeric_limits<double>::infinity();
    for (std::size_t j = k; j < n; ++j) {
        wout[j] = out.K - ratio * phi[j];
        vout[j] = std::pow(wout[j], out.gamma0);
        // -Δv - γ_ε a v^q with w'' eliminated through -Δw = (γ_ε/γ_0) a
        const double wp = ratio * I[j] / rpow(s.radius(j), N - 1);
        const double excess = -out.gamma0 * (out.gamma0 - 1.0) * std::pow(wout[j], out.gamma0 - 2.0) * wp * wp;
        ann = std::max(ann, excess);
    }
    trail.push_back(check("ann", ann, 0.0, false));

    const double zp = ge * std::pow(uR, ge - 1.0) * 2.0 * C * Rk;
    const double vp = out.gamma0 * std::pow(wout[k], out.gamma0 - 1.0) * ratio * Aint / rpow(Rk, N - 1);
    trail.push_back(check("fin", zp, vp, false));

    for (std::size_t j = 0; j < n; ++j) glued[j] = j <= k ? zin[j] : vout[j];
    out.uDeltaEps = place(s, w.grid_ptr(), ud);
    out.zInner = place(s, w.grid_ptr(), zin);
    out.wOuter = place(s, w.grid_ptr(), wout);
    out.vOuter = place(s, w.grid_ptr(), vout);
    out.glued = place(s, w.grid_ptr(), glued);
    return out;
}

ResidualReport verify_weak_subsolution(const Weight& w, double q, const Field& u, const std::optional<RadialSplit>& interface,
                                       double tol)
{
    if (u.min() < 0.0) throw std::invalid_argument("verify_weak_subsolution: u must be nonnegative");
    const Field r = residual(w.values(), q, u);
    double scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) scale = std::max(scale, std::abs(w[i] * positive_power(u[i], q)));
    scale = std::max(scale, 1e-300);
    ResidualReport rep;
    rep.maxWeakResidual = r.max() / scale;
    if (interface) {
        const auto& s = *interface;
        const double inner = (u[s.order[s.k]] - u[s.order[s.k - 1]]) / s.h;
        const double outer = (u[s.order[s.k + 1]] - u[s.order[s.k]]) / s.h;
        const double ref = std::max({std::abs(inner), std::abs(outer), 1e-300});
        rep.interfaceFluxGap = std::max(0.0, inner - outer) / ref;
    }
    rep.verdict = rep.maxWeakResidual <= tol && rep.interfaceFluxGap <= tol;
    return rep;
}

}  // namespace sublin
