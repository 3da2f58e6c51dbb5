#include "sublin/eigen.hpp"

#include "sublin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sublin {

namespace {

constexpr double kBisectionRel = 1e-13;

SymTridiag shifted_by_weight(const SymTridiag& base, std::span<const double> a, double mu)
{
    SymTridiag t = base;
    for (std::size_t i = 0; i < t.size(); ++i) t.diag[i] -= mu * a[i];
    return t;
}

bool has_negative(const SymTridiag& base, std::span<const double> a, double mu)
{
    return count_below(shifted_by_weight(base, a, mu), 0.0) >= 1;
}

// Smallest mu > 0 where base - mu diag(a) acquires a negative eigenvalue,
// starting from a point lo known to give none.
double first_crossing(const SymTridiag& base, std::span<const double> a, double lo, const char* what)
{
    double hi = std::max(lo, 1e-300) * 2.0;
    int expansions = 0;
    while (!has_negative(base, a, hi)) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 2000 || !std::isfinite(hi)) throw SolverError(std::string(what) + ": no sign change of the lowest eigenvalue");
    }
    for (int it = 0; it < 400 && hi - lo > kBisectionRel * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (has_negative(base, a, mid) ? hi : lo) = mid;
    }
    return hi;
}

double norm2(std::span<const double> v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

const char* to_string(Stability s)
{
    switch (s) {
    case Stability::asymptoticallyStable: return "asymptoticallyStable";
    case Stability::weaklyStable: return "weaklyStable";
    case Stability::unstable: return "unstable";
    }
    return "unknown";
}

SymTridiag stiffness_matrix(const Grid& grid)
{
    const auto w = grid.face_weights();
    const std::size_t n = grid.size();
    SymTridiag k{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        k.diag[i] += w[i];
        k.diag[i + 1] += w[i];
        k.off[i] = -w[i];
    }
    return k;
}

SymTridiag symmetric_laplacian(const Grid& grid)
{
    SymTridiag k = stiffness_matrix(grid);
    const auto m = grid.cell_measures();
    for (std::size_t i = 0; i < k.size(); ++i) k.diag[i] /= m[i];
    for (std::size_t i = 0; i + 1 < k.size(); ++i) k.off[i] /= std::sqrt(m[i] * m[i + 1]);
    return k;
}

double pencil_min_eigenvalue(const Grid& grid, const Weight& w, double mu)
{
    const SymTridiag t = shifted_by_weight(symmetric_laplacian(grid), w.values().values(), mu);
    return min_eigenvalue(t, 1e-14 * t.norm_bound());
}

EigenPair principal_indefinite_eigen(const Grid& grid, const Weight& w)
{
    if (w.size() != grid.size()) throw std::invalid_argument("principal_indefinite_eigen: grid mismatch");
    const HypothesisReport hyp = check_hypotheses(w);
    if (!hyp.changesSign) throw ConditionError("H0", hyp.integral, 0.0, "weight does not change sign");
    if (!(hyp.integral < 0.0)) throw ConditionError("H0", hyp.integral, 0.0, "integral of the weight is not negative");

    const SymTridiag base = symmetric_laplacian(grid);
    const auto a = w.values().values();
    const auto m = grid.cell_measures();

    // λ_min grows like -μ∫a/|Ω| near 0, so a point below the first crossing
    // is found by halving until no negative eigenvalue is reported.
    double lo = 1.0 / std::max(w.values().max(), 1e-300);
    while (has_negative(base, a, lo)) {
        lo *= 0.5;
        if (lo < 1e-200) throw SolverError("principal_indefinite_eigen: bracket search failed near mu = 0");
    }
    const double mu = first_crossing(base, a, lo, "principal_indefinite_eigen");

    EigenEstimate est = lowest_eigenpair(shifted_by_weight(base, a, mu));
    std::vector<double> phi(grid.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = est.vector[i] / std::sqrt(m[i]);
    double nrm = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) nrm += m[i] * phi[i] * phi[i];
    nrm = std::sqrt(nrm);
    for (double& x : phi) x /= nrm;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (!(phi[i] > 0.0))
            throw SolverError("principal_indefinite_eigen: eigenfunction not positive at node " + std::to_string(i));

    double weighted = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) weighted += m[i] * a[i] * phi[i] * phi[i];
    EigenPair out;
    out.eigenvalue = dirichlet_energy(grid, phi) / weighted;

    std::vector<double> v(phi.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = phi[i] * std::sqrt(m[i]);
    const auto tv = shifted_by_weight(base, a, out.eigenvalue).apply(v);
    out.residualNorm = norm2(tv);
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) s += m[i] * phi[i] * phi[i];
    out.normalizationCheck = s;
    out.eigenfunction = Field(w.grid_ptr(), std::move(phi));
    return out;
}

StabilityResult linearized_eigen(const Grid& grid, const Weight& w, double q, const Field& u)
{
    if (!(q > 0.0)) throw std::invalid_argument("linearized_eigen: q must be positive");
    if (u.size() != grid.size() || w.size() != grid.size()) throw std::invalid_argument("linearized_eigen: grid mismatch");
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!(u[i] > 0.0))
            throw std::invalid_argument("linearized_eigen: u is not positive at node " + std::to_string(i) +
                                        " (x = " + std::to_string(grid.coordinate(i)) + ")");

    SymTridiag t = symmetric_laplacian(grid);
    for (std::size_t i = 0; i < t.size(); ++i) t.diag[i] -= q * w[i] * (q == 1.0 ? 1.0 : std::pow(u[i], q - 1.0));
    EigenEstimate est = lowest_eigenpair(t);

    const auto m = grid.cell_measures();
    std::vector<double> phi(grid.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = est.vector[i] / std::sqrt(m[i]);

    StabilityResult out;
    out.gamma1 = est.value;
    out.eigenfunction = Field(u.grid_ptr(), std::move(phi));
    if (out.gamma1 > kStabilityTolerance)
        out.classification = Stability::asymptoticallyStable;
    else if (std::abs(out.gamma1) <= kStabilityTolerance)
        out.classification = Stability::weaklyStable;
    else
        out.classification = Stability::unstable;
    return out;
}

EigenPair mixed_eigen(const Grid& grid, const Weight& wplus, const Collar& collar)
{
    if (wplus.size() != grid.size()) throw std::invalid_argument("mixed_eigen: grid mismatch");
    const bool upper = grid.is_ball() || collar.upper;
    const std::size_t n = grid.size();
    const std::size_t d = grid.nearest_node(collar.edge);
    if ((upper && d + 2 > n) || (!upper && d < 1) || (grid.is_ball() && d == 0 && collar.edge <= 0.0))
        throw std::invalid_argument("mixed_eigen: collar edge leaves no interior nodes");

    std::vector<std::size_t> nodes;
    if (upper)
        for (std::size_t i = d + 1; i < n; ++i) nodes.push_back(i);
    else
        for (std::size_t i = 0; i < d; ++i) nodes.push_back(i);

    const SymTridiag full = symmetric_laplacian(grid);
    const std::size_t c = nodes.size();
    SymTridiag base{std::vector<double>(c), std::vector<double>(c > 0 ? c - 1 : 0)};
    std::vector<double> ap(c);
    for (std::size_t j = 0; j < c; ++j) {
        base.diag[j] = full.diag[nodes[j]];
        if (j + 1 < c) base.off[j] = full.off[std::min(nodes[j], nodes[j + 1])];
        ap[j] = std::max(wplus[nodes[j]], 0.0);
    }
    const double apmax = *std::max_element(ap.begin(), ap.end());
    if (!(apmax > 0.0)) throw ConditionError("mixep", 0.0, 0.0, "a+ vanishes on the collar");

    // λ_min(A - σ a⁺) ≥ λ_min(A) - σ max a⁺, so this σ is still below σ₁.
    const double lo = 0.5 * min_eigenvalue(base, 1e-14 * base.norm_bound()) / apmax;
    const double sigma = first_crossing(base, ap, lo, "mixed_eigen");

    EigenEstimate est = lowest_eigenpair(shifted_by_weight(base, ap, sigma));
    const auto m = grid.cell_measures();
    std::vector<double> psi(n, 0.0);
    double weighted = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        psi[nodes[j]] = est.vector[j] / std::sqrt(m[nodes[j]]);
        weighted += ap[j] * est.vector[j] * est.vector[j];
        if (!(psi[nodes[j]] > 0.0))
            throw SolverError("mixed_eigen: eigenfunction not positive at node " + std::to_string(nodes[j]));
    }
    const auto bv = base.apply(est.vector);
    const double energy = std::inner_product(est.vector.begin(), est.vector.end(), bv.begin(), 0.0);

    EigenPair out;
    out.eigenvalue = energy / weighted;
    out.residualNorm = norm2(shifted_by_weight(base, ap, out.eigenvalue).apply(est.vector));
    out.normalizationCheck = norm2(est.vector) * norm2(est.vector);
    out.eigenfunction = Field(wplus.grid_ptr(), std::move(psi));
    return out;
}

}  // namespace sublin
