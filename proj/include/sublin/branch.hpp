#pragma once

#include "sublin/eigen.hpp"
#include "sublin/grid.hpp"
#include "sublin/solve.hpp"
#include "sublin/weights.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sublin {

/// exp(−∫aφ₁² log φ₁ / ∫aφ₁²). Throws SolverError if ∫aφ₁² ≤ 0 or φ₁ is
/// not positive.
double compute_tstar(const Grid& grid, const Weight& w, const EigenPair& pair);

/// μ₁^{−1/(1−q)} t* φ₁.
Field asymptotic_state(const Weight& w, const EigenPair& pair, double tstar, double q);

struct BranchPoint {
    double q = 0.0;
    Field u;
    double minU = 0.0;
    double maxU = 0.0;
    std::optional<double> gamma1;  // only when minU > 0
    PositivityClass positivity;
    double residual = 0.0;         // relative residual
};

enum class Termination { reachedQmin, positivityLost, newtonFailed };
const char* to_string(Termination t);

struct Branch {
    std::vector<BranchPoint> points;  // q strictly decreasing
    double mu1 = 0.0;
    double tstar = 0.0;
    Termination terminationReason = Termination::reachedQmin;
};

struct BranchSchedule {
    double qStart = 1.0 - 1.0 / 128.0;
    double qMin = 0.5;
    double initialStep = 1.0 / 64.0;
    double maxStep = 1.0 / 32.0;
    double minStep = 1e-4;
    std::vector<double> stops;  // q values the branch must land on exactly
};

/// Newton solve at exponent q from a guess, with the stability eigenvalue and
/// positivity class. Throws SolverError when Newton fails.
BranchPoint branch_point(const Grid& grid, const Weight& w, double q, const Field& guess, const SolveParams& params = {});

/// Continuation of the 𝒫° branch in q downward from qStart. The initial
/// exponent moves toward 1 (halving 1 − q, at most to 1 − 2⁻¹²) when the
/// first refine fails.
Branch trace_branch(const Grid& grid, const Weight& w, const BranchSchedule& schedule, const SolveParams& params = {});

/// One step of the same branch to an exponent q > 1.
BranchPoint probe_above_one(const Grid& grid, const Weight& w, const EigenPair& pair, double tstar, double q,
                            const SolveParams& params = {});

void write_branch_csv(std::ostream& out, const Branch& branch);

struct MultistartParams {
    int starts = 20;
    std::uint64_t seed = 1;
};

struct ProbeEvidence {
    double q = 0.0;
    int attempts = 0;
    int trivial = 0;
    int failed = 0;
    bool foundInterior = false;     // a 𝒫° solution
    bool foundNonInterior = false;  // a nontrivial solution outside 𝒫°
    std::vector<Positivity> distinctClasses;
    std::vector<Field> distinctSolutions;
};

struct IntervalEstimate {
    std::optional<double> qiLower;  // largest probe below qiUpper with no 𝒫° solution found
    double qiUpper = 1.0;           // smallest q with a verified 𝒫° solution
    std::vector<ProbeEvidence> evidence;
};

/// Multistart evidence at a single exponent: energy minimisation from
/// random smooth positive fields and random bumps, continuation from `seed`
/// fields when given, and monotone iteration from the maximum of distinct
/// solutions found.
ProbeEvidence probe_exponent(const Grid& grid, const Weight& w, double q, const MultistartParams& ms,
                             const std::vector<Field>& seeds = {}, const SolveParams& params = {});

IntervalEstimate estimate_interval_I(const Grid& grid, const Weight& w, const Branch& branch,
                                     const std::vector<double>& probes, const MultistartParams& ms,
                                     const SolveParams& params = {});

/// Newton from `count` random multiplicative perturbations of u; returns the
/// largest relative deviation among converged 𝒫° results, and how many converged.
struct UniquenessCheck {
    int converged = 0;
    double maxDeviation = 0.0;
};
UniquenessCheck multistart_uniqueness(const Grid& grid, const Weight& w, double q, const Field& u, int count,
                                      std::uint64_t seed, const SolveParams& params = {});

struct LSReport {
    double tstarIdentity = 0.0;       // ∫ãφ₁² log(t*φ₁)
    double tstarIdentityScale = 0.0;  // |∫ãφ₁² log φ₁|
    double phiQT = 0.0;               // ∫ãφ₁²
    double gammaSlopePredicted = 0.0; // −∫ãφ₁²
    double gammaSlopeMeasured = 0.0;
    std::vector<std::pair<double, double>> gammaSamples;  // (q, γ₁)

    bool identity_ok() const;
    bool slope_ok(double rel = 0.05) const;
};

/// Evaluates the scalar identities on the normalised weight ã = μ₁a, with
/// the γ₁ slope at q = 1 from samples at q = 0.99 and 0.97 (taken from the
/// branch when present, solved otherwise) and γ₁(1) = 0.
LSReport ls_identities(const Grid& grid, const Weight& w, const EigenPair& pair, double tstar,
                       const Branch* normalisedBranch = nullptr, const SolveParams& params = {});

struct NearZeroEntry {
    double epsilon = 0.0;
    double qEpsilon = 0.0;
    double ratio = 0.0;  // qEpsilon / epsilon
    int picardIterations = 0;
};

struct NearZeroReport {
    Field u0;
    double positivityMargin = 0.0;  // min u₀
    double S = 0.0;                 // ∫a log u₀
    double volume = 0.0;
    double predictedSlope = 0.0;    // |Ω| / S
    std::vector<NearZeroEntry> entries;
};

/// Perturbation from the q = 0 problem: u₀ = t0 + w₀ with −Δw₀ = a, and for
/// each ε the exponent q(ε) at which the reduced solvability function
/// Ψ(q) = ∫(a−ε)(t0+w_q)^q vanishes, w_q the zero-mean solution of
/// −Δw = (a−ε)(t0+w)^q − mean.
NearZeroReport near_zero_analysis(const Grid& grid, const Weight& a0weight, double t0,
                                  const std::vector<double>& epsilons);

}  // namespace sublin
