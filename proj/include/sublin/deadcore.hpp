#pragma once

#include "sublin/grid.hpp"
#include "sublin/solve.hpp"
#include "sublin/weights.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace sublin {

/// Closed interval [lo, hi] in the grid coordinate (radius for a ball).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Barrier z₁ = A(r − 1/2)^α on the unit ball, zero for r ≤ 1/2.
struct BarrierSpec {
    double A = 0.0;
    double alpha = 0.0;
    Field profile;
    double c2LHS = 0.0;  // A
    double c2RHS = 0.0;  // (δa₀/(α(α−1)+(N−1)α))^{1/(1−q)}
    bool c2Holds = false;
    double secondDifferenceJump = 0.0;  // |left − right| one-sided second differences at r = 1/2
};

/// grid must be a ball of radius 1. deltaA0 is the product δ·a₀ entering (c2).
BarrierSpec barrier_profile(const GridPtr& grid, double q, double A, double deltaA0);

/// Scalar form of the barrier window: 2^α ε ≤ (δa₀/(α(α−1)+(N−1)α))^{1/(1−q)}.
bool barrier_window_nonempty(double q, int N, double deltaA0, double eps);

/// d_δ = 2 (C (ᾱ(ᾱ−1)+(N−1)ᾱ)/(δ a₀))^{1/2} with ᾱ = 2/(1−q).
double deadcore_threshold(double q, int N, double a0, double delta, double C);

/// Interior dead cores of u ≥ 0, using the two-threshold rule of
/// classify_positivity. Returned intervals are the parts below scaleTol²·max u.
std::vector<Interval> measure_deadcore(const Field& u, double scaleTol = 1e-6);

struct DeadCoreReport {
    double delta = 0.0;
    double q = 0.0;
    Field u;
    Positivity positivity = Positivity::trivial;
    std::vector<Interval> measuredZeroSet;
    std::vector<Interval> predictedCore;
    double dDelta = 0.0;
    double a0 = 0.0;
    double uniformBound = 0.0;  // C
    double maxU = 0.0;
    bool boundHolds = false;    // max u < C
    bool windowOK = false;      // barrier window at ε = C d_δ^{−α}
    double coreDistance = 0.0;  // distance from the measured core to ∂G; NaN if no core
    bool containmentOK = false;
};

/// Solves P_{b₁−δb₂, q} for every δ and q ∈ {q̄/2, q̄} by energy
/// minimisation, predicts the dead core from d_δ on G_{σ/2} and compares.
/// Reports are ordered by q, then by δ.
std::vector<DeadCoreReport> verify_deadcore_formation(const GridPtr& grid, const Field& b1, const Field& b2, double sigma,
                                                      double qbar, const std::vector<double>& deltas,
                                                      const SolveParams& params = {});

/// Smallest δ (per q) whose measured core is nonempty.
std::optional<double> empirical_deadcore_onset(const std::vector<DeadCoreReport>& reports, double q);

/// Least-squares slope of log(coreDistance) against log δ over the reports at q.
double core_distance_slope(const std::vector<DeadCoreReport>& reports, double q);

void write_sweep_csv(std::ostream& out, const std::vector<DeadCoreReport>& reports);

struct BoundaryPositivityReport {
    double sigma1 = 0.0;
    double epsilon = 0.0;  // min over collars of the largest ε with εψ₁ ≤ u
    std::vector<double> boundaryValues;
    bool positive = false;
};

/// Collars of width `collarWidth` at each boundary point of Ω (both ends of
/// an interval, the outer sphere of a ball).
BoundaryPositivityReport boundary_positivity_check(const Grid& grid, const Weight& w, double collarWidth, double q,
                                                   const Field& u);

}  // namespace sublin
