#pragma once

#include "sublin/grid.hpp"
#include "sublin/weights.hpp"

#include <string>
#include <vector>

namespace sublin {

struct SolveParams {
    int maxIterations = 20000;
    /// Residual max-norm target, relative to max|a u^q| so that solutions of
    /// very different magnitude are judged alike.
    double tolerance = 1e-10;
    /// Newton clamp; negative means 1e-12·max(guess).
    double positivityFloor = -1.0;
    std::string dampingSchedule = "halving from 1, at most 40 halvings";
};

enum class Positivity { trivial, deadCore, positiveInterior, interiorOfCone };

const char* to_string(Positivity p);

struct PositivityClass {
    Positivity cls = Positivity::trivial;
    double minValue = 0.0;
    double boundaryMin = 0.0;
    std::vector<IndexRange> zeroSet;
};

/// Two thresholds: runs below scaleTol·max(u) are candidates, and a run is
/// a dead core when its part below scaleTol²·max(u) spans at least two cells
/// and half the candidate run. Isolated touching zeros do not qualify.
PositivityClass classify_positivity(const Field& u, double scaleTol = 1e-6);

struct SubSuperPair {
    Field sub;
    Field super;
    bool orderedCheck = true;
};

/// Scaled residual max|−Δ_h u − a u^q| / max|a u^q|.
double relative_residual(const Weight& w, double q, const Field& u);

/// Zero-mean solution of −Δ_h w = rhs with Neumann closure.
Field solve_linear_neumann(const Grid& grid, const Field& rhs);

/// ū = κ(M + ψ), ψ the zero-mean solution of −Δψ = a − ā, with κ tied to M
/// so that the sign of ā dominates; M doubles until ū is a supersolution
/// with min ū ≥ floor.
Field large_supersolution(const Grid& grid, const Weight& w, double q, double floor);

/// γ^{−1/(1−q)} u0^γ with γ = (1−q0)/(1−q).
Field branch_extension_subsolution(const Field& u0, double q0, double q);

struct MonotoneTrace {
    int iterations = 0;
    int shiftDoublings = 0;
    double minIncrement = 0.0;  // min over steps of min(u_{k+1} − u_k), scaled by max(super)
};

/// Monotone iteration (K + MΛ)u_{k+1} = M(a u_k^q + Λu_k) from the
/// subsolution. Λ is chosen per node from the current iterate and doubled
/// where a step fails to increase.
Field monotone_iterate(const Grid& grid, const Weight& w, double q, const SubSuperPair& pair,
                       const SolveParams& params = {}, MonotoneTrace* trace = nullptr);

/// Same iteration on the nodes strictly inside `boundaryNode`, with
/// u = boundaryValue there. Inside means below the node unless upper is set.
/// Nodes outside the subdomain are returned as zero.
Field monotone_iterate_dirichlet(const Grid& grid, const Weight& w, double q, const SubSuperPair& pair,
                                 std::size_t boundaryNode, double boundaryValue, bool upper = false,
                                 const SolveParams& params = {}, MonotoneTrace* trace = nullptr);

/// E(u) = ½∫|∇u|² − (q+1)⁻¹∫a(u⁺)^{q+1}.
double energy(const Weight& w, double q, const Field& u);

struct MinimizeTrace {
    int iterations = 0;
    std::vector<double> energies;
};

/// Projected Newton descent on E over u ≥ 0.
Field minimize_energy(const Grid& grid, const Weight& w, double q, const Field& init, const SolveParams& params = {},
                      MinimizeTrace* trace = nullptr);

/// Damped Newton with iterates clamped at the positivity floor.
Field newton_refine(const Grid& grid, const Weight& w, double q, const Field& guess, const SolveParams& params = {});

}  // namespace sublin
