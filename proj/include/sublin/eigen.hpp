#pragma once

#include "sublin/grid.hpp"
#include "sublin/tridiag.hpp"
#include "sublin/weights.hpp"

namespace sublin {

struct EigenPair {
    double eigenvalue = 0.0;
    Field eigenfunction;          // ∫φ² = 1, positive
    double residualNorm = 0.0;    // ‖M^{-1/2}(Kφ - λ M a φ)‖₂
    double normalizationCheck = 0.0;
};

enum class Stability { asymptoticallyStable, weaklyStable, unstable };

const char* to_string(Stability s);

struct StabilityResult {
    double gamma1 = 0.0;
    Field eigenfunction;
    Stability classification = Stability::unstable;
};

/// Stiffness matrix K of the Neumann operator, so that -Δ_h = M⁻¹K.
SymTridiag stiffness_matrix(const Grid& grid);
/// M^{-1/2} K M^{-1/2}.
SymTridiag symmetric_laplacian(const Grid& grid);

/// λ_min(M^{-1/2}KM^{-1/2} - μ diag(a)).
double pencil_min_eigenvalue(const Grid& grid, const Weight& w, double mu);

/// First positive eigenvalue of -Δφ = μ a φ with Neumann conditions.
/// Throws ConditionError("H0", ...) unless a changes sign with ∫a < 0.
EigenPair principal_indefinite_eigen(const Grid& grid, const Weight& w);

inline constexpr double kStabilityTolerance = 1e-9;

/// Lowest eigenvalue of -Δ_h - q a u^{q-1}.
StabilityResult linearized_eigen(const Grid& grid, const Weight& w, double q, const Field& u);

/// Collar adjacent to the outer boundary: all nodes beyond `edge` toward
/// the boundary selected by `upper` (always the upper end for a ball).
struct Collar {
    double edge = 0.0;
    bool upper = true;
};

/// Principal pair of -Δψ = σ a⁺ ψ on the collar, ψ = 0 at the edge and
/// Neumann at ∂Ω. The returned field vanishes off the open collar.
EigenPair mixed_eigen(const Grid& grid, const Weight& wplus, const Collar& collar);

}  // namespace sublin
