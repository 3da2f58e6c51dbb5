#pragma once

#include "sublin/grid.hpp"
#include "sublin/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sublin {

/// One named inequality LHS ≤ RHS (or < for strict ones) with its verdict.
struct ConditionCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct FluxCheck {
    double vPrime = 0.0;
    double zPrime = 0.0;
    bool ok = false;
};

/// Subsolution for a⁺ concentrated in the inner ball. All fields live on the
/// full grid and are zero where undefined; `glued` is a subsolution of
/// (P_{γa,q}).
struct CCConstruction {
    double q = 0.0;
    double R0 = 0.0;
    double C = 0.0;
    double gamma = 0.0;
    RadialSplit split;
    Field phi;
    Field z;
    Field v;
    Field glued;
    FluxCheck fluxCheck;
    std::vector<ConditionCheck> conditionTrail;
};

/// Subsolution for a⁻ concentrated in the inner ball; `glued` is a
/// subsolution of (P_{γ_ε a,q}).
struct Rad2Construction {
    double q = 0.0;
    double R0 = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double gammaEps = 0.0;
    double gamma0 = 0.0;
    double Ceps = 0.0;
    double K = 0.0;
    RadialSplit split;
    Field uDeltaEps;
    Field zInner;
    Field wOuter;
    Field vOuter;
    Field glued;
    std::vector<ConditionCheck> conditionTrail;

    bool all_hold() const;
};

CCConstruction build_cc(const Weight& w, double q, double R0, Orientation side = Orientation::InnerIsLower);
Rad2Construction build_rad2(const Weight& w, double q, double R0, Orientation side = Orientation::InnerIsLower);

/// c^{1/(1−q)} u: maps a (sub)solution for weight a to one for c·a.
Field rescale_solution(const Field& u, double c, double q);

struct ResidualReport {
    double maxWeakResidual = 0.0;  // max over hat tests of (∫∇u∇η − ∫a u^q η)/∫η, relative to max|a u^q|
    double interfaceFluxGap = 0.0; // (inner slope − outer slope)⁺ at the interface, relative
    bool verdict = false;
};

/// Tests u against every nodal hat function η ≥ 0. With lumped mass the
/// weak residual for η_i divided by ∫η_i is the nodal residual.
ResidualReport verify_weak_subsolution(const Weight& w, double q, const Field& u,
                                       const std::optional<RadialSplit>& interface = std::nullopt,
                                       double tol = 1e-4);

}  // namespace sublin
