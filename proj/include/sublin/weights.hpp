#pragma once

#include "sublin/grid.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sublin {

/// Named closed-form weight from the corpus together with its parameters.
///
/// Known names:
///   remark-q0   a = r^{1-2/r}(1 - r cos²x) on (0, π), r = 2/(1-q), param q
///   ti-cubic    even C⁰ weight on (-2, 2) built from a cubic, param q ∈ [1/3, 1)
///   ti-quartic  as ti-cubic with a quartic p_K, params q ∈ (0, 1/3), optional K
///   rem-I01     σ χ_{R0<|x|<R} - χ_{|x|<R0} on a ball, params sigma, optional R0
///   constant    a ≡ value
///   cosine      a = amplitude·cos x - shift
struct CorpusCase {
    std::string name;
    std::map<std::string, double> parameters;

    double param(const std::string& key) const;
    double param_or(const std::string& key, double fallback) const;
    bool analytic_solution_available() const;
};

struct PiecewiseRegion {
    double lo = 0.0;  // half-open [lo, hi) in the grid coordinate
    double hi = 0.0;
    double value = 0.0;
};

struct PiecewiseConstant {
    std::vector<PiecewiseRegion> regions;
    double outside = 0.0;
};

struct Sampled {
    Field values;
};

/// a_δ = b₁ - δ b₂ with b₁, b₂ ≥ 0.
struct DeltaFamily {
    Field b1;
    Field b2;
    double delta = 0.0;
};

using WeightDefinition = std::variant<CorpusCase, PiecewiseConstant, Sampled, DeltaFamily>;

/// The coefficient a(x) realised on a grid.
class Weight {
public:
    Weight(WeightDefinition definition, Field values, std::function<double(double)> closed_form = {});

    const WeightDefinition& definition() const { return definition_; }
    const Field& values() const { return values_; }
    const Grid& grid() const { return values_.grid(); }
    const GridPtr& grid_ptr() const { return values_.grid_ptr(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    std::string label() const;

    /// One-sided limit of a at node i; falls back to the nodal sample when
    /// no closed form is known.
    double limit_at(std::size_t i, int side) const;
    bool has_closed_form() const { return static_cast<bool>(closed_form_); }
    double evaluate(double x) const;

    /// c·a, keeping the closed form.
    Weight scaled(double c) const;

private:
    WeightDefinition definition_;
    Field values_;
    std::function<double(double)> closed_form_;
};

Weight make_weight(const GridPtr& grid, const CorpusCase& corpus);
Weight make_weight(const GridPtr& grid, const WeightDefinition& definition);

/// Cubic (q ≥ 1/3) or quartic (q < 1/3) matching polynomial on [1, 2].
struct MatchingPolynomial {
    std::vector<double> coefficients;  // highest degree first
    double K = 0.0;                    // p(2) for the quartic family

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;
};

/// Coefficients (α, β, γ, δ) of the cubic p for r = 2/(1-q).
MatchingPolynomial ti_cubic_polynomial(double q);
/// Coefficients (α, β, γ, δ, μ) of the quartic p_K.
MatchingPolynomial ti_quartic_polynomial(double q, double K);
/// Smallest K on the ladder 2^k (k = 0..60) for which a_K changes sign in
/// (1, 2) and ∫_{-2}^{2} a_K < 0 on the given grid.
double select_quartic_K(const GridPtr& grid, double q);

struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive
};

struct HypothesisReport {
    double integral = 0.0;
    bool changesSign = false;
    bool H0 = false;
    std::vector<IndexRange> positiveComponents;
    std::size_t componentCount = 0;  // counts mirrored pieces for 1D radial grids
    bool H1 = false;
    bool H1prime = false;
    bool Hplus = true;  // automatic for 1D and radial geometry
};

HypothesisReport check_hypotheses(const Weight& w);

/// Which end of an interval plays the ball when the radial checks are
/// applied to a split interval (x0, μ) ∪ (μ, x1).
enum class Orientation { InnerIsLower, InnerIsUpper };

struct ConditionReport {
    double q = 0.0;
    double R0 = 0.0;
    double cqThreshold = 0.0;
    double infernoLHS = 0.0;
    double infernoRHS = 0.0;
    bool infernoHolds = false;
    bool monotoneOuterOK = false;
    bool innerNonnegative = false;  // a ≥ 0 on the inner region
    bool outerNonpositive = false;  // a ≤ 0 on the outer region
    bool outerNonnegative = false;  // a ≥ 0 on the outer region
    double sipiLHS = 0.0;
    double sipiRHS = 0.0;
    bool sipiHolds = false;
    double K = 0.0;
    std::optional<std::pair<double, double>> KNinterval;
};

/// Nodes ordered from the centre outward, with the split node k at radius
/// R0 = k h. For a ball the centre is r = 0; for an interval it is the end
/// selected by the orientation and R0 is given as the split coordinate.
struct RadialSplit {
    std::vector<std::size_t> order;  // order[j] is the grid node at radius j h
    std::size_t k = 0;
    double h = 0.0;
    double R0 = 0.0;
    double R = 0.0;
    double omega = 1.0;     // ω_{N-1}, or 1 for a one-sided interval split
    int N = 1;
    bool reversed = false;  // inner region is the upper end of an interval

    double radius(std::size_t j) const { return h * static_cast<double>(j); }
    double density(double r) const { return N == 1 ? omega : omega * std::pow(r, N - 1); }
    /// Grid-coordinate side (-1 or +1) pointing toward the centre.
    int inward() const { return reversed ? 1 : -1; }
};

RadialSplit radial_split(const Grid& grid, double R0, Orientation side);

/// Weight values along a radial split. The split node carries two values,
/// the inner and outer one-sided limits.
class RadialProfile {
public:
    RadialProfile(const Weight& w, const RadialSplit& split);

    const RadialSplit& split() const { return split_; }
    /// a at position j, using the inner limit at the split when inner is set.
    double at(std::size_t j, bool inner) const;

    template <class F>
    double inner_integral(F&& f) const
    {
        return trapezoid(0, split_.k, true, f);
    }
    template <class F>
    double outer_integral(F&& f) const
    {
        return trapezoid(split_.k, values_.size() - 1, false, f);
    }

    double inner_min() const;
    double outer_min() const;
    double outer_max() const;
    double outer_max_slope() const;

private:
    template <class F>
    double trapezoid(std::size_t j0, std::size_t j1, bool inner, F& f) const
    {
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) {
            const double wgt = (j == j0 || j == j1) ? 0.5 : 1.0;
            s += wgt * f(at(j, inner)) * split_.density(split_.radius(j));
        }
        return s * split_.h;
    }

    RadialSplit split_;
    std::vector<double> values_;
    double innerLimit_ = 0.0;
    double outerLimit_ = 0.0;
};

ConditionReport check_radial_conditions(const Weight& w, double q, double R0,
                                        Orientation side = Orientation::InnerIsLower);

struct ExactCase {
    Weight weight;
    double q = 0.0;
    std::vector<Field> solutions;       // remark-q0: {u}; ti-*: {u1, u2}
    std::optional<Field> subsolution;   // ti-*: max(u1, u2)
};

/// Weight plus its closed-form solutions; throws for cases without one.
ExactCase corpus_exact(const CorpusCase& corpus, const GridPtr& grid);

}  // namespace sublin
