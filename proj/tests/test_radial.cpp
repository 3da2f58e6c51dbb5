#include "sublin/errors.hpp"
#include "sublin/radial.hpp"
#include "sublin/solve.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sublin;

namespace {

constexpr double pi = std::numbers::pi;

// The half interval (π/2, π) seen as a one-dimensional ball; 1537 nodes put
// R0 = π/6 on a node.
Weight half_interval_weight()
{
    return make_weight(build_grid(GridSpec::ball(pi / 2.0, 1, 1537)), CorpusCase{"remark-q0", {{"q", 0.5}}});
}

}  // namespace

TEST(InnerPositive, GluedFieldIsAWeakSubsolution)
{
    const Weight w = half_interval_weight();
    const double q = 0.75;
    const CCConstruction cc = build_cc(w, q, pi / 6.0);
    EXPECT_NEAR(cc.R0, pi / 6.0, 1e-12);
    EXPECT_DOUBLE_EQ(cc.gamma, 4.0);
    EXPECT_DOUBLE_EQ(cc.C, 0.25 / 1.75);
    EXPECT_TRUE(cc.fluxCheck.ok);
    for (const auto& c : cc.conditionTrail) EXPECT_TRUE(c.holds) << c.name;
    EXPECT_GE(cc.glued.min(), 0.0);
    EXPECT_GT(cc.glued.max(), 0.0);
    const ResidualReport r = verify_weak_subsolution(w.scaled(cc.gamma), q, cc.glued, cc.split);
    EXPECT_TRUE(r.verdict) << "weak residual " << r.maxWeakResidual << ", flux gap " << r.interfaceFluxGap;
}

TEST(InnerPositive, GluedFieldIsContinuousAtTheInterface)
{
    const Weight w = half_interval_weight();
    const CCConstruction cc = build_cc(w, 0.75, pi / 6.0);
    const std::size_t k = cc.split.order[cc.split.k];
    EXPECT_DOUBLE_EQ(cc.v[k], cc.z[k]);
    EXPECT_DOUBLE_EQ(cc.glued[k], cc.z[k]);
}

TEST(InnerPositive, FailsNamedInequalityBelowThreshold)
{
    const Weight w = half_interval_weight();
    try {
        build_cc(w, 0.5, pi / 6.0);
        FAIL() << "expected ConditionError";
    } catch (const ConditionError& e) {
        EXPECT_EQ(e.name(), "inferno");
        EXPECT_GT(e.lhs(), e.rhs());
    }
}

TEST(InnerNegative, TrailHoldsAndGluedFieldIsASubsolution)
{
    const auto g = build_grid(GridSpec::ball(1.0, 1, 1025));
    const Weight w = make_weight(g, CorpusCase{"rem-I01", {{"sigma", 0.9}}});
    const Rad2Construction r = build_rad2(w, 0.5, 0.5);
    EXPECT_TRUE(r.all_hold());
    EXPECT_FALSE(r.conditionTrail.empty());
    EXPECT_GT(r.epsilon, 0.0);
    EXPECT_GT(r.glued.max(), 0.0);
    const ResidualReport rep = verify_weak_subsolution(w.scaled(r.gammaEps), 0.5, r.glued, r.split);
    EXPECT_TRUE(rep.verdict) << rep.maxWeakResidual;
}

TEST(Verify, ExactSolutionPassesAndSupersolutionFails)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 1025));
    const ExactCase ex = corpus_exact(CorpusCase{"remark-q0", {{"q", 0.5}}}, g);
    EXPECT_TRUE(verify_weak_subsolution(ex.weight, ex.q, ex.solutions.front()).verdict);

    const Field super = large_supersolution(*g, ex.weight, ex.q, 1.0);
    EXPECT_FALSE(verify_weak_subsolution(ex.weight, ex.q, super).verdict);
}

TEST(Verify, RejectsNegativeFields)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 65));
    const Weight w = make_weight(g, CorpusCase{"constant", {{"value", -1.0}}});
    EXPECT_THROW(verify_weak_subsolution(w, 0.5, Field(g, -1.0)), std::invalid_argument);
}

TEST(Rescale, MapsSolutionsBetweenScaledWeights)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 513));
    const ExactCase ex = corpus_exact(CorpusCase{"remark-q0", {{"q", 0.5}}}, g);
    const Field& u = ex.solutions.front();
    for (double c : {0.3, 5.0}) {
        const Field v = rescale_solution(u, c, ex.q);
        EXPECT_NEAR(v.max(), std::pow(c, 2.0) * u.max(), 1e-12 * v.max());
        EXPECT_NEAR(relative_residual(ex.weight.scaled(c), ex.q, v), relative_residual(ex.weight, ex.q, u), 1e-9);
    }
}
