#include "oracle.hpp"

#include "sublin/deadcore.hpp"
#include "sublin/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace sublin;

namespace {

struct Sweep {
    GridPtr grid;
    std::vector<DeadCoreReport> reports;
};

// One sweep shared by the tests below; it is the expensive part.
const Sweep& sweep()
{
    static const Sweep s = [] {
        auto g = build_grid(GridSpec::interval(-1.0, 1.0, 2049));
        const Field b1 = sample(g, [](double x) { return std::abs(x) > 0.5 ? 1.0 : 0.0; });
        const Field b2 = sample(g, [](double x) { return std::max(0.25 - x * x, 0.0); });
        return Sweep{g, verify_deadcore_formation(g, b1, b2, 0.2, 0.5, {10.0, 40.0, 160.0})};
    }();
    return s;
}

const DeadCoreReport& report(double q, double delta)
{
    for (const auto& r : sweep().reports)
        if (r.q == q && r.delta == delta) return r;
    throw std::out_of_range("no such report");
}

}  // namespace

TEST(Barrier, ProfileValueAndWindow)
{
    const auto g = build_grid(GridSpec::ball(1.0, 1, 1025));
    // q = 1/2 gives α = 4; δa₀ = 12 makes the (c2) bound exactly 1
    const BarrierSpec b = barrier_profile(g, 0.5, 1.0, 12.0);
    EXPECT_DOUBLE_EQ(b.alpha, 4.0);
    EXPECT_NEAR(b.profile[g->size() - 1], 1.0 / 16.0, 1e-14);
    EXPECT_EQ(b.profile[0], 0.0);
    EXPECT_NEAR(b.c2RHS, 1.0, 1e-14);
    EXPECT_TRUE(b.c2Holds);
    EXPECT_FALSE(barrier_profile(g, 0.5, 1.5, 12.0).c2Holds);
    // one-sided second differences of A s⁴ differ by O(h²) at the junction
    EXPECT_LT(b.secondDifferenceJump, 20.0 * g->spacing() * g->spacing());

    EXPECT_TRUE(barrier_window_nonempty(0.5, 1, 12.0, 1.0 / 16.0));
    EXPECT_FALSE(barrier_window_nonempty(0.5, 1, 12.0, 0.07));
}

TEST(Threshold, UnitExampleAndScalings)
{
    // ᾱ = 4, N = 1: d = 2 (12 C / (δ a₀))^{1/2}
    EXPECT_NEAR(deadcore_threshold(0.5, 1, 1.0, 48.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(deadcore_threshold(0.5, 1, 1.0, 4.0 * 48.0, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(deadcore_threshold(0.5, 1, 1.0, 48.0, 4.0), 2.0, 1e-15);
    EXPECT_NEAR(deadcore_threshold(0.5, 1, 2.0, 48.0, 1.0), std::sqrt(0.5), 1e-15);
    // N = 3 adds (N-1)ᾱ = 8: 2 (20/48)^{1/2}
    EXPECT_NEAR(deadcore_threshold(0.5, 3, 1.0, 48.0, 1.0), 2.0 * std::sqrt(20.0 / 48.0), 1e-15);
}

TEST(Measure, FlatZeroIntervalAndPositiveField)
{
    const auto g = build_grid(GridSpec::interval(0.0, 4.0, 401));
    const Field u = sample(g, [](double x) { return std::pow(std::max(std::abs(x - 2.0) - 0.5, 0.0), 4); });
    const auto cores = measure_deadcore(u);
    ASSERT_EQ(cores.size(), 1u);
    EXPECT_NEAR(cores[0].lo, 1.5, 0.05);
    EXPECT_NEAR(cores[0].hi, 2.5, 0.05);
    EXPECT_TRUE(measure_deadcore(Field(g, 1.0)).empty());
    EXPECT_TRUE(measure_deadcore(sample(g, [](double x) { return std::sin(std::numbers::pi * x / 4.0); })).empty());
}

TEST(Sweep, CoreEdgesAgreeWithShootingOracle)
{
    const double h = sweep().grid->spacing();
    for (double q : {0.25, 0.5}) {
        for (double delta : {40.0, 160.0}) {
            const auto edge = oracle::core_edge(delta, q);
            ASSERT_TRUE(edge.has_value()) << "q = " << q << ", delta = " << delta;
            const DeadCoreReport& r = report(q, delta);
            ASSERT_EQ(r.measuredZeroSet.size(), 1u);
            EXPECT_NEAR(r.measuredZeroSet[0].hi, *edge, 3.0 * h);
            EXPECT_NEAR(r.measuredZeroSet[0].lo, -*edge, 3.0 * h);
            EXPECT_EQ(r.positivity, Positivity::deadCore);
        }
    }
}

// At δ = 10 the boundary flux has no sign change over any core width, so no
// solution with a dead core exists and the sweep must not report one.
TEST(Sweep, NoCoreAtSmallDelta)
{
    for (double q : {0.25, 0.5}) {
        EXPECT_FALSE(oracle::core_edge(10.0, q).has_value());
        EXPECT_TRUE(report(q, 10.0).measuredZeroSet.empty());
        EXPECT_FALSE(empirical_deadcore_onset(sweep().reports, q).value_or(0.0) <= 10.0);
    }
}

TEST(Sweep, BoundAndContainment)
{
    for (const auto& r : sweep().reports) {
        EXPECT_TRUE(r.boundHolds) << r.maxU << " vs " << r.uniformBound;
        EXPECT_TRUE(r.containmentOK) << "q = " << r.q << ", delta = " << r.delta;
        EXPECT_GT(r.dDelta, 0.0);
    }
    EXPECT_EQ(empirical_deadcore_onset(sweep().reports, 0.5), 40.0);
}

TEST(Sweep, CoreDistanceSlopeNearMinusOneHalf)
{
    for (double q : {0.25, 0.5}) EXPECT_NEAR(core_distance_slope(sweep().reports, q), -0.5, 0.15);
}

TEST(Sweep, CsvHeaderAndRows)
{
    std::ostringstream out;
    write_sweep_csv(out, sweep().reports);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "delta,q,dDelta,coreLeft,coreRight,containmentOK");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 6);
}

TEST(BoundaryPositivity, PositiveCollarsOnDeadCoreSolution)
{
    const DeadCoreReport& r = report(0.5, 40.0);
    const Grid& g = *sweep().grid;
    const Weight w = make_weight(sweep().grid, CorpusCase{"constant", {{"value", 1.0}}});
    const BoundaryPositivityReport bp = boundary_positivity_check(g, w, 0.4, 0.5, r.u);
    EXPECT_TRUE(bp.positive);
    EXPECT_GT(bp.epsilon, 0.0);
    EXPECT_EQ(bp.boundaryValues.size(), 2u);
    // constant a⁺ = 1 on a collar of width 0.4
    const double pi = std::numbers::pi;
    EXPECT_NEAR(bp.sigma1, std::pow(pi / 0.8, 2), 0.01 * std::pow(pi / 0.8, 2));
}

TEST(BoundaryPositivity, CollarOutsidePositiveSetIsAConditionError)
{
    const auto g = build_grid(GridSpec::interval(0.0, std::numbers::pi, 513));
    const ExactCase ex = corpus_exact(CorpusCase{"remark-q0", {{"q", 0.5}}}, g);
    try {
        boundary_positivity_check(*g, ex.weight, 0.1, 0.5, ex.solutions.front());
        FAIL() << "expected ConditionError";
    } catch (const ConditionError& e) {
        EXPECT_EQ(e.name(), "collar");
    }
}
