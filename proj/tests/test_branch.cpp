#include "sublin/branch.hpp"
#include "sublin/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace sublin;

namespace {

constexpr double pi = std::numbers::pi;

struct Setup {
    GridPtr grid;
    Weight w;
    EigenPair pair;
    double tstar;
};

const Setup& setup()
{
    static const Setup s = [] {
        auto g = build_grid(GridSpec::interval(0.0, pi, 513));
        Weight w = make_weight(g, CorpusCase{"remark-q0", {{"q", 0.5}}});
        EigenPair p = principal_indefinite_eigen(*g, w);
        const double t = compute_tstar(*g, w, p);
        return Setup{g, std::move(w), std::move(p), t};
    }();
    return s;
}

const Branch& branch()
{
    static const Branch b = [] {
        BranchSchedule sch;
        sch.qMin = 0.75;
        sch.stops = {0.99, 0.95, 0.9, 0.8};
        return trace_branch(*setup().grid, setup().w, sch);
    }();
    return b;
}

const BranchPoint* point_at(double q)
{
    for (const auto& p : branch().points)
        if (p.q == q) return &p;
    return nullptr;
}

}  // namespace

TEST(Tstar, ConstantEigenfunctionGivesReciprocal)
{
    const auto& s = setup();
    EigenPair p;
    p.eigenvalue = 1.0;
    p.eigenfunction = Field(s.grid, 2.5);
    // ∫a φ² ≠ 0 is all that matters here; use a positive weight
    const Weight one = make_weight(s.grid, CorpusCase{"constant", {{"value", 1.0}}});
    EXPECT_NEAR(compute_tstar(*s.grid, one, p), 0.4, 1e-14);
    const Weight minus = make_weight(s.grid, CorpusCase{"constant", {{"value", -1.0}}});
    EXPECT_THROW(compute_tstar(*s.grid, minus, p), SolverError);
}

TEST(Tstar, AsymptoticStateFormula)
{
    const auto& s = setup();
    const double q = 0.9;
    const Field v = asymptotic_state(s.w, s.pair, s.tstar, q);
    const double f = std::pow(s.pair.eigenvalue, -1.0 / (1.0 - q)) * s.tstar;
    for (std::size_t i = 0; i < v.size(); i += 31) EXPECT_NEAR(v[i], f * s.pair.eigenfunction[i], 1e-14 * v.max());
}

TEST(Branch, LandsOnStopsWithStablePositivePoints)
{
    const Branch& b = branch();
    EXPECT_EQ(b.terminationReason, Termination::reachedQmin);
    for (double q : {0.99, 0.95, 0.9, 0.8}) EXPECT_NE(point_at(q), nullptr) << q;
    for (std::size_t k = 1; k < b.points.size(); ++k) EXPECT_LT(b.points[k].q, b.points[k - 1].q);
    for (const auto& p : b.points) {
        EXPECT_EQ(p.positivity.cls, Positivity::interiorOfCone) << "q = " << p.q;
        ASSERT_TRUE(p.gamma1.has_value());
        EXPECT_GT(*p.gamma1, 0.0);
        EXPECT_LT(p.residual, 1e-8);
    }
}

TEST(Branch, ApproachesScaledEigenfunctionAsQTendsToOne)
{
    const auto& s = setup();
    double previous = std::numeric_limits<double>::infinity();
    for (double q : {0.9, 0.95, 0.99}) {
        const BranchPoint* p = point_at(q);
        ASSERT_NE(p, nullptr);
        const Field v = asymptotic_state(s.w, s.pair, s.tstar, q);
        double gap = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) gap = std::max(gap, std::abs(p->u[i] - v[i]) / v.max());
        EXPECT_LT(gap, previous) << "q = " << q;
        previous = gap;
    }
    EXPECT_LT(previous, 0.05);
}

TEST(Branch, CsvHeaderAndRowCount)
{
    std::ostringstream out;
    write_branch_csv(out, branch());
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "q,minU,maxU,gamma1,positivityClass,residual");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, branch().points.size());
}

TEST(Branch, ProbeAboveOneIsUnstable)
{
    const auto& s = setup();
    const BranchPoint p = probe_above_one(*s.grid, s.w, s.pair, s.tstar, 1.0 + 1.0 / 128.0);
    ASSERT_TRUE(p.gamma1.has_value());
    EXPECT_LT(*p.gamma1, 0.0);
    EXPECT_GT(p.minU, 0.0);
}

TEST(Identities, HoldOnNormalisedWeight)
{
    const auto& s = setup();
    const LSReport ls = ls_identities(*s.grid, s.w, s.pair, s.tstar);
    EXPECT_TRUE(ls.identity_ok()) << ls.tstarIdentity << " / " << ls.tstarIdentityScale;
    EXPECT_GT(ls.phiQT, 0.0);
    EXPECT_DOUBLE_EQ(ls.gammaSlopePredicted, -ls.phiQT);
    EXPECT_TRUE(ls.slope_ok(0.05)) << ls.gammaSlopeMeasured << " vs " << ls.gammaSlopePredicted;

    const LSReport wrong = ls_identities(*s.grid, s.w, s.pair, 1.0 / s.tstar);
    EXPECT_FALSE(wrong.identity_ok());
}

TEST(Uniqueness, PerturbationsReturnToTheBranch)
{
    const auto& s = setup();
    const BranchPoint* p = point_at(0.9);
    ASSERT_NE(p, nullptr);
    const UniquenessCheck u = multistart_uniqueness(*s.grid, s.w, 0.9, p->u, 5, 3);
    EXPECT_EQ(u.converged, 5);
    EXPECT_LT(u.maxDeviation, 1e-6);
}

TEST(Multistart, NoInteriorSolutionAtOneHalf)
{
    const auto& s = setup();
    MultistartParams ms;
    ms.starts = 6;
    ms.seed = 11;
    const ProbeEvidence e = probe_exponent(*s.grid, s.w, 0.5, ms);
    EXPECT_EQ(e.attempts, 6);
    EXPECT_FALSE(e.foundInterior);
}

TEST(NearZero, LogIntegralAndSlope)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 1025));
    const Weight a0 = make_weight(g, CorpusCase{"cosine", {{"amplitude", 1.0}, {"shift", 0.0}}});
    const NearZeroReport r = near_zero_analysis(*g, a0, 2.0, {1e-4});
    // u₀ = 2 + cos x, S = ∫cos x log(2 + cos x) = π(2 − √3)
    for (std::size_t i = 0; i < g->size(); i += 64) EXPECT_NEAR(r.u0[i], 2.0 + std::cos(g->coordinate(i)), 1e-5);
    EXPECT_NEAR(r.S, pi * (2.0 - std::sqrt(3.0)), 1e-5);
    EXPECT_NEAR(r.positivityMargin, 1.0, 1e-5);
    EXPECT_NEAR(r.predictedSlope, 2.0 + std::sqrt(3.0), 1e-4);
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_NEAR(r.entries[0].ratio, 2.0 + std::sqrt(3.0), 0.1 * (2.0 + std::sqrt(3.0)));
}
