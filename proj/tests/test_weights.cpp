#include "sublin/weights.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sublin;
constexpr double pi = std::numbers::pi;

namespace {

// Composite Simpson, independent of the grid quadrature.
template <class F>
double simpson(F f, double a, double b, int n = 20000)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST(Corpus, RemarkQ0AtOneHalf)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 513));
    const Weight w = make_weight(g, CorpusCase{"remark-q0", {{"q", 0.5}}});
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double c = std::cos(g->coordinate(i));
        EXPECT_NEAR(w[i], 2.0 - 8.0 * c * c, 1e-13);
    }
    EXPECT_TRUE(w.has_closed_form());
    EXPECT_NEAR(w.evaluate(pi / 3.0), 0.0, 1e-13);
    EXPECT_THROW(make_weight(g, CorpusCase{"remark-q0", {{"q", 1.2}}}), std::invalid_argument);
    EXPECT_THROW(make_weight(g, CorpusCase{"no-such-case", {}}), std::invalid_argument);
    const CorpusCase missing{"remark-q0", {}};
    EXPECT_THROW(missing.param("q"), std::invalid_argument);
}

TEST(Corpus, CubicMatchingPolynomial)
{
    const auto p = ti_cubic_polynomial(0.5);
    ASSERT_EQ(p.coefficients.size(), 4u);
    EXPECT_NEAR(p.coefficients[0], -20.0 / 3.0, 1e-13);
    EXPECT_NEAR(p.coefficients[1], 26.0, 1e-13);
    EXPECT_NEAR(p.coefficients[2], -24.0, 1e-13);
    EXPECT_NEAR(p.coefficients[3], 26.0 / 3.0, 1e-13);
    // f(x) = (x+1)⁴/4 on the inner interval: f(1) = 4, f'(1) = 8, f''(1) = 12
    EXPECT_NEAR(p.value(1.0), 4.0, 1e-12);
    EXPECT_NEAR(p.derivative(1.0), 8.0, 1e-12);
    EXPECT_NEAR(p.second_derivative(1.0), 12.0, 1e-12);
    EXPECT_NEAR(p.derivative(2.0), 0.0, 1e-12);
    EXPECT_NEAR(p.value(2.0), 34.0 / 3.0, 1e-12);
}

TEST(Corpus, CubicWeightValues)
{
    const auto g = build_grid(GridSpec::interval(-2.0, 2.0, 2049));
    const Weight w = make_weight(g, CorpusCase{"ti-cubic", {{"q", 0.5}}});
    EXPECT_NEAR(w[g->nearest_node(0.0)], -6.0, 1e-12);
    EXPECT_NEAR(w[g->size() - 1], 28.0 / std::sqrt(34.0 / 3.0), 1e-10);
    EXPECT_NEAR(w[0], w[g->size() - 1], 1e-12);
    const std::size_t one = g->nearest_node(1.0);
    EXPECT_NEAR(w.limit_at(one, -1), w.limit_at(one, +1), 1e-8);
}

TEST(Corpus, QuarticFamilyPicksAdmissibleK)
{
    const auto g = build_grid(GridSpec::interval(-2.0, 2.0, 1025));
    const double q = 0.25;
    const double K = select_quartic_K(g, q);
    EXPECT_GE(K, 1.0);
    const Weight w = make_weight(g, CorpusCase{"ti-quartic", {{"q", q}}});
    const auto h = check_hypotheses(w);
    EXPECT_TRUE(h.changesSign);
    EXPECT_LT(h.integral, 0.0);
    const auto p = ti_quartic_polynomial(q, K);
    EXPECT_NEAR(p.value(2.0), K, 1e-9 * K);
    EXPECT_NEAR(p.derivative(2.0), 0.0, 1e-9 * K);
}

TEST(Corpus, RemI01Integral)
{
    const auto g = build_grid(GridSpec::ball(1.0, 1, 1025));
    const Weight w = make_weight(g, CorpusCase{"rem-I01", {{"sigma", 0.9}}});
    EXPECT_NEAR(integrate(w.values()), 0.9 - 1.0, 1e-12);
    const auto g3 = build_grid(GridSpec::ball(1.0, 3, 513));
    const Weight w3 = make_weight(g3, CorpusCase{"rem-I01", {{"sigma", 0.9}}});
    const double inner = 4.0 * pi / 3.0 / 8.0;
    EXPECT_NEAR(integrate(w3.values()), 0.9 * (4.0 * pi / 3.0 - inner) - inner, 1e-10);
}

TEST(Weight, ScaledKeepsClosedForm)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 65));
    const Weight w = make_weight(g, CorpusCase{"cosine", {{"amplitude", 2.0}, {"shift", 0.5}}});
    const Weight s = w.scaled(3.0);
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_DOUBLE_EQ(s[i], 3.0 * w[i]);
    EXPECT_NEAR(s.evaluate(0.0), 3.0 * 1.5, 1e-14);
}

TEST(Weight, OtherDefinitions)
{
    const auto g = build_grid(GridSpec::interval(0.0, 4.0, 401));
    PiecewiseConstant pc;
    pc.regions = {{0.0, 1.3, 2.0}, {1.3, 4.0, -1.0}};
    const Weight w = make_weight(g, WeightDefinition{pc});
    EXPECT_NEAR(integrate(w.values()), 2.0 * 1.3 - 2.7, 1e-12);  // cell averages make this exact

    const Field b1 = sample(g, [](double x) { return x > 2.0 ? 1.0 : 0.0; });
    const Field b2 = sample(g, [](double x) { return x < 2.0 ? x : 0.0; });
    const Weight d = make_weight(g, WeightDefinition{DeltaFamily{b1, b2, 5.0}});
    EXPECT_DOUBLE_EQ(d[g->nearest_node(1.0)], -5.0);

    const auto other = build_grid(GridSpec::interval(0.0, 4.0, 21));
    EXPECT_THROW(make_weight(g, WeightDefinition{Sampled{Field(other, 1.0)}}), std::invalid_argument);
    EXPECT_THROW(make_weight(g, WeightDefinition{DeltaFamily{Field(g, -1.0), b2, 1.0}}), std::invalid_argument);
}

TEST(Hypotheses, RemarkQ0)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 2048));
    const auto h = check_hypotheses(make_weight(g, CorpusCase{"remark-q0", {{"q", 0.5}}}));
    EXPECT_NEAR(h.integral, -2 * pi, 1e-6);
    EXPECT_TRUE(h.changesSign);
    EXPECT_TRUE(h.H0);
    ASSERT_EQ(h.positiveComponents.size(), 1u);
    EXPECT_NEAR(g->coordinate(h.positiveComponents[0].first), pi / 3, 2 * g->spacing());
    EXPECT_NEAR(g->coordinate(h.positiveComponents[0].last), 2 * pi / 3, 2 * g->spacing());
}

TEST(Hypotheses, NoSignChangeFailsH0)
{
    const auto g = build_grid(GridSpec::interval(0.0, 1.0, 33));
    const auto h = check_hypotheses(make_weight(g, CorpusCase{"constant", {{"value", -1.0}}}));
    EXPECT_FALSE(h.changesSign);
    EXPECT_FALSE(h.H0);
}

TEST(Hypotheses, CubicHasTwoPositiveComponents)
{
    const auto g = build_grid(GridSpec::interval(-2.0, 2.0, 1025));
    const auto h = check_hypotheses(make_weight(g, CorpusCase{"ti-cubic", {{"q", 0.5}}}));
    EXPECT_TRUE(h.H0);
    ASSERT_EQ(h.positiveComponents.size(), 2u);
    EXPECT_GT(g->coordinate(h.positiveComponents[1].first), 1.0);
    EXPECT_LT(g->coordinate(h.positiveComponents[0].last), -1.0);
}

TEST(RadialConditions, RemarkQ0Threshold)
{
    // ∫a⁺ over (0, π) by independent quadrature
    const double apos = simpson([](double x) { return std::max(2.0 - 8.0 * std::cos(x) * std::cos(x), 0.0); }, 0.0, pi);
    EXPECT_NEAR(apos, 2.0 * std::sqrt(3.0) - 2.0 * pi / 3.0, 1e-8);
    const double threshold = 2 * pi / (2 * apos + 2 * pi);
    EXPECT_NEAR(threshold, 0.69638, 1e-5);

    const auto g = build_grid(GridSpec::ball(pi / 2, 1, 1537));
    const Weight w = make_weight(g, CorpusCase{"remark-q0", {{"q", 0.5}}});
    const auto lo = check_radial_conditions(w, 0.5, pi / 6);
    const auto hi = check_radial_conditions(w, 0.75, pi / 6);
    EXPECT_NEAR(lo.cqThreshold, threshold, 1e-5);
    EXPECT_FALSE(lo.infernoHolds);
    EXPECT_TRUE(hi.infernoHolds);
    EXPECT_TRUE(hi.innerNonnegative);
    EXPECT_TRUE(hi.outerNonpositive);
    EXPECT_TRUE(hi.monotoneOuterOK);
}

TEST(RadialConditions, RemI01)
{
    const auto g = build_grid(GridSpec::ball(1.0, 1, 1025));
    const Weight w = make_weight(g, CorpusCase{"rem-I01", {{"sigma", 0.9}}});
    const auto r = check_radial_conditions(w, 0.5, 0.5);
    EXPECT_NEAR(r.K, 0.9, 1e-12);
    ASSERT_TRUE(r.KNinterval.has_value());
    EXPECT_NEAR(r.KNinterval->first, 0.1 / 1.9, 1e-12);
    EXPECT_EQ(r.KNinterval->second, 1.0);
    EXPECT_NEAR(r.sipiLHS, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.sipiRHS, 0.9, 1e-12);
    EXPECT_TRUE(r.sipiHolds);
}

TEST(Exact, RemarkQ0)
{
    const auto g = build_grid(GridSpec::interval(0.0, pi, 1024));
    const auto ex = corpus_exact(CorpusCase{"remark-q0", {{"q", 0.5}}}, g);
    ASSERT_EQ(ex.solutions.size(), 1u);
    for (std::size_t i = 0; i < g->size(); i += 97)
        EXPECT_NEAR(ex.solutions[0][i], std::pow(std::sin(g->coordinate(i)), 4) / 4.0, 1e-15);
    EXPECT_LE(residual(ex.weight.values(), 0.5, ex.solutions[0]).max_abs(), 1e-4);
}

TEST(Exact, CubicPair)
{
    const auto g = build_grid(GridSpec::interval(-2.0, 2.0, 2049));
    const auto ex = corpus_exact(CorpusCase{"ti-cubic", {{"q", 0.5}}}, g);
    ASSERT_EQ(ex.solutions.size(), 2u);
    const Field& u1 = ex.solutions[0];
    const Field& u2 = ex.solutions[1];
    EXPECT_EQ(u1[g->nearest_node(-1.5)], 0.0);
    EXPECT_NEAR(u1[g->nearest_node(0.0)], 0.25, 1e-14);
    EXPECT_NEAR(u1[g->size() - 1], 34.0 / 3.0, 1e-12);
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_DOUBLE_EQ(u2[i], u1[g->size() - 1 - i]);
    ASSERT_TRUE(ex.subsolution.has_value());
    EXPECT_DOUBLE_EQ((*ex.subsolution)[3], std::max(u1[3], u2[3]));

    // C² across x = ±1: one-sided second differences agree to O(h)
    const double h = g->spacing();
    for (double x : {-1.0, 1.0}) {
        const std::size_t k = g->nearest_node(x);
        const double left = (u1[k] - 2 * u1[k - 1] + u1[k - 2]) / (h * h);
        const double right = (u1[k + 2] - 2 * u1[k + 1] + u1[k]) / (h * h);
        EXPECT_NEAR(left, right, 50 * h) << "x = " << x;
    }
    EXPECT_THROW(corpus_exact(CorpusCase{"cosine", {}}, g), std::invalid_argument);
}
