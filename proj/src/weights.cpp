#include "sublin/weights.hpp"


#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sublin {

namespace {

constexpr double kPi = std::numbers::pi;

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

double r_of_q(double q) { return 2.0 / (1.0 - q); }

// Maps a grid coordinate to the corpus variable x. Interval grids use the
// coordinate directly; 1D ball grids are the even half-domain reduction
// about `centre`.
std::function<double(double)> corpus_coordinate(const Grid& grid, double lo, double hi, const std::string& name)
{
    const double centre = 0.5 * (lo + hi);
    if (!grid.is_ball()) {
        if (!near(grid.left(), lo) || !near(grid.right(), hi)) {
            std::ostringstream msg;
            msg << "corpus case " << name << " lives on (" << lo << ", " << hi << "), grid is (" << grid.left() << ", "
                << grid.right() << ")";
            throw std::invalid_argument(msg.str());
        }
        return [](double x) { return x; };
    }
    if (grid.dimension() != 1 || !near(grid.right(), hi - centre))
        throw std::invalid_argument("corpus case " + name + " needs an interval grid or a 1D ball of radius " +
                                    std::to_string(hi - centre));
    return [centre](double r) { return centre + r; };
}

double tiny_offset(const Grid& g) { return 1e-9 * g.spacing(); }

}  // namespace

double CorpusCase::param(const std::string& key) const
{
    auto it = parameters.find(key);
    if (it == parameters.end()) throw std::invalid_argument("corpus case " + name + " requires parameter '" + key + "'");
    return it->second;
}

double CorpusCase::param_or(const std::string& key, double fallback) const
{
    auto it = parameters.find(key);
    return it == parameters.end() ? fallback : it->second;
}

bool CorpusCase::analytic_solution_available() const
{
    return name == "remark-q0" || name == "ti-cubic" || name == "ti-quartic";
}

Weight::Weight(WeightDefinition definition, Field values, std::function<double(double)> closed_form)
    : definition_(std::move(definition)), values_(std::move(values)), closed_form_(std::move(closed_form))
{
}

std::string Weight::label() const
{
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CorpusCase>)
                return d.name;
            else if constexpr (std::is_same_v<T, PiecewiseConstant>)
                return "piecewise-constant";
            else if constexpr (std::is_same_v<T, Sampled>)
                return "sampled";
            else
                return "delta-family";
        },
        definition_);
}

double Weight::limit_at(std::size_t i, int side) const
{
    if (!closed_form_) return values_[i];
    const auto& g = grid();
    double x = g.coordinate(i) + side * tiny_offset(g);
    x = std::clamp(x, g.left(), g.right());
    return closed_form_(x);
}

double Weight::evaluate(double x) const
{
    if (!closed_form_) throw std::logic_error("weight " + label() + " has no closed form");
    return closed_form_(x);
}

Weight Weight::scaled(double c) const
{
    std::vector<double> v(values_.values().begin(), values_.values().end());
    for (double& x : v) x *= c;
    std::function<double(double)> cf;
    if (closed_form_) cf = [f = closed_form_, c](double x) { return c * f(x); };
    WeightDefinition def = definition_;
    if (auto* dc = std::get_if<CorpusCase>(&def)) dc->parameters["scale"] = dc->param_or("scale", 1.0) * c;
    return Weight(std::move(def), Field(values_.grid_ptr(), std::move(v)), std::move(cf));
}

double MatchingPolynomial::value(double x) const
{
    double s = 0.0;
    for (double c : coefficients) s = s * x + c;
    return s;
}

double MatchingPolynomial::derivative(double x) const
{
    const std::size_t deg = coefficients.size() - 1;
    double s = 0.0;
    for (std::size_t k = 0; k < deg; ++k) s = s * x + coefficients[k] * static_cast<double>(deg - k);
    return s;
}

double MatchingPolynomial::second_derivative(double x) const
{
    const std::size_t deg = coefficients.size() - 1;
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < deg; ++k)
        s = s * x + coefficients[k] * static_cast<double>((deg - k) * (deg - k - 1));
    return s;
}

MatchingPolynomial ti_cubic_polynomial(double q)
{
    if (!(q >= 1.0 / 3.0 - 1e-15 && q < 1.0)) throw std::invalid_argument("ti-cubic needs q in [1/3, 1)");
    const double r = r_of_q(q);
    const double p2 = std::pow(2.0, r);
    const double alpha = -p2 / 4.0 * (r + 1.0) / 3.0;
    const double beta = p2 / 8.0 * (3.0 * r + 1.0);
    const double gamma = -p2 / 2.0 * (r - 1.0);
    const double delta = p2 / 8.0 / 3.0 * (24.0 / r + 5.0 * r - 13.0);
    return MatchingPolynomial{{alpha, beta, gamma, delta}, 0.0};
}

MatchingPolynomial ti_quartic_polynomial(double q, double K)
{
    if (!(q > 0.0 && q < 1.0 / 3.0)) throw std::invalid_argument("ti-quartic needs q in (0, 1/3)");
    if (!(K > 0.0)) throw std::invalid_argument("ti-quartic needs K > 0");
    const double r = r_of_q(q);
    const double e = std::pow(2.0, r) / r - K;
    const double t = std::pow(2.0, r - 3.0);
    const double alpha = 3.0 * e + t * (r + 7.0);
    const double beta = -16.0 * e + t * (-6.0 * r - 38.0);
    const double gamma = 30.0 * e + t * (13.0 * r + 71.0);
    const double delta = -24.0 * e - t * (12.0 * r + 52.0);
    const double mu = 8.0 * std::pow(2.0, r) / r - 7.0 * K + t * (4.0 * r + 12.0);
    return MatchingPolynomial{{alpha, beta, gamma, delta, mu}, K};
}

namespace {

// Even weight on (-2, 2): constant -(r-1) r^q on |x| ≤ 1 and -p''/p^q beyond.
std::function<double(double)> ti_weight_function(double q, MatchingPolynomial p)
{
    const double r = r_of_q(q);
    const double inner = -(r - 1.0) * std::pow(r, q);
    return [=](double x) {
        const double s = std::abs(x);
        if (s <= 1.0) return inner;
        return -p.second_derivative(s) / std::pow(p.value(s), q);
    };
}

double quartic_integral_ok(const GridPtr& grid, double q, double K, bool& changes_sign)
{
    const auto p = ti_quartic_polynomial(q, K);
    const auto f = ti_weight_function(q, p);
    changes_sign = f(1.0 + 1e-9) < 0.0 && f(2.0) > 0.0;
    for (double x = 1.0; x <= 2.0; x += 1.0 / 256)
        if (p.value(x) <= 0.0) changes_sign = false;
    const auto map = corpus_coordinate(*grid, -2.0, 2.0, "ti-quartic");
    const Field a = sample(grid, [&](double x) { return f(map(x)); });
    return integrate(a);
}

Field sample_piecewise(const GridPtr& grid, const PiecewiseConstant& pc)
{
    // Control-volume averages, so Σ a_i |cell_i| is the exact integral.
    const Grid& g = *grid;
    const int N = g.dimension();
    const double omega = g.surface_factor();
    auto measure = [&](double lo, double hi) {
        if (hi <= lo) return 0.0;
        if (!g.is_ball()) return hi - lo;
        return omega / N * (std::pow(hi, N) - std::pow(lo, N));
    };
    std::vector<double> v(g.size());
    const double h = g.spacing();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double clo = std::max(g.left(), g.coordinate(i) - 0.5 * h);
        const double chi = std::min(g.right(), g.coordinate(i) + 0.5 * h);
        const double total = measure(clo, chi);
        double covered = 0.0;
        double acc = 0.0;
        for (const auto& reg : pc.regions) {
            const double m = measure(std::max(clo, reg.lo), std::min(chi, reg.hi));
            covered += m;
            acc += m * reg.value;
        }
        acc += std::max(0.0, total - covered) * pc.outside;
        v[i] = acc / total;
    }
    return Field(grid, std::move(v));
}

std::function<double(double)> piecewise_function(const PiecewiseConstant& pc, double right_end)
{
    return [pc, right_end](double x) {
        for (const auto& reg : pc.regions)
            if ((x >= reg.lo && x < reg.hi) || (x == right_end && reg.hi == right_end)) return reg.value;
        return pc.outside;
    };
}

}  // namespace

double select_quartic_K(const GridPtr& grid, double q)
{
    for (int k = 0; k <= 60; ++k) {
        const double K = std::ldexp(1.0, k);
        bool changes = false;
        const double integral = quartic_integral_ok(grid, q, K, changes);
        if (changes && integral < 0.0) return K;
    }
    throw std::runtime_error("ti-quartic: no K in [1, 2^60] makes a_K sign-changing with negative integral");
}

Weight make_weight(const GridPtr& grid, const CorpusCase& c)
{
    const Grid& g = *grid;
    std::function<double(double)> f;
    if (c.name == "remark-q0") {
        const double q = c.param("q");
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("remark-q0 needs q in (0, 1)");
        const double r = r_of_q(q);
        const double amp = std::pow(r, 1.0 - 2.0 / r);
        const auto map = corpus_coordinate(g, 0.0, kPi, c.name);
        f = [=](double s) {
            const double cx = std::cos(map(s));
            return amp * (1.0 - r * cx * cx);
        };
    } else if (c.name == "ti-cubic") {
        const double q = c.param("q");
        const auto map = corpus_coordinate(g, -2.0, 2.0, c.name);
        f = [map, w = ti_weight_function(q, ti_cubic_polynomial(q))](double s) { return w(map(s)); };
    } else if (c.name == "ti-quartic") {
        const double q = c.param("q");
        const double K = c.parameters.contains("K") ? c.param("K") : select_quartic_K(grid, q);
        const auto map = corpus_coordinate(g, -2.0, 2.0, c.name);
        f = [map, w = ti_weight_function(q, ti_quartic_polynomial(q, K))](double s) { return w(map(s)); };
        CorpusCase with_k = c;
        with_k.parameters["K"] = K;
        const double scale = c.param_or("scale", 1.0);
        auto scaled = [f, scale](double x) { return scale * f(x); };
        return Weight(with_k, sample(grid, scaled), scaled);
    } else if (c.name == "rem-I01") {
        const double sigma = c.param("sigma");
        if (!(sigma > 0.0)) throw std::invalid_argument("rem-I01 needs sigma > 0");
        double R = g.is_ball() ? g.right() : 0.5 * (g.right() - g.left());
        const double R0 = c.param_or("R0", 0.5 * R);
        if (!(R0 > 0.0 && R0 < R)) throw std::invalid_argument("rem-I01 needs 0 < R0 < R");
        PiecewiseConstant pc;
        if (g.is_ball()) {
            pc.regions = {{0.0, R0, -1.0}, {R0, R, 0.0}};
            pc.regions[1].value = sigma;
            // |x| = R0 belongs to neither open set
            pc.outside = 0.0;
            f = [=](double r) { return r < R0 ? -1.0 : (r > R0 ? sigma : 0.0); };
        } else {
            const double c0 = 0.5 * (g.left() + g.right());
            pc.regions = {{g.left(), c0 - R0, sigma}, {c0 - R0, c0 + R0, -1.0}, {c0 + R0, g.right(), sigma}};
            f = [=](double x) {
                const double s = std::abs(x - c0);
                return s < R0 ? -1.0 : (s > R0 ? sigma : 0.0);
            };
        }
        Field v = sample_piecewise(grid, pc);
        const double scale = c.param_or("scale", 1.0);
        auto vals = std::vector<double>(v.values().begin(), v.values().end());
        for (double& x : vals) x *= scale;
        return Weight(c, Field(grid, std::move(vals)), [f, scale](double x) { return scale * f(x); });
    } else if (c.name == "constant") {
        const double value = c.param("value");
        f = [value](double) { return value; };
    } else if (c.name == "cosine") {
        const double amplitude = c.param_or("amplitude", 1.0);
        const double shift = c.param_or("shift", 0.0);
        f = [=](double x) { return amplitude * std::cos(x) - shift; };
    } else {
        throw std::invalid_argument("unknown corpus case '" + c.name + "'");
    }
    const double scale = c.param_or("scale", 1.0);
    auto scaled = [f, scale](double x) { return scale * f(x); };
    return Weight(c, sample(grid, scaled), scaled);
}

Weight make_weight(const GridPtr& grid, const WeightDefinition& definition)
{
    return std::visit(
        [&](const auto& d) -> Weight {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CorpusCase>) {
                return make_weight(grid, d);
            } else if constexpr (std::is_same_v<T, PiecewiseConstant>) {
                return Weight(d, sample_piecewise(grid, d), piecewise_function(d, grid->right()));
            } else if constexpr (std::is_same_v<T, Sampled>) {
                if (d.values.size() != grid->size()) throw std::invalid_argument("sampled weight: grid mismatch");
                return Weight(d, Field(grid, std::vector<double>(d.values.values().begin(), d.values.values().end())));
            } else {
                if (d.b1.size() != grid->size() || d.b2.size() != grid->size())
                    throw std::invalid_argument("delta family: grid mismatch");
                if (d.b1.min() < 0.0 || d.b2.min() < 0.0)
                    throw std::invalid_argument("delta family needs b1, b2 >= 0");
                std::vector<double> v(grid->size());
                for (std::size_t i = 0; i < v.size(); ++i) v[i] = d.b1[i] - d.delta * d.b2[i];
                return Weight(d, Field(grid, std::move(v)));
            }
        },
        definition);
}

HypothesisReport check_hypotheses(const Weight& w)
{
    HypothesisReport rep;
    rep.integral = integrate(w.values());
    const double tol = 1e-12 * w.values().max_abs();
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        pos = pos || w[i] > tol;
        neg = neg || w[i] < -tol;
    }
    rep.changesSign = pos && neg;
    rep.H0 = rep.changesSign && rep.integral < 0.0;

    const bool mirrored = w.grid().is_ball() && w.grid().dimension() == 1;
    for (std::size_t i = 0; i < w.size();) {
        if (w[i] > tol) {
            std::size_t j = i;
            while (j + 1 < w.size() && w[j + 1] > tol) ++j;
            rep.positiveComponents.push_back({i, j});
            rep.componentCount += (mirrored && i > 0) ? 2 : 1;
            i = j + 1;
        } else {
            ++i;
        }
    }
    rep.H1 = rep.componentCount >= 1;
    rep.H1prime = rep.componentCount == 1;
    return rep;
}

RadialSplit radial_split(const Grid& grid, double R0, Orientation side)
{
    RadialSplit s;
    const std::size_t n = grid.size();
    s.h = grid.spacing();
    s.order.resize(n);
    if (grid.is_ball()) {
        if (!(R0 > 0.0 && R0 < grid.right())) throw std::invalid_argument("R0 must lie in (0, R)");
        for (std::size_t i = 0; i < n; ++i) s.order[i] = i;
        s.k = grid.nearest_node(R0);
        s.omega = grid.surface_factor();
        s.N = grid.dimension();
    } else {
        if (!(R0 > grid.left() && R0 < grid.right())) throw std::invalid_argument("split point must lie inside the interval");
        const std::size_t node = grid.nearest_node(R0);
        for (std::size_t i = 0; i < n; ++i) s.order[i] = side == Orientation::InnerIsLower ? i : n - 1 - i;
        s.k = side == Orientation::InnerIsLower ? node : n - 1 - node;
        s.reversed = side == Orientation::InnerIsUpper;
        s.omega = 1.0;
        s.N = 1;
    }
    if (s.k == 0 || s.k + 1 >= n) throw std::invalid_argument("R0 must lie strictly between the centre and the boundary");
    s.R0 = s.h * static_cast<double>(s.k);
    s.R = s.h * static_cast<double>(n - 1);
    return s;
}

RadialProfile::RadialProfile(const Weight& w, const RadialSplit& split) : split_(split)
{
    const Grid& g = w.grid();
    values_.resize(split_.order.size());
    for (std::size_t j = 0; j < values_.size(); ++j) {
        const std::size_t i = split_.order[j];
        values_[j] = w.has_closed_form() ? w.evaluate(g.coordinate(i)) : w[i];
    }
    // end nodes take the interior limit so a jump at the edge is not sampled
    if (w.has_closed_form()) {
        values_.front() = w.limit_at(split_.order.front(), -split_.inward());
        values_.back() = w.limit_at(split_.order.back(), split_.inward());
    }
    const std::size_t node = split_.order[split_.k];
    innerLimit_ = w.limit_at(node, split_.inward());
    outerLimit_ = w.limit_at(node, -split_.inward());
}

double RadialProfile::at(std::size_t j, bool inner) const
{
    if (j == split_.k) return inner ? innerLimit_ : outerLimit_;
    return values_[j];
}

double RadialProfile::inner_min() const
{
    double m = innerLimit_;
    for (std::size_t j = 0; j < split_.k; ++j) m = std::min(m, values_[j]);
    return m;
}

double RadialProfile::outer_min() const
{
    double m = outerLimit_;
    for (std::size_t j = split_.k + 1; j < values_.size(); ++j) m = std::min(m, values_[j]);
    return m;
}

double RadialProfile::outer_max() const
{
    double m = outerLimit_;
    for (std::size_t j = split_.k + 1; j < values_.size(); ++j) m = std::max(m, values_[j]);
    return m;
}

double RadialProfile::outer_max_slope() const
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = split_.k; j + 1 < values_.size(); ++j) m = std::max(m, (at(j + 1, false) - at(j, false)) / split_.h);
    return m;
}

ConditionReport check_radial_conditions(const Weight& w, double q, double R0, Orientation side)
{
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("radial conditions need q in (0, 1)");
    const RadialSplit s = radial_split(w.grid(), R0, side);
    const RadialProfile a(w, s);

    ConditionReport rep;
    rep.q = q;
    rep.R0 = s.R0;
    auto pos = [](double x) { return std::max(x, 0.0); };
    auto neg = [](double x) { return std::max(-x, 0.0); };
    auto absf = [](double x) { return std::abs(x); };
    auto id = [](double x) { return x; };

    const double inner_plus = a.inner_integral(pos);
    const double outer_minus = a.outer_integral(neg);
    const double total = a.inner_integral(id) + a.outer_integral(id);
    const double total_abs = a.inner_integral(absf) + a.outer_integral(absf);
    rep.cqThreshold = total_abs > 0.0 ? -total / total_abs : 0.0;
    rep.infernoLHS = (1.0 - q) / (1.0 + q) * outer_minus;
    rep.infernoRHS = inner_plus;
    rep.infernoHolds = rep.infernoLHS <= rep.infernoRHS;

    const double scale = w.values().max_abs();
    const double sign_tol = 1e-10 * scale;
    rep.innerNonnegative = a.inner_min() >= -sign_tol;
    rep.outerNonpositive = a.outer_max() <= sign_tol;
    rep.outerNonnegative = a.outer_min() >= -sign_tol;
    rep.monotoneOuterOK = a.outer_max_slope() <= 1e-8;

    const double inner_neg_sup = std::max(0.0, -a.inner_min());
    const double ball_factor = s.omega * std::pow(s.R0, s.N);
    rep.sipiLHS = (1.0 - q) / (2.0 * q + s.N * (1.0 - q)) * ball_factor * inner_neg_sup;
    rep.sipiRHS = a.outer_integral(pos);
    rep.sipiHolds = rep.sipiLHS < rep.sipiRHS;

    const double outer_total = a.outer_integral(id);
    if (inner_neg_sup > 0.0) {
        rep.K = outer_total / (ball_factor * inner_neg_sup);
        const double KN = rep.K * s.N;
        if (rep.K > 0.0 && KN < 1.0) rep.KNinterval = std::make_pair((1.0 - KN) / (1.0 - KN + 2.0 * rep.K), 1.0);
    } else {
        rep.K = std::numeric_limits<double>::infinity();
    }
    return rep;
}

ExactCase corpus_exact(const CorpusCase& c, const GridPtr& grid)
{
    if (!c.analytic_solution_available()) throw std::invalid_argument("corpus case " + c.name + " has no analytic solution");
    Weight w = make_weight(grid, c);
    const double q = c.param("q");
    const double r = r_of_q(q);
    if (c.name == "remark-q0") {
        const auto map = corpus_coordinate(*grid, 0.0, kPi, c.name);
        Field u = sample(grid, [&](double s) { return std::pow(std::sin(map(s)), r) / r; });
        return ExactCase{std::move(w), q, {std::move(u)}, std::nullopt};
    }
    const auto& def = std::get<CorpusCase>(w.definition());
    const MatchingPolynomial p = c.name == "ti-cubic" ? ti_cubic_polynomial(q) : ti_quartic_polynomial(q, def.param("K"));
    const auto map = corpus_coordinate(*grid, -2.0, 2.0, c.name);
    auto u1f = [p, r](double x) {
        if (x <= -1.0) return 0.0;
        if (x <= 1.0) return std::pow(x + 1.0, r) / r;
        return p.value(x);
    };
    Field u1 = sample(grid, [&](double s) { return u1f(map(s)); });
    Field u2 = sample(grid, [&](double s) { return u1f(-map(s)); });
    std::vector<double> m(grid->size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(u1[i], u2[i]);
    return ExactCase{std::move(w), q, {std::move(u1), std::move(u2)}, Field(grid, std::move(m))};
}

}  // namespace sublin
