#include "sublin/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sublin {

GridSpec GridSpec::interval(double x0, double x1, std::size_t nodes)
{
    GridSpec s;
    s.kind = GridKind::Interval;
    s.x0 = x0;
    s.x1 = x1;
    s.nodes = nodes;
    return s;
}

GridSpec GridSpec::ball(double radius, int dimension, std::size_t nodes)
{
    GridSpec s;
    s.kind = GridKind::Ball;
    s.radius = radius;
    s.dimension = dimension;
    s.nodes = nodes;
    return s;
}

void GridSpec::validate() const
{
    if (nodes < 16) throw std::invalid_argument("grid needs at least 16 nodes, got " + std::to_string(nodes));
    if (kind == GridKind::Interval) {
        if (!(std::isfinite(x0) && std::isfinite(x1) && x0 < x1))
            throw std::invalid_argument("interval grid requires finite x0 < x1");
    } else {
        if (!(std::isfinite(radius) && radius > 0.0)) throw std::invalid_argument("ball grid requires R > 0");
        if (dimension < 1) throw std::invalid_argument("ball grid requires N >= 1");
    }
}

double unit_sphere_area(int dimension)
{
    // ω_{N-1} = 2 π^{N/2} / Γ(N/2)
    const double n = dimension;
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

Grid::Grid(const GridSpec& spec) : spec_(spec)
{
    spec_.validate();
    const std::size_t n = spec_.nodes;
    const double lo = is_ball() ? 0.0 : spec_.x0;
    const double hi = is_ball() ? spec_.radius : spec_.x1;
    spacing_ = (hi - lo) / static_cast<double>(n - 1);
    coordinates_.resize(n);
    for (std::size_t i = 0; i < n; ++i) coordinates_[i] = lo + spacing_ * static_cast<double>(i);
    coordinates_.back() = hi;

    measures_.resize(n);
    faces_.resize(n - 1);
    if (!is_ball()) {
        std::fill(measures_.begin(), measures_.end(), spacing_);
        measures_.front() = measures_.back() = 0.5 * spacing_;
        std::fill(faces_.begin(), faces_.end(), 1.0 / spacing_);
        return;
    }

    const int dim = spec_.dimension;
    const double omega = unit_sphere_area(dim);
    auto face = [&](std::size_t i) {  // r_{i+1/2}
        return std::min(hi, lo + spacing_ * (static_cast<double>(i) + 0.5));
    };
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double outer = (i + 1 == n) ? hi : face(i);
        measures_[i] = omega / dim * (std::pow(outer, dim) - std::pow(inner, dim));
        inner = outer;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) faces_[i] = omega * std::pow(face(i), dim - 1) / spacing_;
}

double Grid::measure() const
{
    if (!is_ball()) return spec_.x1 - spec_.x0;
    return unit_sphere_area(spec_.dimension) / spec_.dimension * std::pow(spec_.radius, spec_.dimension);
}

double Grid::surface_factor() const { return is_ball() ? unit_sphere_area(spec_.dimension) : 1.0; }

double Grid::radial_density(double r) const
{
    if (!is_ball()) return 1.0;
    return unit_sphere_area(spec_.dimension) * std::pow(r, spec_.dimension - 1);
}

std::size_t Grid::nearest_node(double x) const
{
    const double t = std::round((x - left()) / spacing_);
    if (t <= 0.0) return 0;
    return std::min(size() - 1, static_cast<std::size_t>(t));
}

GridPtr build_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_) throw std::invalid_argument("field without grid");
    if (values_.size() != grid_->size())
        throw std::invalid_argument("field length " + std::to_string(values_.size()) + " does not match grid size " +
                                    std::to_string(grid_->size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("field contains non-finite values");
}

Field::Field(GridPtr grid, double constant) : Field(grid, std::vector<double>(grid->size(), constant)) {}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max_abs() const
{
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void require_same_grid(const Field& a, const Field& b, const char* what)
{
    if (a.grid_ptr() != b.grid_ptr() && (a.size() != b.size() || a.grid().spec().kind != b.grid().spec().kind))
        throw std::invalid_argument(std::string("grid mismatch in ") + what);
}

double integrate(const Grid& grid, std::span<const double> f)
{
    if (f.size() != grid.size()) throw std::invalid_argument("grid mismatch in integrate");
    const auto m = grid.cell_measures();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * m[i];
    return s;
}

double integrate(const Field& f) { return integrate(f.grid(), f.values()); }

std::vector<double> apply_stiffness(const Grid& grid, std::span<const double> u)
{
    const auto w = grid.face_weights();
    const std::size_t n = grid.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double flux = w[i] * (u[i] - u[i + 1]);
        out[i] += flux;
        out[i + 1] -= flux;
    }
    return out;
}

std::vector<double> neg_laplacian(const Grid& grid, std::span<const double> u)
{
    if (u.size() != grid.size()) throw std::invalid_argument("grid mismatch in neg_laplacian");
    auto out = apply_stiffness(grid, u);
    const auto m = grid.cell_measures();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= m[i];
    return out;
}

double dirichlet_energy(const Grid& grid, std::span<const double> u)
{
    const auto w = grid.face_weights();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double d = u[i + 1] - u[i];
        s += w[i] * d * d;
    }
    return s;
}

double positive_power(double u, double q)
{
    if (q == 0.0) return 1.0;
    return u > 0.0 ? std::pow(u, q) : 0.0;
}

Field residual(const Field& a, double q, const Field& u)
{
    if (q < 0.0) throw std::invalid_argument("residual requires q >= 0");
    require_same_grid(a, u, "residual");
    auto r = neg_laplacian(u.grid(), u.values());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= a[i] * positive_power(u[i], q);
    return Field(u.grid_ptr(), std::move(r));
}

void write_field_csv(std::ostream& out, const Field& f)
{
    const auto& g = f.grid();
    out << "# kind=" << (g.is_ball() ? "ball" : "interval") << " N=" << g.dimension() << " nodes=" << g.size() << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < f.size(); ++i) out << g.coordinate(i) << ',' << f[i] << '\n';
}

void write_field_csv(const std::string& path, const Field& f)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_field_csv(out, f);
}

Field read_field_csv(std::istream& in, const GridPtr& grid)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("# kind=", 0) != 0) throw std::runtime_error("field CSV: missing header");
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("field CSV line " + std::to_string(lineno) + ": expected two columns");
        const double x = std::stod(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        const std::size_t i = values.size();
        if (i >= grid->size() || std::abs(x - grid->coordinate(i)) > 1e-9 * (1.0 + std::abs(x)))
            throw std::runtime_error("field CSV line " + std::to_string(lineno) + ": coordinate does not match grid");
        values.push_back(v);
    }
    return Field(grid, std::move(values));
}

}  // namespace sublin
