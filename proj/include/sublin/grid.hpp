#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sublin {

enum class GridKind { Interval, Ball };

/// Uniform discretization request for Ω: an interval (x0, x1) or a ball of
/// radius R in R^N reduced to its radial profile on [0, R].
struct GridSpec {
    GridKind kind = GridKind::Interval;
    double x0 = 0.0;
    double x1 = 1.0;
    double radius = 1.0;
    int dimension = 1;
    std::size_t nodes = 0;

    static GridSpec interval(double x0, double x1, std::size_t nodes);
    static GridSpec ball(double radius, int dimension, std::size_t nodes);

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

/// Surface area of the unit sphere in R^N (ω_0 = 2, ω_1 = 2π, ω_2 = 4π, ...).
double unit_sphere_area(int dimension);

/// Uniform vertex-centred grid with a finite-volume Neumann closure.
///
/// Node i owns the control volume [x_{i-1/2}, x_{i+1/2}] clipped to Ω. The
/// discrete operator is -Δ_h u = M^{-1} K u, where M holds the control-volume
/// measures and K is the symmetric stiffness matrix built from the face
/// weights ω r_{i+1/2}^{N-1} / h. Boundary faces carry zero flux, which is the
/// mirror ghost-node closure; at r = 0 it reduces to Δu(0) = N u''(0).
class Grid {
public:
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return coordinates_.size(); }
    double spacing() const { return spacing_; }
    bool is_ball() const { return spec_.kind == GridKind::Ball; }
    int dimension() const { return is_ball() ? spec_.dimension : 1; }

    std::span<const double> coordinates() const { return coordinates_; }
    std::span<const double> cell_measures() const { return measures_; }
    /// Face conductances, size() - 1 entries.
    std::span<const double> face_weights() const { return faces_; }

    double coordinate(std::size_t i) const { return coordinates_[i]; }
    double left() const { return coordinates_.front(); }
    double right() const { return coordinates_.back(); }

    /// Exact |Ω| of the continuous domain.
    double measure() const;
    /// ω_{N-1} for balls, 1 for intervals.
    double surface_factor() const;
    /// Density of the measure in the coordinate: ω r^{N-1} (ball) or 1.
    double radial_density(double r) const;

    /// Nearest node index to a coordinate (clamped to the grid).
    std::size_t nearest_node(double x) const;

private:
    GridSpec spec_;
    double spacing_ = 0.0;
    std::vector<double> coordinates_;
    std::vector<double> measures_;
    std::vector<double> faces_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const GridSpec& spec);

/// Nodal samples on a grid.
class Field {
public:
    Field() = default;
    Field(GridPtr grid, std::vector<double> values);
    Field(GridPtr grid, double constant);

    const GridPtr& grid_ptr() const { return grid_; }
    const Grid& grid() const { return *grid_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double max() const;
    double min() const;
    double max_abs() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Samples f on every node.
template <class F>
Field sample(const GridPtr& grid, F&& f)
{
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->coordinate(i));
    return Field(grid, std::move(v));
}

void require_same_grid(const Field& a, const Field& b, const char* what);

/// Σ f_i |cell_i|.
double integrate(const Field& f);
double integrate(const Grid& grid, std::span<const double> f);

/// K u (stiffness times nodal vector).
std::vector<double> apply_stiffness(const Grid& grid, std::span<const double> u);
/// -Δ_h u with the Neumann closure.
std::vector<double> neg_laplacian(const Grid& grid, std::span<const double> u);
/// Discrete Dirichlet integral ∫|∇u|² = uᵀ K u.
double dirichlet_energy(const Grid& grid, std::span<const double> u);

/// (max(u, 0))^q, with 0^0 = 1 so that q = 0 is the linear problem.
double positive_power(double u, double q);

/// -Δ_h u - a (u⁺)^q at every node.
Field residual(const Field& a, double q, const Field& u);

/// Two-column CSV with header `# kind=<interval|ball> N=<n> nodes=<m>`.
void write_field_csv(std::ostream& out, const Field& f);
void write_field_csv(const std::string& path, const Field& f);
/// Reads a CSV written by write_field_csv and checks it against the grid.
Field read_field_csv(std::istream& in, const GridPtr& grid);

}  // namespace sublin
