#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sublin {

/// Symmetric tridiagonal matrix: diag (n entries) and off (n-1 entries).
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
    std::vector<double> apply(std::span<const double> x) const;
    /// Gershgorin bound on the spectral radius.
    double norm_bound() const;
};

/// Solves T x = b by Gaussian elimination with partial pivoting.
/// Throws std::runtime_error when a pivot vanishes.
std::vector<double> solve(const SymTridiag& t, std::span<const double> b);

/// Number of eigenvalues of T strictly below the shift (Sturm count).
std::size_t count_below(const SymTridiag& t, double shift);

/// Smallest eigenvalue by Sturm bisection; tol is absolute.
double min_eigenvalue(const SymTridiag& t, double tol);

struct EigenEstimate {
    double value = 0.0;
    std::vector<double> vector;  // unit Euclidean norm, positive first nonzero entry
    double residual = 0.0;       // ||T v - value v||
};

/// Lowest eigenpair: bisection for the eigenvalue, inverse iteration for the
/// vector, final value taken as the Rayleigh quotient.
EigenEstimate lowest_eigenpair(const SymTridiag& t);

}  // namespace sublin
