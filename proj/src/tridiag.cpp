#include "sublin/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sublin {

std::vector<double> SymTridiag::apply(std::span<const double> x) const
{
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += off[i - 1] * x[i - 1];
        if (i + 1 < n) s += off[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

double SymTridiag::norm_bound() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        double r = std::abs(diag[i]);
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < size()) r += std::abs(off[i]);
        m = std::max(m, r);
    }
    return m;
}

std::vector<double> solve(const SymTridiag& t, std::span<const double> b)
{
    // LAPACK dgtsv-style elimination: row i may swap with row i+1, which
    // introduces one extra superdiagonal (du2).
    const std::size_t n = t.size();
    if (b.size() != n) throw std::invalid_argument("tridiagonal solve: size mismatch");
    std::vector<double> dl(t.off), d(t.diag), du(t.off), du2(n, 0.0), x(b.begin(), b.end());
    if (n == 1) {
        if (d[0] == 0.0) throw std::runtime_error("tridiagonal solve: singular matrix");
        x[0] /= d[0];
        return x;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) throw std::runtime_error("tridiagonal solve: singular matrix");
            const double f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
            if (i + 2 < n) du2[i] = 0.0;
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            std::swap(x[i], x[i + 1]);
            x[i + 1] -= f * x[i];
        }
    }
    if (d[n - 1] == 0.0) throw std::runtime_error("tridiagonal solve: singular matrix");
    x[n - 1] /= d[n - 1];
    x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t k = n - 2; k-- > 0;) x[k] = (x[k] - du[k] * x[k + 1] - du2[k] * x[k + 2]) / d[k];
    return x;
}

std::size_t count_below(const SymTridiag& t, double shift)
{
    const std::size_t n = t.size();
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    // A vanishing pivot is perturbed to −tiny and counted, as in bisection
    // codes, so the count stays consistent with the recurrence that follows.
    std::size_t count = 0;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d = (t.diag[i] - shift) - (i > 0 ? t.off[i - 1] * t.off[i - 1] / d : 0.0);
        if (std::abs(d) < tiny) d = -tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

double min_eigenvalue(const SymTridiag& t, double tol)
{
    double lo = std::numeric_limits<double>::max();
    double hi = -lo;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < t.size()) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (count_below(t, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

double norm2(std::span<const double> v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

EigenEstimate lowest_eigenpair(const SymTridiag& t)
{
    const std::size_t n = t.size();
    const double scale = std::max(t.norm_bound(), 1e-300);
    const double eps = std::numeric_limits<double>::epsilon();
    const double lambda = min_eigenvalue(t, 4.0 * eps * scale);

    // Shift slightly below the eigenvalue so the shifted matrix stays
    // nonsingular; inverse iteration then converges to the lowest mode.
    const double shift = lambda - 64.0 * eps * scale;
    SymTridiag shifted = t;
    for (double& d : shifted.diag) d -= shift;

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int it = 0; it < 6; ++it) {
        v = solve(shifted, v);
        const double nv = norm2(v);
        if (!(nv > 0.0) || !std::isfinite(nv)) throw std::runtime_error("inverse iteration broke down");
        for (double& x : v) x /= nv;
    }
    auto first = std::find_if(v.begin(), v.end(), [](double x) { return x != 0.0; });
    if (first != v.end() && *first < 0.0)
        for (double& x : v) x = -x;

    EigenEstimate out;
    const auto tv = t.apply(v);
    out.value = std::inner_product(v.begin(), v.end(), tv.begin(), 0.0);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (tv[i] - out.value * v[i]) * (tv[i] - out.value * v[i]);
    out.residual = std::sqrt(r2);
    out.vector = std::move(v);
    return out;
}

}  // namespace sublin
