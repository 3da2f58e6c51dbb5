#include "oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace oracle {

namespace {

double weight(double x, double delta)
{
    return (std::abs(x) > 0.5 ? 1.0 : 0.0) - delta * std::max(0.25 - x * x, 0.0);
}

}  // namespace

double flux_at_boundary(double c, double delta, double q)
{
    const double alpha = 2.0 / (1.0 - q);
    const double k = delta * std::max(0.25 - c * c, 0.0);
    const double A = k > 0.0 ? std::pow(k / (alpha * (alpha - 1.0)), 1.0 / (1.0 - q)) : 0.0;
    const double s = 1e-4;
    double x = c + s;
    std::array<double, 2> y = {A * std::pow(s, alpha), A * alpha * std::pow(s, alpha - 1.0)};
    if (!(y[0] > 0.0)) y = {1e-30, 0.0};

    const auto f = [&](double t, const std::array<double, 2>& v) {
        return std::array<double, 2>{v[1], -weight(t, delta) * std::pow(std::max(v[0], 0.0), q)};
    };
    const int steps = 20000;
    const double h = (1.0 - x) / steps;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = f(x, y);
        const auto k2 = f(x + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
        const auto k3 = f(x + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
        const auto k4 = f(x + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        for (int j = 0; j < 2; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        x += h;
    }
    return y[1];
}

std::optional<double> core_edge(double delta, double q)
{
    const int samples = 50;
    double lo = 0.0, flo = flux_at_boundary(lo, delta, q);
    for (int i = 1; i < samples; ++i) {
        double hi = 0.49 * i / (samples - 1);
        const double fhi = flux_at_boundary(hi, delta, q);
        if ((flo < 0.0) != (fhi < 0.0)) {
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = flux_at_boundary(mid, delta, q);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        lo = hi;
        flo = fhi;
    }
    return std::nullopt;
}

}  // namespace oracle
