#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cubelab/errors.hpp"

namespace cubelab {

struct QuadratureOutcome {
    double value = 0;
    double last_delta = 0;  // |I_j - I_{j-1}| at acceptance
    int refinements = 0;
};

// Composite Simpson on [a,b], panel count doubling until two successive
// estimates differ by less than tol. Throws QuadratureError past the
// subdivision limit.
template <class F>
QuadratureOutcome integrate_refining(F&& f, double a, double b, double tol, int max_halvings,
                                     int initial_panels = 64) {
    auto simpson = [&](long panels) {
        const double h = (b - a) / static_cast<double>(panels);
        double odd = 0, even = 0;
        for (long i = 1; i < panels; i += 2) odd += f(a + h * static_cast<double>(i));
        for (long i = 2; i < panels; i += 2) even += f(a + h * static_cast<double>(i));
        return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
    };
    long panels = initial_panels;
    double prev = simpson(panels);
    for (int j = 0; j < max_halvings; ++j) {
        panels *= 2;
        const double cur = simpson(panels);
        const double delta = std::fabs(cur - prev);
        if (delta < tol) return QuadratureOutcome{cur, delta, j + 1};
        prev = cur;
    }
    throw QuadratureError("integrate_refining: no convergence to tol=" + std::to_string(tol) +
                          " within " + std::to_string(max_halvings) + " halvings");
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

}  // namespace cubelab
