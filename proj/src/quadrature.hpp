#pragma once

// Thin wrappers over Boost.Math quadrature used by the distribution kernel.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fluidnet/distributions.hpp"

namespace fluidnet::detail {

/// Integral over a finite interval, split at the given interior breakpoints.
template <class F>
double integrate_finite(const F& f, double a, double b, std::vector<double> breaks = {},
                        double tol = 1e-10) {
    if (!(b > a)) return 0.0;
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = std::clamp(breaks[i], a, b);
        const double hi = std::clamp(breaks[i + 1], a, b);
        if (!(hi > lo)) continue;
        double err = 0.0;
        double l1 = 0.0;
        const double v = integrator.integrate(f, lo, hi, tol, &err, &l1);
        if (!std::isfinite(v)) throw NumericError("quadrature produced a non-finite value");
        total += v;
    }
    return total;
}

/// Integral of f over [a, inf).
template <class F>
double integrate_half_line(const F& f, double a, double tol = 1e-10) {
    thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    const auto shifted = [&](double u) { return f(a + u); };
    const double v = integrator.integrate(shifted, 0.0, std::numeric_limits<double>::infinity(),
                                          tol, &err, &l1, &levels);
    if (!std::isfinite(v)) throw NumericError("half-line quadrature produced a non-finite value");
    if (l1 > 0.0 && err > 1e-6 * l1) throw NumericError("half-line quadrature did not converge");
    return v;
}

}  // namespace fluidnet::detail
