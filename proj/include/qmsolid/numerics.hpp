#pragma once

/// \file numerics.hpp
/// Overflow-safe hyperbolic ratios, bracketed bisection and composite
/// Simpson quadrature.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "core.hpp"

namespace qmsolid::num {

/// x coth(x) - 1, accurate near zero and finite for all x >= 0.
inline double x_coth_x_minus_one(double x)
{
    x = std::abs(x);
    if (x < 1e-3) {
        const double x2 = x * x;
        return x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0;
    }
    if (x > 20.0)
        return x - 1.0 + 2.0 * x * std::exp(-2.0 * x);
    return x / std::tanh(x) - 1.0;
}

/// sinh(x)/x with the limit 1 at zero.
inline double sinhc(double x)
{
    x = std::abs(x);
    if (x < 1e-4)
        return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

/// coth(x) for x > 0 without overflow.
inline double coth(double x)
{
    if (x > 20.0)
        return 1.0 + 2.0 * std::exp(-2.0 * x);
    return 1.0 / std::tanh(x);
}

/// sinh(a)/sinh(b) for 0 <= a <= b. Returns 1 when both vanish.
inline double sinh_ratio(double a, double b)
{
    if (b <= 0.0)
        return 1.0;
    if (b < 1e-4)
        return (a / b) * (1.0 + (a * a - b * b) / 6.0);
    if (b > 20.0)
        return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (-std::expm1(-2.0 * b));
    return std::sinh(a) / std::sinh(b);
}

/// cosh(a)/cosh(b) for a, b >= 0.
inline double cosh_ratio(double a, double b)
{
    return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

/// cosh(a)/sinh(b) for a >= 0, b > 0.
inline double cosh_over_sinh(double a, double b)
{
    return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

/// sinh(a)/cosh(b) for a, b >= 0.
inline double sinh_over_cosh(double a, double b)
{
    return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

/// Root of a continuous `f` on [lo, hi] by bisection. `f(lo)` and `f(hi)`
/// must have opposite signs (a zero at either end is accepted).
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-12, int max_iter = 200)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw SolverError("bisection bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] does not enclose a root");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        }
        else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Composite Simpson rule over uniformly spaced samples (odd count).
inline double simpson(std::span<const double> f, double h)
{
    const std::size_t n = f.size();
    if (n < 3 || n % 2 == 0)
        throw SolverError("Simpson quadrature needs an odd number of samples >= 3");
    double s = f[0] + f[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
}

} // namespace qmsolid::num
