#pragma once

/// \file kernels.hpp
/// Closed-form gas profiles for a pellet with a frozen modified Thiele
/// modulus: the quasi-steady profile, the unsteady eigen-series, and the
/// two-zone profile behind a receding reaction front.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "core.hpp"
#include "numerics.hpp"

namespace qmsolid {

struct SeriesControl
{
    int max_terms = 200;
    double term_tol = 1e-10;

    void check() const
    {
        if (max_terms < 1)
            throw ConfigError("series max_terms must be >= 1", "max_terms");
        if (!(term_tol > 0.0))
            throw ConfigError("series term_tol must be positive", "term_tol");
    }
};

/// A series evaluation together with whether truncation met `term_tol`.
struct SeriesValue
{
    double value = 0.0;
    bool converged = true;
};

// ---------------------------------------------------------------------------
// Quasi-steady profile
// ---------------------------------------------------------------------------

/// cosh(My)/cosh(M) (slab) or sinh(My)/(y sinh M) (sphere) at one node.
inline double qss_value(double M, double y, PelletGeometry g)
{
    if (M <= 0.0)
        return 1.0;
    if (g.is_slab())
        return num::cosh_ratio(M * y, M);
    if (y <= 0.0)
        return M > 20.0 ? 2.0 * M * std::exp(-M) / (-std::expm1(-2.0 * M)) : 1.0 / num::sinhc(M);
    return num::sinh_ratio(M * y, M) / y;
}

/// Surface value of the sphere profile under film resistance,
/// 1 / (1 + (coef) [M coth M - 1]) where `coef` is delta/sh (or 1/sh).
inline double film_factor(double M, double coef)
{
    if (coef == 0.0)
        return 1.0;
    return 1.0 / (1.0 + coef * num::x_coth_x_minus_one(M));
}

/// Quasi-steady profile with one modulus per node; node i is evaluated with
/// its own M[i]. `film_coef` is 1/sh (or delta/sh) per node, or empty for a
/// Dirichlet surface.
inline GasProfile profile_qss(std::span<const double> M, const SpatialGrid& grid, PelletGeometry g,
                              std::span<const double> film_coef = {})
{
    GasProfile out;
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double a = qss_value(M[i], grid[i], g);
        if (!film_coef.empty())
            a *= film_factor(M[i], film_coef[i]);
        out.values[i] = a;
    }
    return out;
}

inline GasProfile profile_qss(double M, const SpatialGrid& grid, PelletGeometry g,
                              const SurfaceCondition& surface = Dirichlet{})
{
    if (!is_dirichlet(surface) && g.is_slab())
        throw ConfigError("film resistance has no closed form for a slab pellet", "sherwood");
    std::vector<double> m(grid.size(), M);
    std::vector<double> coef;
    if (!is_dirichlet(surface))
        coef.assign(grid.size(), inverse_sherwood(surface));
    return profile_qss(m, grid, g, coef);
}

// ---------------------------------------------------------------------------
// Unsteady eigen-series
// ---------------------------------------------------------------------------

namespace detail {

// Slab modes use cos(mu_j y), mu_j = (2j - 1) pi / 2, so the symmetry
// condition holds at y = 0 and the mode vanishes at y = 1.
inline double slab_mu(int j) { return (2.0 * j - 1.0) * std::numbers::pi / 2.0; }

// sin(k pi y)/y with its limit k pi at y = 0.
inline double sphere_mode(int k, double y)
{
    const double kp = k * std::numbers::pi;
    if (y <= 0.0)
        return kp;
    return std::sin(kp * y) / y;
}

inline double alt_sign(int k) { return (k % 2) ? -1.0 : 1.0; }

// Coefficient T_k of the transient so that a = qss + sum T_k exp(-lambda_k theta / c).
inline double series_coefficient(int k, double M, double y, PelletGeometry g, double& lambda)
{
    if (g.is_slab()) {
        const double mu = slab_mu(k);
        lambda = M * M + mu * mu;
        return 2.0 * mu * alt_sign(k) * std::cos(mu * y) / lambda;
    }
    const double kp = k * std::numbers::pi;
    lambda = M * M + kp * kp;
    return 2.0 * kp * alt_sign(k) * sphere_mode(k, y) / lambda;
}

// Bound on |T_k| independent of sign oscillation.
inline double coefficient_envelope(int k, double M, double y, PelletGeometry g)
{
    if (g.is_slab()) {
        const double mu = slab_mu(k);
        return 2.0 * mu / (M * M + mu * mu);
    }
    const double kp = k * std::numbers::pi;
    const double s = y > 0.0 ? std::min(kp, 1.0 / y) : kp;
    return 2.0 * kp * s / (M * M + kp * kp);
}

// Sum of T_k at theta = 0, evaluated with two subtracted leading terms
// whose sums are known in closed form, leaving a k^-5 remainder.
inline SeriesValue transient_at_zero(double M, double y, PelletGeometry g, const SeriesControl& ctl)
{
    const double m2 = M * M;
    double sum = g.is_slab() ? -1.0 + 0.5 * m2 * (1.0 - y * y) : -1.0 + m2 * (1.0 - y * y) / 6.0;
    SeriesValue out;
    out.converged = false;
    for (int k = 1; k <= ctl.max_terms; ++k) {
        double term, env;
        if (g.is_slab()) {
            const double mu = slab_mu(k);
            const double mu3 = mu * mu * mu;
            term = 2.0 * alt_sign(k) * m2 * m2 * std::cos(mu * y) / (mu3 * (m2 + mu * mu));
            env = 2.0 * m2 * m2 / (mu3 * (m2 + mu * mu));
        }
        else {
            const double kp = k * std::numbers::pi;
            const double kp3 = kp * kp * kp;
            const double s = y > 0.0 ? std::min(kp, 1.0 / y) : kp;
            term = 2.0 * alt_sign(k) * m2 * m2 * sphere_mode(k, y) / (kp3 * (m2 + kp * kp));
            env = 2.0 * m2 * m2 * s / (kp3 * (m2 + kp * kp));
        }
        sum += term;
        if (env < ctl.term_tol) {
            out.converged = true;
            break;
        }
    }
    out.value = sum;
    return out;
}

// c * sum_k T_k / lambda_k in closed form; the exposure deficit that the
// transient accumulates from theta = 0 to infinity.
inline double transient_integral_closed(double M, double y, PelletGeometry g, double c)
{
    if (M < 1e-2) {
        const double m2 = M * M, y2 = y * y;
        if (g.is_slab())
            return c * (-(1.0 - y2) / 2.0 + m2 * (y2 * y2 - 6.0 * y2 + 5.0) / 12.0 +
                        m2 * m2 * (y2 * y2 * y2 - 15.0 * y2 * y2 + 75.0 * y2 - 61.0) / 240.0);
        return c * (-(1.0 - y2) / 6.0 + m2 * (3.0 * y2 * y2 - 10.0 * y2 + 7.0) / 180.0 +
                    m2 * m2 * (3.0 * y2 * y2 * y2 - 21.0 * y2 * y2 + 49.0 * y2 - 31.0) / 5040.0);
    }
    if (g.is_slab()) {
        const double t = y * num::sinh_over_cosh(M * y, M) - std::tanh(M) * num::cosh_ratio(M * y, M);
        return c * t / (2.0 * M);
    }
    const double t = num::cosh_over_sinh(M * y, M) - num::coth(M) * qss_value(M, y, g);
    return c * t / (2.0 * M);
}

} // namespace detail

/// Transient part sum_k T_k exp(-lambda_k theta / c) of the unsteady profile.
inline SeriesValue unsteady_transient(double M, double y, double theta, double c, PelletGeometry g,
                                      const SeriesControl& ctl = {})
{
    if (y >= 1.0)
        return {0.0, true};
    if (theta <= 0.0)
        return detail::transient_at_zero(M, y, g, ctl);
    SeriesValue out;
    out.converged = false;
    double sum = 0.0;
    for (int k = 1; k <= ctl.max_terms; ++k) {
        double lambda;
        const double T = detail::series_coefficient(k, M, y, g, lambda);
        const double e = std::exp(-lambda * theta / c);
        sum += T * e;
        if (detail::coefficient_envelope(k, M, y, g) * e < ctl.term_tol) {
            out.converged = true;
            break;
        }
    }
    out.value = sum;
    return out;
}

/// a(y, theta) of the unsteady gas balance with frozen modulus M and
/// relaxation constant c = psi * (Thiele modulus)^2, starting from a gas-free
/// pellet.
inline SeriesValue unsteady_value(double M, double y, double theta, double c, PelletGeometry g,
                                  const SeriesControl& ctl = {})
{
    auto t = unsteady_transient(M, y, theta, c, g, ctl);
    t.value += qss_value(M, y, g);
    return t;
}

/// Integral of the unsteady a(y, .) over [theta0, theta1].
inline SeriesValue unsteady_exposure(double M, double y, double theta0, double theta1, double c,
                                     PelletGeometry g, const SeriesControl& ctl = {})
{
    const double dt = theta1 - theta0;
    SeriesValue out;
    out.value = qss_value(M, y, g) * dt;
    if (y >= 1.0 || dt <= 0.0)
        return out;
    out.converged = false;
    double sum = 0.0;
    if (theta0 <= 0.0) {
        // sum T_k c/lambda_k (1 - e1) = closed form - sum T_k c/lambda_k e1
        sum = detail::transient_integral_closed(M, y, g, c);
        for (int k = 1; k <= ctl.max_terms; ++k) {
            double lambda;
            const double T = detail::series_coefficient(k, M, y, g, lambda);
            const double e1 = std::exp(-lambda * theta1 / c);
            sum -= T * (c / lambda) * e1;
            if (detail::coefficient_envelope(k, M, y, g) * (c / lambda) * e1 < ctl.term_tol) {
                out.converged = true;
                break;
            }
        }
    }
    else {
        for (int k = 1; k <= ctl.max_terms; ++k) {
            double lambda;
            const double T = detail::series_coefficient(k, M, y, g, lambda);
            const double e0 = std::exp(-lambda * theta0 / c);
            const double e1 = std::exp(-lambda * theta1 / c);
            sum += T * (c / lambda) * (e0 - e1);
            if (detail::coefficient_envelope(k, M, y, g) * (c / lambda) * e0 < ctl.term_tol) {
                out.converged = true;
                break;
            }
        }
    }
    out.value += sum;
    return out;
}

struct UnsteadyProfile
{
    GasProfile profile;
    bool converged = true;
};

inline UnsteadyProfile profile_unsteady(std::span<const double> M, double theta, double psi_phi_sq,
                                        const SpatialGrid& grid, PelletGeometry g,
                                        const SeriesControl& ctl = {})
{
    if (!(psi_phi_sq > 0.0))
        throw ConfigError("unsteady profile needs psi * phi^2 > 0", "psi");
    UnsteadyProfile out;
    out.profile.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto v = unsteady_value(M[i], grid[i], theta, psi_phi_sq, g, ctl);
        out.profile.values[i] = v.value;
        out.converged = out.converged && v.converged;
    }
    return out;
}

inline UnsteadyProfile profile_unsteady(double M, double theta, double psi_phi_sq,
                                        const SpatialGrid& grid, PelletGeometry g,
                                        const SeriesControl& ctl = {})
{
    std::vector<double> m(grid.size(), M);
    return profile_unsteady(m, theta, psi_phi_sq, grid, g, ctl);
}

// ---------------------------------------------------------------------------
// Receding reaction front
// ---------------------------------------------------------------------------

/// Inputs of the front-position relation theta = E_c * D(y_m; M, sh).
/// `exhaustion_exposure` is the cumulative exposure E_c at which the solid
/// of a node is used up (1 for the simple grain, 2 for half order, ...).
struct MovingBoundaryParams
{
    double exhaustion_exposure = 1.0;
    SurfaceCondition surface = Dirichlet{};
};

/// theta as a function of the front position y_m for a frozen modulus M.
inline double moving_boundary_theta(double y_m, double M, PelletGeometry g,
                                    const MovingBoundaryParams& p)
{
    const double u = 1.0 - y_m;
    const double x = M * y_m;
    double d;
    if (g.is_slab()) {
        d = 1.0 + 0.5 * M * M * u * u + M * u * std::tanh(x);
    }
    else {
        const double gx = num::x_coth_x_minus_one(x);
        d = 1.0 + M * M / 6.0 * u * u * (1.0 + 2.0 * y_m) + u * gx;
        const double is = inverse_sherwood(p.surface);
        if (is > 0.0)
            d += is * (M * M / 3.0 * (1.0 - y_m * y_m * y_m) + y_m * gx);
    }
    return p.exhaustion_exposure * d;
}

enum class FrontStatus
{
    Inside,
    Exhausted
};

struct FrontPosition
{
    double y_m = 1.0;
    FrontStatus status = FrontStatus::Inside;
};

/// Inverts the front relation for y_m in [0, 1] by bisection.
inline FrontPosition solve_moving_boundary(double theta, double M, PelletGeometry g,
                                           const MovingBoundaryParams& p, double tol = 1e-10)
{
    if (!(M > 0.0))
        return {0.0, FrontStatus::Exhausted};
    const double t0 = moving_boundary_theta(0.0, M, g, p);
    const double t1 = moving_boundary_theta(1.0, M, g, p);
    if (theta >= t0)
        return {0.0, FrontStatus::Exhausted};
    if (theta <= t1)
        return {1.0, FrontStatus::Inside};
    if (!(t0 > t1))
        throw SolverError("front relation is not decreasing in y_m");
    const double ym = num::bisect([&](double z) { return moving_boundary_theta(z, M, g, p) - theta; }, 0.0,
                                  1.0, tol);
    return {ym, FrontStatus::Inside};
}

/// Gas concentration at the front, a(y_m), for a pellet whose inner zone has
/// modulus M.
inline double front_concentration(double y_m, double M, PelletGeometry g, const SurfaceCondition& s)
{
    const double x = M * y_m;
    if (g.is_slab())
        return 1.0 / (1.0 + M * (1.0 - y_m) * std::tanh(x));
    const double gx = num::x_coth_x_minus_one(x);
    return 1.0 / (1.0 + gx * (1.0 - y_m + y_m * inverse_sherwood(s)));
}

/// Inner-zone (y < y_m) concentration at y for modulus M.
inline double second_stage_inner(double y, double y_m, double M, PelletGeometry g,
                                 const SurfaceCondition& s)
{
    const double am = front_concentration(y_m, M, g, s);
    if (M * y_m < 1e-12)
        return am;
    if (g.is_slab())
        return am * num::cosh_ratio(M * y, M * y_m);
    if (y <= 0.0)
        return am / num::sinhc(M * y_m);
    return am * (y_m / y) * num::sinh_ratio(M * y, M * y_m);
}

/// Outer-zone (y >= y_m) concentration at y: linear (slab) or harmonic
/// (sphere) pure diffusion through the exhausted shell.
inline double second_stage_outer(double y, double y_m, double M, PelletGeometry g,
                                 const SurfaceCondition& s)
{
    const double am = front_concentration(y_m, M, g, s);
    if (g.is_slab()) {
        const double slope = M * std::tanh(M * y_m) * am;
        return 1.0 + slope * (y - 1.0);
    }
    const double gx = num::x_coth_x_minus_one(M * y_m);
    return am * (1.0 + gx * (1.0 - y_m / y));
}

inline double second_stage_value(double y, double y_m, double M, PelletGeometry g,
                                 const SurfaceCondition& s = Dirichlet{})
{
    return y < y_m ? second_stage_inner(y, y_m, M, g, s) : second_stage_outer(y, y_m, M, g, s);
}

/// Profile of the two-zone problem with the front at y_m. Inner nodes use
/// their own modulus `M_inner[i]`; the outer shell uses `M_front`.
inline GasProfile second_stage_profiles(double y_m, std::span<const double> M_inner, double M_front,
                                        const SpatialGrid& grid, PelletGeometry g,
                                        const SurfaceCondition& s = Dirichlet{})
{
    GasProfile out;
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double y = grid[i];
        out.values[i] = y < y_m ? second_stage_inner(y, y_m, M_inner[i], g, s)
                                : second_stage_outer(y, y_m, M_front, g, s);
    }
    return out;
}

inline GasProfile second_stage_profiles(double y_m, double M, const SpatialGrid& grid, PelletGeometry g,
                                        const SurfaceCondition& s = Dirichlet{})
{
    std::vector<double> m(grid.size(), M);
    return second_stage_profiles(y_m, m, M, grid, g, s);
}

/// Value and flux mismatch between the inner and outer branches at y_m,
/// max(|a1 - a2|, |a1' - a2'|). Each branch is differentiated numerically
/// from its own closed form, so the check does not assume continuity.
inline double second_stage_junction_mismatch(double y_m, double M, PelletGeometry g,
                                             const SurfaceCondition& s = Dirichlet{})
{
    const double h = 1e-5 * y_m;
    auto inner = [&](double y) { return second_stage_inner(y, y_m, M, g, s); };
    auto outer = [&](double y) { return second_stage_outer(y, y_m, M, g, s); };
    const double di = (inner(y_m + h) - inner(y_m - h)) / (2.0 * h);
    const double dout = (outer(y_m + h) - outer(y_m - h)) / (2.0 * h);
    return std::max(std::abs(inner(y_m) - outer(y_m)), std::abs(di - dout));
}

} // namespace qmsolid
