#pragma once

/// \file analysis.hpp
/// Conversion, selectivity, cumulative bed concentration and run-to-run
/// error metrics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "numerics.hpp"

namespace qmsolid {

/// Conversion-time curve. `x_a` is filled only for the simultaneous model
/// (conversion caused by gas A).
struct ConversionSeries
{
    ModelKind kind = ModelKind::VolumeFirstOrder;
    std::vector<double> theta;
    std::vector<double> x;
    std::vector<double> x_a;

    std::size_t size() const noexcept { return theta.size(); }
};

struct ProfileSnapshot
{
    double theta = 0.0;
    std::vector<double> y;
    std::vector<double> a;
    std::vector<double> solid;
};

/// Outcome of one pellet run (QM or finite-difference oracle).
struct RunResult
{
    ConversionSeries series;
    std::vector<ProfileSnapshot> snapshots;
    /// Time the outer surface became exhausted, if it did.
    std::optional<double> theta_c;
    bool exhausted = false;
    bool pore_plugged = false;
    bool series_warning = false;
};

namespace detail {

inline double weighted_integral(std::span<const double> f, const SpatialGrid& grid, PelletGeometry g)
{
    std::vector<double> w(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double y = grid[i];
        w[i] = g.is_sphere() ? y * y * f[i] : f[i];
    }
    return g.shape_factor() * num::simpson(w, grid.spacing());
}

} // namespace detail

/// Fraction of solid still present, F_p * int y^(F_p-1) s dy, where s is b
/// or r*^F_g for the grain models.
inline double remaining_solid(std::span<const double> solid, const SpatialGrid& grid, const ModelParams& p)
{
    const bool grain = p.kind == ModelKind::GrainSimple || p.kind == ModelKind::GrainProductLayer ||
                       p.kind == ModelKind::GrainModified;
    if (!grain)
        return detail::weighted_integral(solid, grid, p.pellet);
    std::vector<double> s(solid.size());
    const int fg = p.grain.shape_factor();
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = std::pow(solid[i], fg);
    return detail::weighted_integral(s, grid, p.pellet);
}

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

/// Solid conversion X of a pellet state.
inline double conversion(const PelletState& s, const ModelParams& p)
{
    return clamp_unit(1.0 - remaining_solid(s.solid, s.grid, p));
}

/// Conversion caused by gas A in the simultaneous model.
inline double conversion_a(const PelletState& s, const ModelParams& p)
{
    if (s.solid_a.empty())
        throw ConfigError("state has no gas-A solid field", "kind");
    return clamp_unit(1.0 - detail::weighted_integral(s.solid_a, s.grid, p.pellet));
}

/// Overall selectivity X_A / (X - X_A); empty when no solid was converted
/// by gas C.
inline std::optional<double> selectivity(double x, double x_a)
{
    const double xc = x - x_a;
    if (xc <= 0.0)
        return std::nullopt;
    return x_a / xc;
}

/// Trapezoidal time integral of Y at each axial node. `Y[j][k]` is the
/// value at time `tau[j]` and node k; the result has the same shape.
inline std::vector<std::vector<double>> cumulative_bulk_concentration(std::span<const double> tau,
                                                                      const std::vector<std::vector<double>>& Y)
{
    if (tau.size() != Y.size())
        throw ConfigError("time samples and concentration rows differ in length");
    std::vector<std::vector<double>> c(Y.size());
    if (Y.empty())
        return c;
    c[0].assign(Y[0].size(), 0.0);
    for (std::size_t j = 1; j < Y.size(); ++j) {
        const double dt = tau[j] - tau[j - 1];
        if (!(dt > 0.0))
            throw ConfigError("time samples must be strictly increasing");
        c[j].resize(Y[j].size());
        for (std::size_t k = 0; k < Y[j].size(); ++k)
            c[j][k] = c[j - 1][k] + 0.5 * dt * (Y[j][k] + Y[j - 1][k]);
    }
    return c;
}

struct CompareMetrics
{
    double max_abs_dX = 0.0;
    double rms_dX = 0.0;
    double theta_of_max = 0.0;
};

namespace detail {

inline double interpolate(std::span<const double> t, std::span<const double> v, double at)
{
    auto it = std::upper_bound(t.begin(), t.end(), at);
    if (it == t.begin())
        return v.front();
    if (it == t.end())
        return v.back();
    const std::size_t j = static_cast<std::size_t>(it - t.begin());
    const double w = (at - t[j - 1]) / (t[j] - t[j - 1]);
    return (1.0 - w) * v[j - 1] + w * v[j];
}

} // namespace detail

/// Conversion differences over the common theta range, evaluated at the
/// samples of `qm` (the other series is interpolated linearly).
inline CompareMetrics compare_series(const ConversionSeries& qm, const ConversionSeries& ref)
{
    if (qm.size() == 0 || ref.size() == 0)
        throw ConfigError("cannot compare empty runs");
    const double lo = std::max(qm.theta.front(), ref.theta.front());
    const double hi = std::min(qm.theta.back(), ref.theta.back());
    if (lo > hi)
        throw ConfigError("runs have disjoint theta ranges");
    CompareMetrics m;
    double sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < qm.size(); ++i) {
        const double t = qm.theta[i];
        if (t < lo - 1e-12 || t > hi + 1e-12)
            continue;
        const double d = std::abs(qm.x[i] - detail::interpolate(ref.theta, ref.x, t));
        if (d > m.max_abs_dX) {
            m.max_abs_dX = d;
            m.theta_of_max = t;
        }
        sq += d * d;
        ++n;
    }
    m.rms_dX = n ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
    return m;
}

inline CompareMetrics compare_runs(const RunResult& qm, const RunResult& ref)
{
    return compare_series(qm.series, ref.series);
}

/// First theta at which X reaches `level`, linearly interpolated between
/// samples; empty if never reached.
inline std::optional<double> theta_at_conversion(const ConversionSeries& s, double level)
{
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.x[i] >= level) {
            if (i == 0)
                return s.theta[0];
            const double w = (level - s.x[i - 1]) / (s.x[i] - s.x[i - 1]);
            return s.theta[i - 1] + w * (s.theta[i] - s.theta[i - 1]);
        }
    }
    return std::nullopt;
}

} // namespace qmsolid
