#pragma once

/// \file packed_bed.hpp
/// Isothermal packed bed of spherical pellets with axial dispersion. The
/// bulk gas profile is assembled from exponential solutions on axial
/// segments with a frozen pellet-surface concentration; pellets carry a
/// radial conversion field advanced with the quantized method.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "kernels.hpp"
#include "numerics.hpp"
#include "reference_fd.hpp"

namespace qmsolid {

/// Characteristic roots r1 > 0 >= r2 of Y'' - Pe Y' - beta Y = 0.
struct BedRoots
{
    double r1 = 0.0;
    double r2 = 0.0;
};

inline BedRoots bed_roots(double peclet, double beta)
{
    const double d = std::sqrt(peclet * peclet + 4.0 * beta);
    // r2 through the product of the roots to avoid cancellation for small beta
    const double r1 = 0.5 * (peclet + d);
    return {r1, -beta / r1};
}

/// a(1)/Y of a spherical pellet with modulus M behind a film of Biot number Bi.
inline double pellet_surface_ratio(double M, double biot)
{
    return biot / (num::x_coth_x_minus_one(M) + biot);
}

/// Pellet gas concentration a(y) = Bi Y sinh(My) / (y (M cosh M + (Bi - 1) sinh M)),
/// written as Bi Y q(y) / (M coth M - 1 + Bi) with q the Dirichlet profile
/// so that it stays finite for large M and has the y -> 0 limit built in.
inline double bed_pellet_value(double M, double y_local, double biot, double y)
{
    return biot * y_local * qss_value(M, y, PelletGeometry::sphere()) / (num::x_coth_x_minus_one(M) + biot);
}

/// Pellet profile on `grid` with one modulus per radial node.
inline GasProfile bed_pellet_profile(std::span<const double> M, double y_local, double biot, const SpatialGrid& grid)
{
    if (!(biot > 0.0))
        throw ConfigError("Biot number must be positive", "biot");
    GasProfile out;
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.values[i] = bed_pellet_value(M[i], y_local, biot, grid[i]);
    return out;
}

inline GasProfile bed_pellet_profile(double M, double y_local, double biot, const SpatialGrid& grid)
{
    std::vector<double> m(grid.size(), M);
    return bed_pellet_profile(m, y_local, biot, grid);
}

/// Closed-form axial bulk profile for a surface concentration that is
/// constant on each of `bed.segments` equal segments. On segment j,
/// Y = s_j + A_j exp(r1 (eta - right_j)) + B_j exp(r2 (eta - left_j)),
/// with the Danckwerts inlet, continuity of Y and Y' at the joints and a
/// closed outlet fixing the 2n constants. The matrix does not depend on the
/// sources and is factored once.
class BedBulkSolver
{
public:
    explicit BedBulkSolver(const BedParams& bed)
        : bed_(bed), roots_(bed_roots(bed.peclet, bed.beta)), n_(bed.segments), len_(bed.length / bed.segments)
    {
        bed.check();
        e1_ = std::exp(-roots_.r1 * len_);
        e2_ = std::exp(roots_.r2 * len_);
        const std::size_t m = 2 * n_;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        const double r1 = roots_.r1, r2 = roots_.r2, pe = bed.peclet;
        auto ia = [](std::size_t j) { return static_cast<Eigen::Index>(2 * j); };
        auto ib = [](std::size_t j) { return static_cast<Eigen::Index>(2 * j + 1); };
        Eigen::Index row = 0;
        A(row, ia(0)) = e1_ * (1.0 - r1 / pe);
        A(row, ib(0)) = 1.0 - r2 / pe;
        ++row;
        for (std::size_t j = 0; j + 1 < n_; ++j) {
            A(row, ia(j)) = 1.0;
            A(row, ib(j)) = e2_;
            A(row, ia(j + 1)) = -e1_;
            A(row, ib(j + 1)) = -1.0;
            ++row;
            A(row, ia(j)) = r1;
            A(row, ib(j)) = r2 * e2_;
            A(row, ia(j + 1)) = -r1 * e1_;
            A(row, ib(j + 1)) = -r2;
            ++row;
        }
        A(row, ia(n_ - 1)) = r1;
        A(row, ib(n_ - 1)) = r2 * e2_;
        lu_ = A.partialPivLu();
        if (!std::isfinite(lu_.determinant()) || lu_.determinant() == 0.0)
            throw SolverError("bed segment system is singular");
    }

    const BedRoots& roots() const noexcept { return roots_; }
    std::size_t segments() const noexcept { return n_; }
    double segment_length() const noexcept { return len_; }
    double midpoint(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * len_; }

    /// Solves for the segment constants given one source per segment.
    void solve(std::span<const double> source)
    {
        if (source.size() != n_)
            throw ConfigError("bed source size differs from the segment count", "segments");
        source_.assign(source.begin(), source.end());
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n_));
        rhs(0) = 1.0 - source[0];
        for (std::size_t j = 0; j + 1 < n_; ++j)
            rhs(static_cast<Eigen::Index>(1 + 2 * j)) = source[j + 1] - source[j];
        coef_ = lu_.solve(rhs);
    }

    /// Y at eta after `solve`.
    double value(double eta) const
    {
        const std::size_t j = segment_of(eta);
        const double left = static_cast<double>(j) * len_;
        const double a = coef_(static_cast<Eigen::Index>(2 * j));
        const double b = coef_(static_cast<Eigen::Index>(2 * j + 1));
        return source_[j] + a * std::exp(roots_.r1 * (eta - left - len_)) + b * std::exp(roots_.r2 * (eta - left));
    }

    double derivative(double eta) const
    {
        const std::size_t j = segment_of(eta);
        const double left = static_cast<double>(j) * len_;
        const double a = coef_(static_cast<Eigen::Index>(2 * j));
        const double b = coef_(static_cast<Eigen::Index>(2 * j + 1));
        return roots_.r1 * a * std::exp(roots_.r1 * (eta - left - len_)) +
               roots_.r2 * b * std::exp(roots_.r2 * (eta - left));
    }

private:
    std::size_t segment_of(double eta) const
    {
        const double k = std::floor(eta / len_);
        if (k < 0.0)
            return 0;
        return std::min(n_ - 1, static_cast<std::size_t>(k));
    }

    BedParams bed_;
    BedRoots roots_;
    std::size_t n_;
    double len_;
    double e1_ = 0.0, e2_ = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    Eigen::VectorXd coef_;
    std::vector<double> source_;
};

/// Y at the given axial positions for one surface concentration per segment.
inline std::vector<double> bed_bulk_profile(const BedParams& bed, std::span<const double> segment_source,
                                            std::span<const double> eta)
{
    BedParams b = bed;
    b.segments = segment_source.size();
    BedBulkSolver solver(b);
    solver.solve(segment_source);
    std::vector<double> y(eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i)
        y[i] = solver.value(eta[i]);
    return y;
}

/// Bed state: bulk concentration at the pellet positions (segment
/// midpoints) and the radial conversion field of each pellet.
struct BedState
{
    double tau = 0.0;
    std::vector<double> axial_nodes;
    std::vector<double> bulk_Y;
    std::vector<std::vector<double>> conversion;
    SpatialGrid grid{};
};

struct BedOptions
{
    std::size_t radial_nodes = SpatialGrid::default_nodes;
    /// Number of output samples over [0, tau_end] including both ends.
    std::size_t samples = 101;
    /// Resolution of the fine axial grid used to locate the Y = 0.5 front.
    std::size_t front_resolution = 2001;
    /// Compare every bulk profile with the finite-difference oracle and
    /// throw if they differ by more than `verify_tol`.
    bool verify_bulk = false;
    double verify_tol = 1e-4;
    std::size_t verify_nodes = 401;
};

struct BedResult
{
    std::vector<double> tau;
    std::vector<double> eta;
    std::vector<std::vector<double>> Y;
    std::vector<std::vector<double>> C_Y;
    std::vector<std::vector<double>> X_surface;
    std::vector<std::vector<double>> X_pellet_avg;
    /// Position where Y = 0.5 (length if Y > 0.5 everywhere).
    std::vector<double> front;
    BedRoots roots;
    double max_oracle_gap = 0.0;
};

inline BedState initial_bed(const BedParams& bed, const BedOptions& o = {})
{
    bed.check();
    BedState s;
    s.grid = SpatialGrid(o.radial_nodes);
    for (std::size_t j = 0; j < bed.segments; ++j)
        s.axial_nodes.push_back((static_cast<double>(j) + 0.5) * bed.length / bed.segments);
    s.bulk_Y.assign(bed.segments, 1.0);
    s.conversion.assign(bed.segments, std::vector<double>(s.grid.size(), 0.0));
    return s;
}

namespace detail {

inline double front_position(const BedBulkSolver& solver, double length, std::size_t resolution)
{
    double prev = solver.value(0.0);
    if (prev <= 0.5)
        return 0.0;
    for (std::size_t i = 1; i < resolution; ++i) {
        const double eta = length * static_cast<double>(i) / static_cast<double>(resolution - 1);
        const double y = solver.value(eta);
        if (y <= 0.5) {
            const double eta0 = length * static_cast<double>(i - 1) / static_cast<double>(resolution - 1);
            return eta0 + (prev - 0.5) / (prev - y) * (eta - eta0);
        }
        prev = y;
    }
    return length;
}

inline double pellet_average(const std::vector<double>& x, const SpatialGrid& grid)
{
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        f[i] = grid[i] * grid[i] * x[i];
    return clamp_unit(3.0 * num::simpson(f, grid.spacing()));
}

} // namespace detail

/// Marches the bed from a fresh state to `tau_end` with step `dtau`. Each
/// step freezes M = phi sqrt(1 - X) per radial node, solves the coupled
/// surface concentrations of all segments together with the bulk profile,
/// and then advances X = 1 - (1 - X) exp(-a dtau) node-wise.
inline BedResult march_bed(const BedParams& bed, double dtau, double tau_end, const BedOptions& o = {})
{
    bed.check();
    if (!(dtau > 0.0))
        throw ConfigError("dtau must be positive", "dtau");
    if (!(tau_end > 0.0))
        throw ConfigError("tau_end must be positive", "tau_end");
    if (o.samples < 2)
        throw ConfigError("sample count must be at least 2", "samples");

    BedState st = initial_bed(bed, o);
    BedBulkSolver solver(bed);
    const std::size_t n = bed.segments;
    const std::size_t nr = st.grid.size();

    // Affine map from segment sources to midpoint concentrations,
    // Y_mid = y0 + G s, computed once.
    std::vector<double> zeros(n, 0.0);
    solver.solve(zeros);
    Eigen::VectorXd y0(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
        y0(static_cast<Eigen::Index>(j)) = solver.value(solver.midpoint(j));
    Eigen::MatrixXd G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> unit(n, 0.0);
        unit[k] = 1.0;
        solver.solve(unit);
        for (std::size_t j = 0; j < n; ++j)
            G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                solver.value(solver.midpoint(j)) - y0(static_cast<Eigen::Index>(j));
    }

    BedResult res;
    res.roots = solver.roots();
    res.eta = st.axial_nodes;

    std::vector<double> source(n, 0.0);
    std::vector<std::vector<double>> moduli(n, std::vector<double>(nr));
    auto update_bulk = [&]() {
        Eigen::VectorXd kappa(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < nr; ++i)
                moduli[j][i] = bed.phi * std::sqrt(std::max(0.0, 1.0 - st.conversion[j][i]));
            kappa(static_cast<Eigen::Index>(j)) = pellet_surface_ratio(moduli[j][nr - 1], bed.biot);
        }
        // s = K (y0 + G s)
        Eigen::MatrixXd A = -(kappa.asDiagonal() * G);
        A.diagonal().array() += 1.0;
        const Eigen::VectorXd s = A.partialPivLu().solve(kappa.cwiseProduct(y0));
        for (std::size_t j = 0; j < n; ++j)
            source[j] = s(static_cast<Eigen::Index>(j));
        solver.solve(source);
        for (std::size_t j = 0; j < n; ++j)
            st.bulk_Y[j] = solver.value(solver.midpoint(j));
        if (o.verify_bulk) {
            FdControl c;
            c.n_space = o.verify_nodes;
            auto ref = fd_solve_bed_bulk(bed, source, c);
            for (std::size_t i = 0; i < ref.eta.size(); ++i)
                res.max_oracle_gap = std::max(res.max_oracle_gap, std::abs(solver.value(ref.eta[i]) - ref.y[i]));
            if (res.max_oracle_gap > o.verify_tol)
                throw SolverError("closed-form bulk profile departs from the finite-difference oracle by " +
                                  std::to_string(res.max_oracle_gap));
        }
    };

    auto record = [&]() {
        res.tau.push_back(st.tau);
        res.Y.push_back(st.bulk_Y);
        std::vector<double> xs(n), xa(n);
        for (std::size_t j = 0; j < n; ++j) {
            xs[j] = st.conversion[j][nr - 1];
            xa[j] = detail::pellet_average(st.conversion[j], st.grid);
        }
        res.X_surface.push_back(std::move(xs));
        res.X_pellet_avg.push_back(std::move(xa));
        res.front.push_back(detail::front_position(solver, bed.length, o.front_resolution));
    };

    update_bulk();
    record();
    for (std::size_t k = 1; k < o.samples; ++k) {
        const double t_next = tau_end * static_cast<double>(k) / static_cast<double>(o.samples - 1);
        const int steps = std::max(1, static_cast<int>(std::ceil((t_next - st.tau) / dtau - 1e-9)));
        const double h = (t_next - st.tau) / steps;
        for (int q = 0; q < steps; ++q) {
            for (std::size_t j = 0; j < n; ++j) {
                const GasProfile a = bed_pellet_profile(moduli[j], st.bulk_Y[j], bed.biot, st.grid);
                for (std::size_t i = 0; i < nr; ++i) {
                    const double x = st.conversion[j][i];
                    st.conversion[j][i] = std::max(x, 1.0 - (1.0 - x) * std::exp(-a.values[i] * h));
                }
            }
            st.tau += h;
            update_bulk();
        }
        st.tau = t_next;
        record();
    }
    res.C_Y = cumulative_bulk_concentration(res.tau, res.Y);
    return res;
}

} // namespace qmsolid
