#pragma once

/// \file reference_fd.hpp
/// Finite-volume reference solver for the coupled gas/solid pellet
/// equations and a finite-difference solver for the axial bulk-gas balance
/// of a packed bed. Shares no profile code with the closed-form kernels;
/// it is used to check them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"

namespace qmsolid {

enum class TimeScheme
{
    CrankNicolson,
    BackwardEuler
};

struct FdControl
{
    std::size_t n_space = 401;
    double dtheta = 1e-3;
    TimeScheme scheme = TimeScheme::CrankNicolson;
    /// Output samples, evenly spaced over [0, theta_end].
    std::size_t samples = 501;
    /// Successive step halvings must agree on X to this tolerance.
    double convergence_tol = 1e-4;
    int max_halvings = 5;
    /// When false a single run at `dtheta` is returned without refinement.
    bool refine = true;

    void check() const
    {
        if (n_space < 3 || n_space % 2 == 0)
            throw ConfigError("n_space must be odd and >= 3", "n_space");
        if (!(dtheta > 0.0))
            throw ConfigError("dtheta must be positive", "dtheta");
        if (samples < 2)
            throw ConfigError("sample count must be at least 2", "samples");
    }
};

/// Per-run conservation diagnostics of the reference solver.
struct FdDiagnostics
{
    /// Largest per-step gap between the surface flux and the integrated
    /// consumption, relative to max(1, flux).
    double max_flux_residual = 0.0;
    /// Largest gap between finite-volume conversion and the time integral
    /// of the consumption rate converted to solid units (quasi-steady only).
    double max_balance_error = 0.0;
    double dtheta_used = 0.0;
    int halvings = 0;
};

struct FdRun
{
    RunResult result;
    FdDiagnostics diagnostics;
};

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored.
inline std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                             std::vector<double> upper, std::vector<double> rhs)
{
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0 || !std::isfinite(diag[i - 1]))
            throw SolverError("singular tridiagonal system at row " + std::to_string(i - 1));
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0 || !std::isfinite(diag[n - 1]))
        throw SolverError("singular tridiagonal system at row " + std::to_string(n - 1));
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    return x;
}

namespace fd {

// Radial finite-volume mesh: node i owns [y_i - h/2, y_i + h/2] clipped to
// [0, 1]; volumes and face areas carry the y^(F_p - 1) weight.
struct Mesh
{
    std::size_t n = 0;
    double h = 0.0;
    int fp = 3;
    std::vector<double> y;
    std::vector<double> volume;
    std::vector<double> face; // face[i] sits between nodes i and i+1

    Mesh(std::size_t n_, int fp_)
        : n(n_), h(1.0 / static_cast<double>(n_ - 1)), fp(fp_), y(n_), volume(n_), face(n_ - 1)
    {
        auto cap = [&](double r) { return std::pow(r, fp) / fp; };
        for (std::size_t i = 0; i < n; ++i)
            y[i] = static_cast<double>(i) * h;
        y[n - 1] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = i == 0 ? 0.0 : y[i] - 0.5 * h;
            const double hi = i + 1 == n ? 1.0 : y[i] + 0.5 * h;
            volume[i] = cap(hi) - cap(lo);
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
            face[i] = std::pow(y[i] + 0.5 * h, fp - 1);
    }

    double remaining(std::span<const double> s) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += volume[i] * s[i];
        return fp * acc;
    }
};

// Solid state of the reference solver. `s` is b, r* or (nucleation) the
// exposure g; `sa` is b_A for the simultaneous model.
struct Solid
{
    std::vector<double> s;
    std::vector<double> sa;
};

// Model physics written from the rate equations.
struct Physics
{
    ModelParams p;

    bool grain() const
    {
        return p.kind == ModelKind::GrainSimple || p.kind == ModelKind::GrainProductLayer ||
               p.kind == ModelKind::GrainModified;
    }

    Solid initial(std::size_t n) const
    {
        Solid st;
        st.s.assign(n, p.kind == ModelKind::Nucleation ? 0.0 : 1.0);
        if (p.kind == ModelKind::Simultaneous)
            st.sa.assign(n, 1.0);
        return st;
    }

    // b (or r*) of node value v.
    double solid_value(double v) const
    {
        if (p.kind == ModelKind::Nucleation)
            return std::exp(-std::pow(std::max(v, 0.0), p.nucleation_order));
        return v;
    }

    double grain_outer(double r) const { return std::cbrt(p.z_ratio + (1.0 - p.z_ratio) * r * r * r); }

    // Product-layer resistance of one grain, 1 + 6 sg2 (r - r^2/r_outer).
    double grain_resistance(double r) const
    {
        if (p.kind == ModelKind::GrainProductLayer)
            return 1.0 + 6.0 * p.grain_thiele_sq * (r - r * r);
        if (p.kind == ModelKind::GrainModified)
            return 1.0 + 6.0 * p.grain_thiele_sq * (r - r * r / grain_outer(r));
        return 1.0;
    }

    double rpm_surface(double b) const
    {
        return std::sqrt(1.0 - p.structural_psi * std::log(std::max(b, 1e-300)));
    }
    double rpm_denominator(double b) const
    {
        // 1 + (beta Z/Psi)(sqrt(1 - Psi ln b) - 1) with the Psi -> 0 limit
        // taken analytically: (s - 1)/Psi = -ln b/(s + 1).
        const double s = rpm_surface(b);
        return 1.0 - p.beta_rpm * p.z_ratio * std::log(std::max(b, 1e-300)) / (s + 1.0);
    }

    // Relative pore diffusivity at a node.
    double diffusivity(double v) const
    {
        double q = 1.0;
        if (p.kind == ModelKind::GrainModified) {
            const double r = v;
            q = 1.0 - ((1.0 - p.porosity0) / p.porosity0) * (p.z_ratio - 1.0) * (1.0 - r * r * r);
        }
        else if (p.kind == ModelKind::RandomPore) {
            q = 1.0 - (p.z_ratio - 1.0) * (1.0 - p.porosity0) * (1.0 - v) / p.porosity0;
        }
        q = std::max(q, 0.0);
        return q * q;
    }

    // First-order sink coefficient of gas `which` (0 = A/single, 1 = C).
    double sink(double v, int which = 0) const
    {
        const double t2 = p.thiele * p.thiele;
        switch (p.kind) {
        case ModelKind::VolumeFirstOrder: return t2 * std::max(v, 0.0);
        case ModelKind::VolumeHalfOrder: return t2 * std::sqrt(std::max(v, 0.0));
        case ModelKind::GrainSimple:
            return v > 0.0 ? t2 * std::pow(v, p.grain.shape_factor() - 1) : 0.0;
        case ModelKind::GrainProductLayer:
        case ModelKind::GrainModified: return v > 0.0 ? t2 * v * v / grain_resistance(v) : 0.0;
        case ModelKind::RandomPore: return t2 * v * rpm_surface(v) / rpm_denominator(v);
        case ModelKind::Nucleation: {
            const int n = p.nucleation_order;
            const double g = std::max(v, 0.0);
            return 2.0 * p.pellet.shape_factor() * t2 * n * std::exp(-std::pow(g, n)) * std::pow(g, n - 1);
        }
        case ModelKind::Simultaneous: {
            const double s = which == 0 ? p.thiele_a : p.thiele_c;
            return 2.0 * p.pellet.shape_factor() * s * s * std::max(v, 0.0);
        }
        }
        return 0.0;
    }

    // Gas consumed per unit of solid converted; dX/dtheta = balance * (total sink flux).
    double balance(int which = 0) const
    {
        const double t2 = p.thiele * p.thiele;
        switch (p.kind) {
        case ModelKind::VolumeFirstOrder:
        case ModelKind::VolumeHalfOrder:
        case ModelKind::RandomPore: return 1.0 / t2;
        case ModelKind::GrainSimple: return p.grain.shape_factor() / t2;
        case ModelKind::GrainProductLayer:
        case ModelKind::GrainModified: return 3.0 / t2;
        case ModelKind::Nucleation: return 1.0 / (2.0 * p.pellet.shape_factor() * t2);
        case ModelKind::Simultaneous: {
            const double s = which == 0 ? p.thiele_a : p.thiele_c;
            return 1.0 / (2.0 * p.pellet.shape_factor() * s * s);
        }
        }
        return 0.0;
    }

    // Time derivative of the stored solid variable at one node.
    double rate(double v, double a, double a2 = 0.0) const
    {
        a = std::max(a, 0.0);
        switch (p.kind) {
        case ModelKind::VolumeFirstOrder: return -a * std::max(v, 0.0);
        case ModelKind::VolumeHalfOrder: return -a * std::sqrt(std::max(v, 0.0));
        case ModelKind::GrainSimple: return v > 0.0 ? -a : 0.0;
        case ModelKind::GrainProductLayer:
        case ModelKind::GrainModified: return v > 0.0 ? -a / grain_resistance(v) : 0.0;
        case ModelKind::RandomPore:
            return v > 0.0 ? -a * v * rpm_surface(v) / rpm_denominator(v) : 0.0;
        case ModelKind::Nucleation: return a;
        case ModelKind::Simultaneous: return -(a + std::max(a2, 0.0)) * std::max(v, 0.0);
        }
        return 0.0;
    }

    double clamp(double v) const
    {
        if (p.kind == ModelKind::Nucleation)
            return std::max(v, 0.0);
        return std::clamp(v, 0.0, 1.0);
    }

    // Remaining-solid integrand at one node.
    double integrand(double v) const
    {
        const double b = solid_value(v);
        return grain() ? std::pow(b, p.grain.shape_factor()) : b;
    }
};

// Assembles the discrete operator -div(delta grad) + k for one gas.
struct Operator
{
    std::vector<double> lower, diag, upper;
};

inline Operator assemble(const Mesh& m, std::span<const double> delta, std::span<const double> k)
{
    Operator op;
    op.lower.assign(m.n, 0.0);
    op.diag.assign(m.n, 0.0);
    op.upper.assign(m.n, 0.0);
    for (std::size_t i = 0; i + 1 < m.n; ++i) {
        const double w = m.face[i] * 0.5 * (delta[i] + delta[i + 1]) / m.h;
        op.diag[i] += w;
        op.upper[i] -= w;
        op.diag[i + 1] += w;
        op.lower[i + 1] -= w;
    }
    for (std::size_t i = 0; i < m.n; ++i)
        op.diag[i] += k[i] * m.volume[i];
    return op;
}

// Quasi-steady gas profile for surface value `bulk`.
inline std::vector<double> solve_quasi_steady(const Mesh& m, std::span<const double> delta, std::span<const double> k,
                                              const SurfaceCondition& surface, double bulk)
{
    Operator op = assemble(m, delta, k);
    std::vector<double> rhs(m.n, 0.0);
    const std::size_t last = m.n - 1;
    if (is_dirichlet(surface)) {
        op.lower[last] = 0.0;
        op.diag[last] = 1.0;
        rhs[last] = bulk;
    }
    else {
        // delta a' = sh (1 - a) at y = 1 enters as a surface flux.
        const double sh = std::get<FilmResistance>(surface).sherwood;
        op.diag[last] += sh;
        rhs[last] = sh * bulk;
    }
    return solve_tridiagonal(op.lower, op.diag, op.upper, rhs);
}

// Flux entering through y = 1 and the total consumption, both scaled by F_p.
inline std::pair<double, double> flux_pair(const Mesh& m, std::span<const double> delta, std::span<const double> k,
                                           std::span<const double> a)
{
    const std::size_t last = m.n - 1;
    const double w = m.face[last - 1] * 0.5 * (delta[last - 1] + delta[last]) / m.h;
    const double surface_flux = m.fp * (w * (a[last] - a[last - 1]) + k[last] * m.volume[last] * a[last]);
    double consumption = 0.0;
    for (std::size_t i = 0; i < m.n; ++i)
        consumption += k[i] * m.volume[i] * a[i];
    return {surface_flux, m.fp * consumption};
}

inline double surface_flux_robin(const SurfaceCondition& s, double a_surface)
{
    return std::get<FilmResistance>(s).sherwood * (1.0 - a_surface);
}

struct Integrator
{
    const Physics& phys;
    const Mesh& mesh;
    FdDiagnostics diag;

    std::vector<double> deltas(const Solid& st) const
    {
        std::vector<double> d(mesh.n);
        for (std::size_t i = 0; i < mesh.n; ++i)
            d[i] = phys.diffusivity(st.s[i]);
        return d;
    }
    std::vector<double> sinks(const Solid& st, int which) const
    {
        std::vector<double> k(mesh.n);
        for (std::size_t i = 0; i < mesh.n; ++i)
            k[i] = phys.sink(st.s[i], which);
        return k;
    }

    // Gas profiles for the current solid (one or two gases) and the total
    // consumption in solid units.
    struct Gas
    {
        std::vector<double> a, c;
        double consumption = 0.0;
    };

    Gas gas(const Solid& st)
    {
        Gas g;
        const auto d = deltas(st);
        const bool two = phys.p.kind == ModelKind::Simultaneous;
        auto one = [&](int which, double bulk, std::vector<double>& out) {
            const auto k = sinks(st, which);
            out = solve_quasi_steady(mesh, d, k, phys.p.surface, bulk);
            auto [flux, consumed] = flux_pair(mesh, d, k, out);
            if (!is_dirichlet(phys.p.surface))
                flux = mesh.fp * surface_flux_robin(phys.p.surface, out.back());
            note_flux(flux, consumed);
            // With a zero modulus the gas is not depleted and the solid
            // consumption cannot be recovered from the gas flux.
            const double bal = phys.balance(which);
            return std::isfinite(bal) ? bal * consumed : std::numeric_limits<double>::quiet_NaN();
        };
        g.consumption = one(0, two ? phys.p.psi_ab : 1.0, g.a);
        if (two)
            g.consumption += one(1, phys.p.psi_cb(), g.c);
        return g;
    }

    void note_flux(double flux, double consumption)
    {
        const double r = std::abs(flux - consumption) / std::max(1.0, std::abs(flux));
        diag.max_flux_residual = std::max(diag.max_flux_residual, r);
    }

    Solid advance(const Solid& st, const Gas& g, double dt, const Gas* g2 = nullptr, const Solid* st2 = nullptr) const
    {
        Solid out = st;
        for (std::size_t i = 0; i < mesh.n; ++i) {
            const double c0 = g.c.empty() ? 0.0 : g.c[i];
            double f = phys.rate(st.s[i], g.a[i], c0);
            double fa = 0.0;
            if (!st.sa.empty())
                fa = -std::max(g.a[i], 0.0) * std::max(st.s[i], 0.0);
            if (g2) {
                const double c1 = g2->c.empty() ? 0.0 : g2->c[i];
                f = 0.5 * (f + phys.rate(st2->s[i], g2->a[i], c1));
                if (!st.sa.empty())
                    fa = 0.5 * (fa - std::max(g2->a[i], 0.0) * std::max(st2->s[i], 0.0));
            }
            out.s[i] = phys.clamp(st.s[i] + dt * f);
            if (!st.sa.empty())
                out.sa[i] = std::clamp(st.sa[i] + dt * fa, 0.0, 1.0);
        }
        return out;
    }
};

inline double conversion_of(const Physics& phys, const Mesh& mesh, const Solid& st)
{
    std::vector<double> f(mesh.n);
    for (std::size_t i = 0; i < mesh.n; ++i) {
        const double y = mesh.y[i];
        f[i] = phys.integrand(st.s[i]) * (mesh.fp == 3 ? y * y : 1.0);
    }
    return clamp_unit(1.0 - mesh.fp * num::simpson(f, mesh.h));
}

inline double conversion_a_of(const Mesh& mesh, const Solid& st)
{
    std::vector<double> f(mesh.n);
    for (std::size_t i = 0; i < mesh.n; ++i) {
        const double y = mesh.y[i];
        f[i] = st.sa[i] * (mesh.fp == 3 ? y * y : 1.0);
    }
    return clamp_unit(1.0 - mesh.fp * num::simpson(f, mesh.h));
}

inline double fv_conversion(const Physics& phys, const Mesh& mesh, const Solid& st)
{
    std::vector<double> f(mesh.n);
    for (std::size_t i = 0; i < mesh.n; ++i)
        f[i] = phys.integrand(st.s[i]);
    return 1.0 - mesh.remaining(f);
}

// Quasi-steady run with a trapezoidal (Heun) solid update.
inline FdRun run_quasi_steady(const Physics& phys, double theta_end, const FdControl& ctl, double dt_max)
{
    const Mesh mesh(ctl.n_space, phys.p.pellet.shape_factor());
    Integrator integ{phys, mesh, {}};
    Solid st = phys.initial(mesh.n);
    FdRun run;
    run.result.series.kind = phys.p.kind;
    const bool two = phys.p.kind == ModelKind::Simultaneous;
    double theta = 0.0;
    double consumed = 0.0;
    auto record = [&]() {
        run.result.series.theta.push_back(theta);
        run.result.series.x.push_back(conversion_of(phys, mesh, st));
        if (two)
            run.result.series.x_a.push_back(conversion_a_of(mesh, st));
    };
    record();
    auto g0 = integ.gas(st);
    for (std::size_t k = 1; k < ctl.samples; ++k) {
        const double t_next = theta_end * static_cast<double>(k) / static_cast<double>(ctl.samples - 1);
        const int steps = std::max(1, static_cast<int>(std::ceil((t_next - theta) / dt_max - 1e-9)));
        const double dt = (t_next - theta) / steps;
        for (int j = 0; j < steps; ++j) {
            const Solid pred = integ.advance(st, g0, dt);
            const auto g1 = integ.gas(pred);
            const Solid next = integ.advance(st, g0, dt, &g1, &pred);
            auto g2 = integ.gas(next);
            consumed += 0.5 * dt * (g0.consumption + g2.consumption);
            st = next;
            g0 = std::move(g2);
            theta += dt;
            if (std::isfinite(consumed)) {
                const double err = std::abs(fv_conversion(phys, mesh, st) - consumed);
                integ.diag.max_balance_error = std::max(integ.diag.max_balance_error, err);
            }
        }
        theta = t_next;
        record();
    }
    run.diagnostics = integ.diag;
    run.diagnostics.dtheta_used = dt_max;
    return run;
}

// Unsteady run: Crank-Nicolson (or backward Euler) for the gas with the
// solid advanced by a trapezoidal rule on the old and new gas. The first
// step is taken as four backward-Euler substeps to damp the start-up
// discontinuity between the gas-free interior and the surface.
inline FdRun run_unsteady(const Physics& phys, double theta_end, const FdControl& ctl, double dt_max)
{
    const Mesh mesh(ctl.n_space, phys.p.pellet.shape_factor());
    Integrator integ{phys, mesh, {}};
    Solid st = phys.initial(mesh.n);
    const double c = phys.p.accumulation_psi * phys.p.thiele * phys.p.thiele;
    std::vector<double> a(mesh.n, 0.0);
    a.back() = 1.0;
    FdRun run;
    run.result.series.kind = phys.p.kind;
    double theta = 0.0;
    run.result.series.theta.push_back(0.0);
    run.result.series.x.push_back(0.0);
    bool first = true;

    auto gas_step = [&](const Solid& s, double dt, double implicit) {
        const auto d = integ.deltas(s);
        const auto k = integ.sinks(s, 0);
        Operator op = assemble(mesh, d, k);
        const std::size_t n = mesh.n;
        std::vector<double> lo(n), di(n), up(n), rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double mass = c * mesh.volume[i] / dt;
            lo[i] = implicit * op.lower[i];
            di[i] = mass + implicit * op.diag[i];
            up[i] = implicit * op.upper[i];
            double la = op.diag[i] * a[i];
            if (i > 0)
                la += op.lower[i] * a[i - 1];
            if (i + 1 < n)
                la += op.upper[i] * a[i + 1];
            rhs[i] = mass * a[i] - (1.0 - implicit) * la;
        }
        if (is_dirichlet(phys.p.surface)) {
            lo[n - 1] = 0.0;
            di[n - 1] = 1.0;
            rhs[n - 1] = 1.0;
        }
        else {
            const double sh = std::get<FilmResistance>(phys.p.surface).sherwood;
            di[n - 1] += implicit * sh;
            rhs[n - 1] += sh - (1.0 - implicit) * sh * a[n - 1];
        }
        return solve_tridiagonal(lo, di, up, rhs);
    };

    auto full_step = [&](double dt, double implicit) {
        const std::vector<double> a_old = a;
        a = gas_step(st, dt, implicit);
        Integrator::Gas g_old{a_old, {}, 0.0};
        Integrator::Gas g_new{a, {}, 0.0};
        const Solid pred = integ.advance(st, g_old, dt);
        st = integ.advance(st, g_old, dt, &g_new, &pred);
    };

    for (std::size_t k = 1; k < ctl.samples; ++k) {
        const double t_next = theta_end * static_cast<double>(k) / static_cast<double>(ctl.samples - 1);
        const int steps = std::max(1, static_cast<int>(std::ceil((t_next - theta) / dt_max - 1e-9)));
        const double dt = (t_next - theta) / steps;
        for (int j = 0; j < steps; ++j) {
            if (first || ctl.scheme == TimeScheme::BackwardEuler) {
                const int sub = first ? 4 : 1;
                for (int q = 0; q < sub; ++q)
                    full_step(dt / sub, 1.0);
                first = false;
            }
            else {
                full_step(dt, 0.5);
            }
            theta += dt;
        }
        theta = t_next;
        run.result.series.theta.push_back(theta);
        run.result.series.x.push_back(conversion_of(phys, mesh, st));
    }
    run.diagnostics = integ.diag;
    run.diagnostics.dtheta_used = dt_max;
    return run;
}

} // namespace fd

/// Reference solution with automatic time-step halving: the step is halved
/// until two successive refinements agree on every sampled X within
/// `ctl.convergence_tol`.
inline FdRun fd_solve_detailed(const ModelParams& params, double theta_end, const FdControl& ctl = {})
{
    ctl.check();
    validate(params);
    if (!(theta_end >= 0.0))
        throw ConfigError("theta_end must be nonnegative", "theta_end");
    const fd::Physics phys{params};
    if (theta_end == 0.0) {
        FdRun r;
        r.result.series.kind = params.kind;
        r.result.series.theta = {0.0};
        r.result.series.x = {0.0};
        if (params.kind == ModelKind::Simultaneous)
            r.result.series.x_a = {0.0};
        return r;
    }
    auto once = [&](double dt) {
        return params.quasi_steady() ? fd::run_quasi_steady(phys, theta_end, ctl, dt)
                                     : fd::run_unsteady(phys, theta_end, ctl, dt);
    };
    double dt = ctl.dtheta;
    FdRun coarse = once(dt);
    if (!ctl.refine)
        return coarse;
    double last_gap = 0.0;
    for (int k = 1; k <= ctl.max_halvings; ++k) {
        dt *= 0.5;
        FdRun fine = once(dt);
        last_gap = compare_series(fine.result.series, coarse.result.series).max_abs_dX;
        fine.diagnostics.halvings = k;
        if (last_gap <= ctl.convergence_tol)
            return fine;
        coarse = std::move(fine);
    }
    throw SolverError("reference solver did not converge: successive step halvings still differ by " +
                      std::to_string(last_gap) + " in X after " + std::to_string(ctl.max_halvings) +
                      " halvings (dtheta " + std::to_string(dt) + ")");
}

inline RunResult fd_solve(const ModelParams& params, double theta_end, const FdControl& ctl = {})
{
    return fd_solve_detailed(params, theta_end, ctl).result;
}

/// Axial bulk-gas profile on a uniform grid of `ctl.n_space` nodes over
/// [0, length] by central differences with ghost nodes for the Danckwerts
/// inlet and the closed outlet. `segment_source` holds the pellet surface
/// concentration of each of its equal-length axial segments; each node
/// sees the cell average of that piecewise-constant source.
struct BedBulkSolution
{
    std::vector<double> eta;
    std::vector<double> y;
};

inline BedBulkSolution fd_solve_bed_bulk(const BedParams& bed, std::span<const double> segment_source,
                                         const FdControl& ctl = {})
{
    bed.check();
    if (segment_source.empty())
        throw ConfigError("bed source needs at least one segment", "segments");
    const std::size_t n = ctl.n_space;
    if (n < 3)
        throw ConfigError("n_space must be >= 3", "n_space");
    const double L = bed.length;
    const double h = L / static_cast<double>(n - 1);
    const double seg = L / static_cast<double>(segment_source.size());
    const double pe = bed.peclet, beta = bed.beta;

    auto source_average = [&](double lo, double hi) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, L);
        double acc = 0.0;
        std::size_t j = std::min(segment_source.size() - 1, static_cast<std::size_t>(lo / seg));
        double x = lo;
        while (x < hi - 1e-15 * L) {
            const double end = std::min(hi, (j + 1) * seg);
            acc += segment_source[std::min(j, segment_source.size() - 1)] * (end - x);
            x = end;
            ++j;
        }
        return acc / (hi - lo);
    };

    BedBulkSolution out;
    out.eta.resize(n);
    std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
    const double cm = 1.0 / (h * h) + pe / (2.0 * h);
    const double cp = 1.0 / (h * h) - pe / (2.0 * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = static_cast<double>(i) * h;
        out.eta[i] = eta;
        const double s = source_average(eta - 0.5 * h, eta + 0.5 * h);
        // Y'' - Pe Y' - beta Y = -beta s
        lo[i] = cm;
        up[i] = cp;
        di[i] = -2.0 / (h * h) - beta;
        rhs[i] = -beta * s;
    }
    // Inlet ghost: Y_{-1} = Y_1 - 2 h Pe (Y_0 - 1)
    di[0] += cm * (-2.0 * h * pe);
    up[0] += cm;
    rhs[0] -= cm * 2.0 * h * pe;
    lo[0] = 0.0;
    // Outlet ghost: Y_n = Y_{n-2}
    lo[n - 1] += cp;
    up[n - 1] = 0.0;
    out.y = solve_tridiagonal(lo, di, up, rhs);
    return out;
}

} // namespace qmsolid
