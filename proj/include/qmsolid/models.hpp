#pragma once

/// \file models.hpp
/// Quantized-method steppers. Each step freezes a modified Thiele modulus
/// per node from the lagged solid, evaluates the closed-form gas profile,
/// and advances every node's solid through its model's closed-form law over
/// the increment. Steps are subdivided internally so that no node loses
/// more than `decrement_cap` of solid per substep.

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "kernels.hpp"
#include "laws.hpp"

namespace qmsolid {

enum class StepStatus
{
    Ok,
    SeriesWarning,
    Exhausted,
    PorePlugged
};

inline const char* to_string(StepStatus s)
{
    switch (s) {
    case StepStatus::Ok: return "Ok";
    case StepStatus::SeriesWarning: return "SeriesWarning";
    case StepStatus::Exhausted: return "Exhausted";
    case StepStatus::PorePlugged: return "PorePlugged";
    }
    return "?";
}

struct StepReport
{
    double theta_after = 0.0;
    double max_solid_decrement = 0.0;
    bool stage_switched = false;
    StepStatus status = StepStatus::Ok;
};

struct StepControl
{
    double decrement_cap = 0.01;
    double solid_floor = 1e-12;
    SeriesControl series{};
};

struct StepResult
{
    PelletState state;
    GasProfile gas;
    StepReport report;
};

inline PelletState initial_state(const ModelParams& p, const SpatialGrid& grid = SpatialGrid{})
{
    PelletState s;
    s.grid = grid;
    s.solid.assign(grid.size(), 1.0);
    s.exposure.assign(grid.size(), 0.0);
    if (p.kind == ModelKind::Simultaneous)
        s.solid_a.assign(grid.size(), 1.0);
    return s;
}

namespace detail {

struct Trial
{
    PelletState next;
    GasProfile gas;
    double h = 0.0;
    double max_decrement = 0.0;
    bool switched = false;
    StepStatus status = StepStatus::Ok;
};

inline StepStatus worst(StepStatus a, StepStatus b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

template <SolidLaw L>
Trial first_stage_trial(const L& law, const ModelParams& p, const PelletState& s, double h, const StepControl& ctl)
{
    const std::size_t n = s.grid.size();
    const PelletGeometry g = p.pellet;
    std::vector<double> dE(n, 0.0);
    Trial t;
    t.gas.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = s.grid[i];
        if (law.plugged(s.solid[i])) {
            t.status = worst(t.status, StepStatus::PorePlugged);
            continue;
        }
        const double M = law.modulus(s.solid[i], s.exposure[i]);
        if (p.quasi_steady()) {
            const double a = qss_value(M, y, g) * film_factor(M, law.film_coefficient(s.solid[i]));
            t.gas.values[i] = a;
            dE[i] = a * h;
        }
        else {
            const double c = law.relaxation(s.solid[i]);
            const auto e = unsteady_exposure(M, y, s.theta, s.theta + h, c, g, ctl.series);
            const auto v = unsteady_value(M, y, s.theta + h, c, g, ctl.series);
            dE[i] = e.value;
            t.gas.values[i] = v.value;
            if (!e.converged || !v.converged)
                t.status = worst(t.status, StepStatus::SeriesWarning);
        }
    }

    // Land exactly on the exhaustion of the outer surface.
    const double ec = law.exhaustion_exposure();
    if (std::isfinite(ec) && h > 0.0) {
        const double es = s.exposure[n - 1];
        if (es + dE[n - 1] >= ec) {
            const double rate = dE[n - 1] / h;
            const double h2 = (ec - es) / rate;
            if (h2 < h) {
                Trial landed = first_stage_trial(law, p, s, h2, ctl);
                landed.next.exposure[n - 1] = ec;
                landed.next.solid[n - 1] = law.solid(ec);
                landed.switched = true;
                return landed;
            }
            t.switched = true;
        }
    }

    t.h = h;
    t.next = s;
    t.next.theta = s.theta + h;
    for (std::size_t i = 0; i < n; ++i) {
        if (dE[i] == 0.0)
            continue;
        double E = s.exposure[i] + dE[i];
        if (std::isfinite(ec))
            E = std::min(E, ec);
        double b = std::min(s.solid[i], law.solid(E));
        if (b < ctl.solid_floor)
            b = std::isfinite(ec) && E >= ec ? 0.0 : b;
        t.max_decrement = std::max(t.max_decrement, s.solid[i] - b);
        t.next.exposure[i] = E;
        t.next.solid[i] = b;
    }
    if (t.switched) {
        t.next.exposure[n - 1] = ec;
        t.next.solid[n - 1] = law.solid(ec);
    }
    return t;
}

template <SolidLaw L>
Trial second_stage_trial(const L& law, const ModelParams& p, const PelletState& s, double h, const StepControl&)
{
    const std::size_t n = s.grid.size();
    const PelletGeometry g = p.pellet;
    const double ec = law.exhaustion_exposure();
    Trial t;
    t.h = h;
    t.next = s;
    t.next.theta = s.theta + h;
    t.gas.values.assign(n, 1.0);

    const double m_front = law.modulus(s.solid[0], s.exposure[0]);
    if (s.y_m <= 0.0 || !(m_front > 0.0)) {
        for (std::size_t i = 0; i < n; ++i) {
            t.next.exposure[i] = ec;
            t.next.solid[i] = law.solid(ec);
        }
        t.next.y_m = 0.0;
        t.status = StepStatus::Exhausted;
        return t;
    }

    const MovingBoundaryParams mb{ec, p.surface};
    const double theta_now = moving_boundary_theta(s.y_m, m_front, g, mb);
    const FrontPosition f = solve_moving_boundary(theta_now + h, m_front, g, mb);
    const double ym = std::min(f.y_m, s.y_m);
    t.next.y_m = ym;
    if (f.status == FrontStatus::Exhausted)
        t.status = StepStatus::Exhausted;

    for (std::size_t i = 0; i < n; ++i) {
        const double y = s.grid[i];
        if (y < ym) {
            const double M = law.modulus(s.solid[i], s.exposure[i]);
            const double a = second_stage_inner(y, ym, M, g, p.surface);
            t.gas.values[i] = a;
            const double E = std::min(ec, s.exposure[i] + a * h);
            const double b = std::min(s.solid[i], law.solid(E));
            t.max_decrement = std::max(t.max_decrement, s.solid[i] - b);
            t.next.exposure[i] = E;
            t.next.solid[i] = b;
        }
        else {
            t.gas.values[i] = ym > 0.0 ? second_stage_outer(y, ym, m_front, g, p.surface) : 1.0;
            t.next.exposure[i] = ec;
            t.next.solid[i] = law.solid(ec);
        }
    }
    return t;
}

inline Trial simultaneous_trial(const ModelParams& p, const PelletState& s, double h, const StepControl&)
{
    const std::size_t n = s.grid.size();
    const double fp2 = 2.0 * p.pellet.shape_factor();
    Trial t;
    t.h = h;
    t.next = s;
    t.next.theta = s.theta + h;
    t.gas.values.assign(n, 0.0);
    t.gas.second.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = s.grid[i];
        const double b = s.solid[i];
        const double ma = p.thiele_a * std::sqrt(fp2 * b);
        const double mc = p.thiele_c * std::sqrt(fp2 * b);
        const double pa = p.psi_ab * qss_value(ma, y, p.pellet);
        const double pc = p.psi_cb() * qss_value(mc, y, p.pellet);
        t.gas.values[i] = pa;
        t.gas.second[i] = pc;
        const double rate = pa + pc;
        if (rate <= 0.0)
            continue;
        const double E = s.exposure[i] + rate * h;
        const double bn = std::min(b, b * std::exp(std::max(-rate * h, min_log_solid)));
        t.next.exposure[i] = E;
        t.next.solid[i] = bn;
        t.next.solid_a[i] = std::max(0.0, s.solid_a[i] - pa / rate * (b - bn));
        t.max_decrement = std::max(t.max_decrement, b - bn);
    }
    return t;
}

template <class TrialFn>
StepResult drive(const PelletState& s0, double dtheta, const StepControl& ctl, double exhaustion, TrialFn&& trial)
{
    if (!(dtheta >= 0.0) || !std::isfinite(dtheta))
        throw ConfigError("step size must be a finite nonnegative number", "dtheta");
    StepResult out;
    out.report.theta_after = s0.theta;
    if (dtheta == 0.0) {
        Trial t = trial(s0, 0.0);
        out.state = s0;
        out.gas = std::move(t.gas);
        out.report.status = t.status == StepStatus::PorePlugged || t.status == StepStatus::SeriesWarning
                                ? t.status
                                : (s0.stage == Stage::Second && s0.y_m <= 0.0 ? StepStatus::Exhausted
                                                                              : StepStatus::Ok);
        return out;
    }

    const double target = s0.theta + dtheta;
    const double min_h = std::max(dtheta * 1e-12, 1e-15);
    PelletState cur = s0;
    double h = dtheta;
    const std::size_t last = cur.grid.size() - 1;
    while (true) {
        const double remaining = target - cur.theta;
        if (remaining <= 1e-13 * std::max(1.0, target))
            break;
        if (cur.stage == Stage::First && std::isfinite(exhaustion) &&
            cur.exposure[last] >= exhaustion * (1.0 - 1e-14)) {
            cur.stage = Stage::Second;
            cur.theta_c = cur.theta;
            cur.y_m = 1.0;
            out.report.stage_switched = true;
            continue;
        }
        h = std::min(h, remaining);
        Trial t = trial(cur, h);
        if (t.max_decrement > ctl.decrement_cap && h > min_h) {
            h *= 0.5;
            continue;
        }
        out.report.max_solid_decrement = std::max(out.report.max_solid_decrement, t.max_decrement);
        out.report.status = worst(out.report.status, t.status);
        out.gas = std::move(t.gas);
        const bool full = t.h == h;
        cur = std::move(t.next);
        if (t.switched) {
            cur.stage = Stage::Second;
            cur.theta_c = cur.theta;
            cur.y_m = 1.0;
            out.report.stage_switched = true;
        }
        if (full)
            h = std::min(2.0 * h, dtheta);
    }
    cur.theta = target;
    out.report.theta_after = target;
    if (cur.stage == Stage::Second && cur.y_m <= 0.0)
        out.report.status = worst(out.report.status, StepStatus::Exhausted);
    out.state = std::move(cur);
    return out;
}

} // namespace detail

/// Advances `s` by `dtheta` for any model kind.
inline StepResult step(const PelletState& s, double dtheta, const ModelParams& p, const StepControl& ctl = {})
{
    if (p.kind == ModelKind::Simultaneous) {
        return detail::drive(s, dtheta, ctl, std::numeric_limits<double>::infinity(),
                             [&](const PelletState& cur, double h) { return detail::simultaneous_trial(p, cur, h, ctl); });
    }
    const AnyLaw law = make_law(p);
    return std::visit(
        [&](const auto& l) {
            return detail::drive(s, dtheta, ctl, l.exhaustion_exposure(), [&](const PelletState& cur, double h) {
                return cur.stage == Stage::First ? detail::first_stage_trial(l, p, cur, h, ctl)
                                                 : detail::second_stage_trial(l, p, cur, h, ctl);
            });
        },
        law);
}

namespace detail {

inline void require_kind(const ModelParams& p, std::initializer_list<ModelKind> kinds, const char* op)
{
    for (auto k : kinds)
        if (p.kind == k)
            return;
    throw ConfigError(std::string(op) + " does not handle model kind " + std::string(to_string(p.kind)), "kind");
}

} // namespace detail

inline StepResult step_volume(const PelletState& s, double dtheta, const ModelParams& p, const StepControl& c = {})
{
    detail::require_kind(p, {ModelKind::VolumeFirstOrder, ModelKind::VolumeHalfOrder}, "step_volume");
    return step(s, dtheta, p, c);
}

inline StepResult step_grain_simple(const PelletState& s, double dtheta, const ModelParams& p,
                                    const StepControl& c = {})
{
    detail::require_kind(p, {ModelKind::GrainSimple}, "step_grain_simple");
    return step(s, dtheta, p, c);
}

inline StepResult step_grain_product_layer(const PelletState& s, double dtheta, const ModelParams& p,
                                           const StepControl& c = {})
{
    detail::require_kind(p, {ModelKind::GrainProductLayer}, "step_grain_product_layer");
    return step(s, dtheta, p, c);
}

inline StepResult step_grain_modified(const PelletState& s, double dtheta, const ModelParams& p,
                                      const StepControl& c = {})
{
    detail::require_kind(p, {ModelKind::GrainModified}, "step_grain_modified");
    return step(s, dtheta, p, c);
}

inline StepResult step_random_pore(const PelletState& s, double dtheta, const ModelParams& p,
                                   const StepControl& c = {})
{
    detail::require_kind(p, {ModelKind::RandomPore}, "step_random_pore");
    return step(s, dtheta, p, c);
}

inline StepResult step_nucleation(const PelletState& s, double dtheta, const ModelParams& p,
                                  const StepControl& c = {})
{
    detail::require_kind(p, {ModelKind::Nucleation}, "step_nucleation");
    return step(s, dtheta, p, c);
}

inline StepResult step_simultaneous(const PelletState& s, double dtheta, const ModelParams& p,
                                    const StepControl& c = {})
{
    detail::require_kind(p, {ModelKind::Simultaneous}, "step_simultaneous");
    return step(s, dtheta, p, c);
}

// ---------------------------------------------------------------------------
// Whole runs
// ---------------------------------------------------------------------------

struct RunOptions
{
    std::size_t nodes = SpatialGrid::default_nodes;
    /// Largest step handed to the stepper.
    double dtheta = 1e-3;
    double theta_end = 5.0;
    /// Number of evenly spaced output samples including theta = 0 and theta_end.
    std::size_t samples = 501;
    std::vector<double> snapshot_thetas;
    StepControl control{};

    void check() const
    {
        if (!(theta_end > 0.0))
            throw ConfigError("theta_end must be positive", "theta_end");
        if (samples < 2)
            throw ConfigError("sample count must be at least 2", "samples");
        if (!(dtheta > 0.0))
            throw ConfigError("dtheta must be positive", "dtheta");
    }
};

namespace detail {

inline ProfileSnapshot snapshot_of(const PelletState& s, const GasProfile& gas)
{
    ProfileSnapshot snap;
    snap.theta = s.theta;
    snap.y.assign(s.grid.nodes().begin(), s.grid.nodes().end());
    snap.a = gas.values;
    snap.solid = s.solid;
    return snap;
}

// Sorted schedule of sample and snapshot times with a flag per entry.
struct ScheduleEntry
{
    double theta;
    bool sample;
    bool snapshot;
};

inline std::vector<ScheduleEntry> make_schedule(const RunOptions& o)
{
    std::vector<ScheduleEntry> out;
    for (std::size_t k = 0; k < o.samples; ++k)
        out.push_back({o.theta_end * static_cast<double>(k) / static_cast<double>(o.samples - 1), true, false});
    for (double t : o.snapshot_thetas) {
        if (t < 0.0 || t > o.theta_end)
            throw ConfigError("snapshot time outside [0, theta_end]", "snapshots");
        auto it = std::find_if(out.begin(), out.end(), [&](const ScheduleEntry& e) {
            return std::abs(e.theta - t) <= 1e-12 * std::max(1.0, t);
        });
        if (it != out.end())
            it->snapshot = true;
        else
            out.push_back({t, false, true});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
    return out;
}

} // namespace detail

/// Runs the QM stepper from the fresh pellet to `theta_end`.
inline RunResult run_qm(const ModelParams& p, const RunOptions& o = {})
{
    o.check();
    validate(p);
    PelletState s = initial_state(p, SpatialGrid(o.nodes));
    RunResult r;
    r.series.kind = p.kind;
    const bool two_gas = p.kind == ModelKind::Simultaneous;
    for (const auto& e : detail::make_schedule(o)) {
        while (s.theta < e.theta) {
            const double remaining = e.theta - s.theta;
            const double n = std::ceil(remaining / o.dtheta - 1e-9);
            const double h = n <= 1.0 ? remaining : remaining / n;
            StepResult st = step(s, h, p, o.control);
            if (st.report.status == StepStatus::SeriesWarning)
                r.series_warning = true;
            if (st.report.status == StepStatus::PorePlugged)
                r.pore_plugged = true;
            if (st.report.stage_switched)
                r.theta_c = st.state.theta_c;
            s = std::move(st.state);
            if (n <= 1.0)
                s.theta = e.theta;
        }
        if (e.sample) {
            r.series.theta.push_back(e.theta);
            r.series.x.push_back(conversion(s, p));
            if (two_gas)
                r.series.x_a.push_back(conversion_a(s, p));
        }
        if (e.snapshot) {
            StepResult now = step(s, 0.0, p, o.control);
            r.snapshots.push_back(detail::snapshot_of(s, now.gas));
        }
    }
    r.exhausted = s.stage == Stage::Second && s.y_m <= 0.0;
    return r;
}

} // namespace qmsolid
