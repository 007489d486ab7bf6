#pragma once

/// \file driver.hpp
/// Batch driver behind the command-line tool: turns a configuration file
/// into QM and/or reference runs, a packed-bed march, and a parameter sweep,
/// and writes the CSV and summary files. Exit codes: 0 success, 2 invalid
/// configuration, 3 solver failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "core.hpp"
#include "models.hpp"
#include "packed_bed.hpp"
#include "reference_fd.hpp"

namespace qmsolid {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_solver_error = 3;

enum class RunMode
{
    QmOnly,
    FdOnly,
    Compare
};

inline const char* to_string(RunMode m)
{
    switch (m) {
    case RunMode::QmOnly: return "qm";
    case RunMode::FdOnly: return "fd";
    case RunMode::Compare: return "compare";
    }
    return "?";
}

struct OutputOptions
{
    std::string dir = "out";
    bool conversion = true;
    bool profiles = true;
    int precision = 17;
};

struct BedRun
{
    BedParams params;
    double dtau = 1e-3;
    double tau_end = 2.0;
    BedOptions options;
};

struct RunConfig
{
    std::optional<ModelParams> model;
    /// Set when the model came from dimensional input.
    std::optional<double> theta_per_second;
    RunOptions grid;
    FdControl fd;
    RunMode mode = RunMode::QmOnly;
    std::optional<BedRun> bed;
    OutputOptions output;
    /// Sweep axes declared in the file, as (section.key, values).
    std::vector<std::pair<std::string, std::vector<std::string>>> sweeps;
};

/// A ConfigError whose message already carries the file/line anchor.
class AnchoredConfigError : public ConfigError
{
public:
    using ConfigError::ConfigError;
};

namespace detail {

inline std::string format_real(double v, int precision = 17)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

inline bool parse_bool(const std::string& s, const std::string& key)
{
    if (s == "true" || s == "yes" || s == "1")
        return true;
    if (s == "false" || s == "no" || s == "0")
        return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + s + "'", key);
}

/// Typed reads from one section; every error carries the qualified key.
class SectionReader
{
public:
    SectionReader(const ConfigFile& f, std::string section, std::initializer_list<const char*> allowed)
        : raw_(f.section(section)), section_(std::move(section))
    {
        for (const auto& [k, v] : raw_) {
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
                throw ConfigError("unknown key '" + section_ + "." + k + "'", qualified(k));
        }
    }

    bool has(const std::string& k) const { return raw_.contains(k); }

    double real(const std::string& k, double fallback) const
    {
        try {
            return parse_real(raw_, k, fallback);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), qualified(k));
        }
    }

    std::size_t count(const std::string& k, std::size_t fallback) const
    {
        const double v = real(k, static_cast<double>(fallback));
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
            throw ConfigError("key '" + qualified(k) + "': expected a nonnegative integer", qualified(k));
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& k, bool fallback) const
    {
        auto it = raw_.find(k);
        return it == raw_.end() ? fallback : parse_bool(it->second, qualified(k));
    }

    std::string text(const std::string& k, std::string fallback) const
    {
        auto it = raw_.find(k);
        return it == raw_.end() ? fallback : it->second;
    }

    std::vector<double> reals(const std::string& k) const
    {
        std::vector<double> out;
        auto it = raw_.find(k);
        if (it == raw_.end())
            return out;
        for (const auto& item : split_list(it->second)) {
            RawConfig one{{k, item}};
            try {
                out.push_back(parse_real(one, k, 0.0));
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), qualified(k));
            }
        }
        return out;
    }

    std::string qualified(const std::string& k) const { return section_ + "." + k; }

private:
    RawConfig raw_;
    std::string section_;
};

inline RunConfig parse_run_config_unanchored(const ConfigFile& f)
{
    static const char* known_sections[] = {"model", "dimensional", "grid", "fd", "run", "bed", "output", "sweep"};
    for (const auto& e : f.entries())
        if (std::find_if(std::begin(known_sections), std::end(known_sections),
                         [&](const char* s) { return e.section == s; }) == std::end(known_sections))
            throw ConfigError("unknown section '" + e.section + "'", e.qualified());

    RunConfig rc;
    const bool has_model = f.has_section("model");
    const bool has_dim = f.has_section("dimensional");
    if (has_model && has_dim)
        throw ConfigError("give either a model or a dimensional section, not both", "dimensional.kind");
    if (has_model) {
        try {
            rc.model = build_model(f.section("model"));
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), e.key().empty() ? std::string() : "model." + e.key());
        }
    } else if (has_dim) {
        try {
            ScaledModel sm = dimensionless_groups_from_dimensional(f.section("dimensional"));
            rc.model = sm.params;
            rc.theta_per_second = sm.theta_per_second;
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), e.key().empty() ? std::string() : "dimensional." + e.key());
        }
    }

    SectionReader grid(f, "grid", {"n", "dtheta", "theta_end", "samples", "snapshots", "decrement_cap"});
    rc.grid.nodes = grid.count("n", rc.grid.nodes);
    rc.grid.dtheta = grid.real("dtheta", rc.grid.dtheta);
    rc.grid.theta_end = grid.real("theta_end", rc.grid.theta_end);
    rc.grid.samples = grid.count("samples", rc.grid.samples);
    rc.grid.snapshot_thetas = grid.reals("snapshots");
    rc.grid.control.decrement_cap = grid.real("decrement_cap", rc.grid.control.decrement_cap);
    try {
        SpatialGrid probe(rc.grid.nodes);
        rc.grid.check();
        detail::make_schedule(rc.grid);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), grid.qualified(e.key()));
    }
    if (!(rc.grid.control.decrement_cap > 0.0 && rc.grid.control.decrement_cap < 1.0))
        throw ConfigError("grid.decrement_cap must lie in (0, 1)", "grid.decrement_cap");

    SectionReader run(f, "run", {"mode"});
    const std::string mode = run.text("mode", "qm");
    if (mode == "qm")
        rc.mode = RunMode::QmOnly;
    else if (mode == "fd")
        rc.mode = RunMode::FdOnly;
    else if (mode == "compare")
        rc.mode = RunMode::Compare;
    else
        throw ConfigError("run.mode must be qm, fd or compare, got '" + mode + "'", "run.mode");

    SectionReader fd(f, "fd", {"n", "dtheta", "scheme", "tol", "max_halvings", "refine"});
    rc.fd.n_space = fd.count("n", rc.fd.n_space);
    rc.fd.dtheta = fd.real("dtheta", rc.fd.dtheta);
    rc.fd.convergence_tol = fd.real("tol", rc.fd.convergence_tol);
    rc.fd.max_halvings = static_cast<int>(fd.count("max_halvings", static_cast<std::size_t>(rc.fd.max_halvings)));
    rc.fd.refine = fd.flag("refine", rc.fd.refine);
    const std::string scheme = fd.text("scheme", "cn");
    if (scheme == "cn")
        rc.fd.scheme = TimeScheme::CrankNicolson;
    else if (scheme == "be")
        rc.fd.scheme = TimeScheme::BackwardEuler;
    else
        throw ConfigError("fd.scheme must be cn or be, got '" + scheme + "'", "fd.scheme");
    rc.fd.samples = rc.grid.samples;
    try {
        rc.fd.check();
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), e.key() == "n_space" ? "fd.n" : fd.qualified(e.key()));
    }

    if (f.has_section("bed")) {
        SectionReader bed(f, "bed",
                          {"peclet", "beta", "phi", "biot", "length", "segments", "dtau", "tau_end", "samples",
                           "radial_nodes", "verify"});
        BedRun b;
        b.params.peclet = bed.real("peclet", b.params.peclet);
        b.params.beta = bed.real("beta", b.params.beta);
        b.params.phi = bed.real("phi", b.params.phi);
        b.params.biot = bed.real("biot", b.params.biot);
        b.params.length = bed.real("length", b.params.length);
        b.params.segments = bed.count("segments", b.params.segments);
        b.dtau = bed.real("dtau", b.dtau);
        b.tau_end = bed.real("tau_end", b.tau_end);
        b.options.samples = bed.count("samples", b.options.samples);
        b.options.radial_nodes = bed.count("radial_nodes", b.options.radial_nodes);
        b.options.verify_bulk = bed.flag("verify", false);
        try {
            b.params.check();
            SpatialGrid probe(b.options.radial_nodes);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), bed.qualified(e.key() == "n" ? "radial_nodes" : e.key()));
        }
        if (!(b.dtau > 0.0))
            throw ConfigError("bed.dtau must be positive", "bed.dtau");
        if (!(b.tau_end > 0.0))
            throw ConfigError("bed.tau_end must be positive", "bed.tau_end");
        if (b.options.samples < 2)
            throw ConfigError("bed.samples must be at least 2", "bed.samples");
        rc.bed = b;
    }

    if (!rc.model && !rc.bed)
        throw ConfigError("configuration needs a model, dimensional or bed section");
    if (!rc.model && rc.mode != RunMode::QmOnly)
        throw ConfigError("run.mode '" + mode + "' needs a model section", "run.mode");

    SectionReader out(f, "output", {"dir", "conversion", "profiles", "precision"});
    rc.output.dir = out.text("dir", rc.output.dir);
    rc.output.conversion = out.flag("conversion", true);
    rc.output.profiles = out.flag("profiles", true);
    const std::size_t prec = out.count("precision", 17);
    if (prec < 1 || prec > 17)
        throw ConfigError("output.precision must lie in [1, 17]", "output.precision");
    rc.output.precision = static_cast<int>(prec);

    for (const auto& e : f.entries()) {
        if (e.section != "sweep")
            continue;
        const auto values = split_list(e.value);
        if (values.empty())
            throw ConfigError("sweep list for '" + e.key + "' is empty", e.qualified());
        rc.sweeps.emplace_back(e.key, values);
    }
    return rc;
}

} // namespace detail

/// Builds the run configuration; errors name the file and line of the
/// offending key when it appears in the file.
inline RunConfig parse_run_config(const ConfigFile& f)
{
    try {
        return detail::parse_run_config_unanchored(f);
    } catch (const AnchoredConfigError&) {
        throw;
    } catch (const ConfigError& e) {
        throw AnchoredConfigError(f.anchor(e.what(), e.key(), "model"), e.key());
    }
}

/// Canonical key/value listing of a model instance.
inline std::vector<std::pair<std::string, std::string>> describe(const ModelParams& p)
{
    using detail::format_real;
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("kind", std::string(to_string(p.kind)));
    out.emplace_back("thiele", format_real(p.thiele));
    out.emplace_back("psi", format_real(p.accumulation_psi));
    out.emplace_back("sigma_g_sq", format_real(p.grain_thiele_sq));
    out.emplace_back("structural_psi", format_real(p.structural_psi));
    out.emplace_back("beta", format_real(p.beta_rpm));
    out.emplace_back("z", format_real(p.z_ratio));
    out.emplace_back("porosity0", format_real(p.porosity0));
    out.emplace_back("sherwood", is_dirichlet(p.surface)
                                     ? std::string("inf")
                                     : format_real(std::get<FilmResistance>(p.surface).sherwood));
    out.emplace_back("solid_order", format_real(p.solid_order));
    out.emplace_back("nucleation_order", std::to_string(p.nucleation_order));
    out.emplace_back("psi_ab", format_real(p.psi_ab));
    out.emplace_back("thiele_a", format_real(p.thiele_a));
    out.emplace_back("thiele_c", format_real(p.thiele_c));
    out.emplace_back("fp", std::to_string(p.pellet.shape_factor()));
    out.emplace_back("fg", std::to_string(p.grain.shape_factor()));
    out.emplace_back("half_order_modulus",
                     p.half_order_modulus == HalfOrderModulus::Standard ? "standard" : "linearized");
    return out;
}

/// Result of one executed configuration.
struct RunOutcome
{
    int exit_code = exit_ok;
    std::string message;
    std::optional<RunResult> qm;
    std::optional<FdRun> fd;
    std::optional<CompareMetrics> metrics;
    std::optional<BedResult> bed;

    std::optional<double> theta_x(double level) const
    {
        if (qm)
            return theta_at_conversion(qm->series, level);
        if (fd)
            return theta_at_conversion(fd->result.series, level);
        return std::nullopt;
    }
};

namespace detail {

inline void write_conversion_csv(const std::filesystem::path& path, const RunConfig& rc, const RunOutcome& r)
{
    const int pr = rc.output.precision;
    const bool two_gas = rc.model->kind == ModelKind::Simultaneous;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SolverError("cannot write " + path.string());
    out << "theta";
    if (r.qm)
        out << (two_gas ? ",X_qm,XA_qm" : ",X_qm");
    if (r.fd)
        out << (two_gas ? ",X_fd,XA_fd" : ",X_fd");
    out << '\n';
    const ConversionSeries& base = r.qm ? r.qm->series : r.fd->result.series;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double t = base.theta[i];
        out << format_real(t, pr);
        if (r.qm) {
            out << ',' << format_real(r.qm->series.x[i], pr);
            if (two_gas)
                out << ',' << format_real(r.qm->series.x_a[i], pr);
        }
        if (r.fd) {
            const auto& s = r.fd->result.series;
            out << ',' << format_real(interpolate(s.theta, s.x, t), pr);
            if (two_gas)
                out << ',' << format_real(interpolate(s.theta, s.x_a, t), pr);
        }
        out << '\n';
    }
}

inline void write_profiles_csv(const std::filesystem::path& path, const RunConfig& rc, const RunResult& qm)
{
    const int pr = rc.output.precision;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SolverError("cannot write " + path.string());
    out << "theta,y,a,solid\n";
    for (const auto& s : qm.snapshots)
        for (std::size_t i = 0; i < s.y.size(); ++i)
            out << format_real(s.theta, pr) << ',' << format_real(s.y[i], pr) << ',' << format_real(s.a[i], pr)
                << ',' << format_real(s.solid[i], pr) << '\n';
}

inline void write_bed_csv(const std::filesystem::path& path, const RunConfig& rc, const BedResult& b)
{
    const int pr = rc.output.precision;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SolverError("cannot write " + path.string());
    out << "tau,eta,Y,C_Y,X_surface,X_pellet_avg\n";
    for (std::size_t k = 0; k < b.tau.size(); ++k)
        for (std::size_t j = 0; j < b.eta.size(); ++j)
            out << format_real(b.tau[k], pr) << ',' << format_real(b.eta[j], pr) << ',' << format_real(b.Y[k][j], pr)
                << ',' << format_real(b.C_Y[k][j], pr) << ',' << format_real(b.X_surface[k][j], pr) << ','
                << format_real(b.X_pellet_avg[k][j], pr) << '\n';
}

inline std::string optional_real(const std::optional<double>& v)
{
    return v ? format_real(*v) : std::string("none");
}

inline void write_summary(const std::filesystem::path& path, const RunConfig& rc, const RunOutcome& r)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SolverError("cannot write " + path.string());
    out << "[run]\n";
    out << "mode = " << to_string(rc.mode) << '\n';
    if (rc.model) {
        out << "\n[model]\n";
        for (const auto& [k, v] : describe(*rc.model))
            out << k << " = " << v << '\n';
        if (rc.theta_per_second)
            out << "theta_per_second = " << format_real(*rc.theta_per_second) << '\n';
        out << "\n[grid]\n";
        out << "n = " << rc.grid.nodes << '\n';
        out << "dtheta = " << format_real(rc.grid.dtheta) << '\n';
        out << "theta_end = " << format_real(rc.grid.theta_end) << '\n';
        out << "samples = " << rc.grid.samples << '\n';
    }
    if (r.qm) {
        out << "\n[qm]\n";
        out << "theta_c = " << optional_real(r.qm->theta_c) << '\n';
        out << "stages = " << (r.qm->theta_c ? 2 : 1) << '\n';
        out << "exhausted = " << (r.qm->exhausted ? "true" : "false") << '\n';
        out << "pore_plugged = " << (r.qm->pore_plugged ? "true" : "false") << '\n';
        out << "series_warning = " << (r.qm->series_warning ? "true" : "false") << '\n';
        out << "X_final = " << format_real(r.qm->series.x.back()) << '\n';
        out << "theta_X50 = " << optional_real(theta_at_conversion(r.qm->series, 0.5)) << '\n';
        out << "theta_X90 = " << optional_real(theta_at_conversion(r.qm->series, 0.9)) << '\n';
    }
    if (r.fd) {
        const auto& d = r.fd->diagnostics;
        out << "\n[fd]\n";
        out << "n = " << rc.fd.n_space << '\n';
        out << "dtheta_used = " << format_real(d.dtheta_used) << '\n';
        out << "halvings = " << d.halvings << '\n';
        out << "max_flux_residual = " << format_real(d.max_flux_residual) << '\n';
        out << "max_balance_error = " << format_real(d.max_balance_error) << '\n';
        out << "X_final = " << format_real(r.fd->result.series.x.back()) << '\n';
    }
    if (r.metrics) {
        out << "\n[compare]\n";
        out << "max_abs_dX = " << format_real(r.metrics->max_abs_dX) << '\n';
        out << "rms_dX = " << format_real(r.metrics->rms_dX) << '\n';
        out << "theta_of_max = " << format_real(r.metrics->theta_of_max) << '\n';
    }
    if (r.bed) {
        const auto& b = *rc.bed;
        out << "\n[bed]\n";
        out << "peclet = " << format_real(b.params.peclet) << '\n';
        out << "beta = " << format_real(b.params.beta) << '\n';
        out << "phi = " << format_real(b.params.phi) << '\n';
        out << "biot = " << format_real(b.params.biot) << '\n';
        out << "length = " << format_real(b.params.length) << '\n';
        out << "segments = " << b.params.segments << '\n';
        out << "dtau = " << format_real(b.dtau) << '\n';
        out << "tau_end = " << format_real(b.tau_end) << '\n';
        out << "r1 = " << format_real(r.bed->roots.r1) << '\n';
        out << "r2 = " << format_real(r.bed->roots.r2) << '\n';
        out << "front_final = " << format_real(r.bed->front.back()) << '\n';
        if (b.options.verify_bulk)
            out << "max_oracle_gap = " << format_real(r.bed->max_oracle_gap) << '\n';
    }
}

} // namespace detail

/// Runs one parsed configuration and writes its files into `dir`.
/// Solver failures are reported through the outcome rather than thrown.
inline RunOutcome execute(const RunConfig& rc, const std::filesystem::path& dir)
{
    RunOutcome r;
    try {
        std::filesystem::create_directories(dir);
        if (rc.model) {
            if (rc.mode != RunMode::FdOnly)
                r.qm = run_qm(*rc.model, rc.grid);
            if (rc.mode != RunMode::QmOnly)
                r.fd = fd_solve_detailed(*rc.model, rc.grid.theta_end, rc.fd);
            if (r.qm && r.fd)
                r.metrics = compare_runs(*r.qm, r.fd->result);
            if (rc.output.conversion)
                detail::write_conversion_csv(dir / "conversion.csv", rc, r);
            if (rc.output.profiles && r.qm)
                detail::write_profiles_csv(dir / "profiles.csv", rc, *r.qm);
        }
        if (rc.bed) {
            r.bed = march_bed(rc.bed->params, rc.bed->dtau, rc.bed->tau_end, rc.bed->options);
            detail::write_bed_csv(dir / "bed.csv", rc, *r.bed);
        }
        detail::write_summary(dir / "summary.txt", rc, r);
    } catch (const ConfigError& e) {
        r.exit_code = exit_config_error;
        r.message = e.what();
    } catch (const SolverError& e) {
        r.exit_code = exit_solver_error;
        r.message = std::string("solver error: ") + e.what();
    } catch (const std::filesystem::filesystem_error& e) {
        r.exit_code = exit_solver_error;
        r.message = std::string("output error: ") + e.what();
    }
    return r;
}

/// Command-line overrides shared by all commands.
struct CliOverrides
{
    std::optional<std::string> out_dir;
    std::optional<std::size_t> grid_nodes;
    bool quiet = false;
    bool force_compare = false;
};

namespace detail {

inline void apply_overrides(ConfigFile& f, const CliOverrides& o)
{
    if (o.grid_nodes)
        f.assign("grid", "n", std::to_string(*o.grid_nodes));
    if (o.out_dir)
        f.assign("output", "dir", *o.out_dir);
    if (o.force_compare)
        f.assign("run", "mode", "compare");
}

} // namespace detail

/// `run <config>` and `compare <config>`.
inline int run_command(const std::string& config_path, const CliOverrides& o, std::ostream& log, std::ostream& err)
{
    RunConfig rc;
    try {
        ConfigFile f = ConfigFile::load(config_path);
        detail::apply_overrides(f, o);
        rc = parse_run_config(f);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    }
    const RunOutcome r = execute(rc, rc.output.dir);
    if (r.exit_code != exit_ok) {
        err << "error: " << r.message << '\n';
        return r.exit_code;
    }
    if (!o.quiet) {
        log << "wrote " << rc.output.dir << '\n';
        if (r.metrics)
            log << "max_abs_dX = " << detail::format_real(r.metrics->max_abs_dX, 6) << '\n';
    }
    return exit_ok;
}

/// One axis of a sweep: a fully qualified key and its values.
struct SweepAxis
{
    std::string key;
    std::vector<std::string> values;
};

/// Parses "key=v1,v2,..." (key may omit the section when unambiguous).
inline SweepAxis parse_sweep_spec(std::string_view spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("sweep spec '" + std::string(spec) + "' must look like key=v1,v2,...");
    SweepAxis a{ConfigFile::trim(spec.substr(0, eq)), split_list(spec.substr(eq + 1))};
    if (a.key.empty())
        throw ConfigError("sweep spec '" + std::string(spec) + "' has an empty key");
    if (a.values.empty())
        throw ConfigError("sweep list for '" + a.key + "' is empty", a.key);
    return a;
}

namespace detail {

/// Resolves a bare or qualified key to an entry that exists in the file.
inline std::pair<std::string, std::string> resolve_sweep_key(const ConfigFile& f, const std::string& key)
{
    if (auto dot = key.find('.'); dot != std::string::npos) {
        const std::string s = key.substr(0, dot), k = key.substr(dot + 1);
        if (!f.find(s, k) || s == "sweep")
            throw ConfigError("sweep key '" + key + "' is not set in the configuration", key);
        return {s, k};
    }
    std::vector<const ConfigEntry*> hits;
    for (const auto& e : f.entries())
        if (e.key == key && e.section != "sweep")
            hits.push_back(&e);
    if (hits.empty())
        throw ConfigError("sweep key '" + key + "' is not set in the configuration", key);
    if (hits.size() > 1)
        throw ConfigError("sweep key '" + key + "' is ambiguous; qualify it with its section", key);
    return {hits.front()->section, hits.front()->key};
}

inline std::string sanitize(std::string s)
{
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '+')
            c = '_';
    return s;
}

} // namespace detail

/// `sweep <config> key=v1,v2,...`: the cartesian product of all axes given
/// in the file's sweep section and on the command line. Points run
/// concurrently, each into its own subdirectory of the output directory,
/// and sweep.csv aggregates them in a fixed order.
inline int sweep_command(const std::string& config_path, const std::vector<std::string>& specs, const CliOverrides& o,
                         std::ostream& log, std::ostream& err)
{
    ConfigFile base;
    RunConfig base_rc;
    std::vector<SweepAxis> axes;
    std::vector<std::pair<std::string, std::string>> targets;
    struct Point
    {
        std::vector<std::string> values;
        RunConfig rc;
        std::filesystem::path dir;
    };
    std::vector<Point> points;
    try {
        base = ConfigFile::load(config_path);
        detail::apply_overrides(base, o);
        base_rc = parse_run_config(base);
        for (const auto& [k, v] : base_rc.sweeps)
            axes.push_back({k, v});
        for (const auto& s : specs) {
            SweepAxis a = parse_sweep_spec(s);
            auto same = std::find_if(axes.begin(), axes.end(), [&](const SweepAxis& x) { return x.key == a.key; });
            if (same != axes.end())
                *same = a;
            else
                axes.push_back(a);
        }
        if (axes.empty())
            throw ConfigError("no sweep axis given");
        for (const auto& a : axes) {
            try {
                targets.push_back(detail::resolve_sweep_key(base, a.key));
            } catch (const ConfigError& e) {
                throw AnchoredConfigError(base.anchor(e.what(), "sweep." + a.key), a.key);
            }
        }

        std::size_t total = 1;
        for (const auto& a : axes)
            total *= a.values.size();
        const std::filesystem::path root = base_rc.output.dir;
        for (std::size_t idx = 0; idx < total; ++idx) {
            Point p;
            ConfigFile cfg = base;
            std::size_t rem = idx;
            std::vector<std::size_t> pick(axes.size());
            for (std::size_t ax = axes.size(); ax-- > 0;) {
                pick[ax] = rem % axes[ax].values.size();
                rem /= axes[ax].values.size();
            }
            char prefix[32];
            std::snprintf(prefix, sizeof prefix, "%03zu", idx);
            std::string name = prefix;
            for (std::size_t ax = 0; ax < axes.size(); ++ax) {
                const std::string& v = axes[ax].values[pick[ax]];
                cfg.set(targets[ax].first, targets[ax].second, v);
                p.values.push_back(v);
                name += "_" + detail::sanitize(targets[ax].second + "-" + v);
            }
            p.rc = parse_run_config(cfg);
            p.dir = root / name;
            points.push_back(std::move(p));
        }
    } catch (const AnchoredConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const ConfigError& e) {
        err << "error: " << config_path << ": " << e.what() << '\n';
        return exit_config_error;
    }

    std::vector<RunOutcome> outcomes(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < points.size(); i = next++)
            outcomes[i] = execute(points[i].rc, points[i].dir);
    };
    const std::size_t n_threads =
        std::min<std::size_t>(points.size(), std::max(2u, std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
    }

    int code = exit_ok;
    const bool compare = base_rc.mode == RunMode::Compare;
    const std::filesystem::path root = base_rc.output.dir;
    try {
        std::filesystem::create_directories(root);
        std::ofstream agg(root / "sweep.csv", std::ios::binary);
        if (!agg)
            throw SolverError("cannot write " + (root / "sweep.csv").string());
        for (const auto& [s, k] : targets)
            agg << s << '.' << k << ',';
        agg << "theta_X50,theta_X90";
        if (compare)
            agg << ",max_abs_dX";
        agg << ",status\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
            const RunOutcome& r = outcomes[i];
            for (const auto& v : points[i].values)
                agg << v << ',';
            agg << detail::format_real(r.theta_x(0.5).value_or(std::nan(""))) << ','
                << detail::format_real(r.theta_x(0.9).value_or(std::nan("")));
            if (compare)
                agg << ',' << detail::format_real(r.metrics ? r.metrics->max_abs_dX : std::nan(""));
            agg << ',' << (r.exit_code == exit_ok ? "ok" : r.exit_code == exit_config_error ? "config_error"
                                                                                             : "solver_error")
                << '\n';
            if (r.exit_code != exit_ok) {
                err << "error: " << points[i].dir.string() << ": " << r.message << '\n';
                code = std::max(code, r.exit_code);
            } else if (!o.quiet) {
                log << "wrote " << points[i].dir.string() << '\n';
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_solver_error;
    }
    if (!o.quiet)
        log << "wrote " << (root / "sweep.csv").string() << " (" << points.size() << " points)\n";
    return code;
}

} // namespace qmsolid
