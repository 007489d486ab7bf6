// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "qmsolid/qmsolid.hpp"

using namespace qmsolid;

namespace {

// Largest step handed to the QM stepper; the stage-switch tolerance.
constexpr double dtheta = 1e-3;

ModelParams model(ModelKind kind, double thiele)
{
    ModelParams p;
    p.kind = kind;
    p.thiele = thiele;
    if (kind == ModelKind::VolumeHalfOrder)
        p.solid_order = 0.5;
    return p;
}

RunOptions options(double theta_end, std::size_t samples = 501, std::size_t nodes = SpatialGrid::default_nodes)
{
    RunOptions o;
    o.theta_end = theta_end;
    o.samples = samples;
    o.nodes = nodes;
    o.dtheta = dtheta;
    return o;
}

double max_gap(const ConversionSeries& a, const ConversionSeries& b, double from = 0.0)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.theta[i] >= from)
            d = std::max(d, std::abs(a.x[i] - b.x[i]));
    return d;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Criterion
{
    int id;
    std::string name;
    std::function<bool(std::ostringstream&)> check;
};

bool criterion_1(std::ostringstream& d)
{
    const RunResult r = run_qm(model(ModelKind::VolumeFirstOrder, 0.05), options(5.0));
    double gap = 0.0;
    for (std::size_t i = 0; i < r.series.size(); ++i)
        gap = std::max(gap, std::abs(r.series.x[i] - (1.0 - std::exp(-r.series.theta[i]))));
    d << "max|X - (1 - e^-theta)| = " << fmt(gap) << " (tol 5e-3)";
    return gap <= 5e-3;
}

bool criterion_2(std::ostringstream& d)
{
    ModelParams p = model(ModelKind::VolumeHalfOrder, 0.1);
    p.pellet = PelletGeometry::slab();
    const RunResult r = run_qm(p, options(3.0, 3001));
    const auto t = theta_at_conversion(r.series, 0.999);
    d << "theta(X >= 0.999) = " << (t ? fmt(*t) : std::string("never")) << " (target 2.00 +- 0.05)"
      << ", surface exhaustion theta_c = " << (r.theta_c ? fmt(*r.theta_c) : std::string("none"));
    return t && std::abs(*t - 2.0) <= 0.05;
}

bool criterion_3(std::ostringstream& d)
{
    struct Case
    {
        const char* label;
        ModelParams p;
        double tol;
    };
    ModelParams grain = model(ModelKind::GrainSimple, 2.0);
    grain.grain = GrainGeometry(2);
    ModelParams pore = model(ModelKind::RandomPore, 1.0);
    pore.structural_psi = 1.0;
    const Case cases[] = {{"volume phi=1", model(ModelKind::VolumeFirstOrder, 1.0), 0.02},
                          {"volume phi=5", model(ModelKind::VolumeFirstOrder, 5.0), 0.05},
                          {"grain Fg=2 sigma=2", grain, 0.03},
                          {"random pore phi=1", pore, 0.03}};
    bool ok = true;
    for (const auto& c : cases) {
        const RunResult qm = run_qm(c.p, options(5.0, 201));
        FdControl fc;
        fc.samples = 201;
        const RunResult fd = fd_solve(c.p, 5.0, fc);
        const double gap = compare_runs(qm, fd).max_abs_dX;
        d << c.label << ": " << fmt(gap) << " (tol " << c.tol << "); ";
        ok = ok && gap <= c.tol;
    }
    return ok;
}

bool criterion_4(std::ostringstream& d)
{
    ModelParams slab = model(ModelKind::GrainSimple, 1.0);
    slab.pellet = PelletGeometry::slab();
    ModelParams layer = model(ModelKind::GrainProductLayer, 1.0);
    layer.grain_thiele_sq = 0.5;
    ModelParams modified = model(ModelKind::GrainModified, 1.0);
    modified.grain_thiele_sq = 0.167;
    modified.z_ratio = 1.5;
    GrainModifiedLaw law;
    law.sg2 = 0.167;
    law.z = 1.5;
    const double expected_modified = law.exhaustion_exposure();
    struct Case
    {
        const char* label;
        ModelParams p;
        double target;
    };
    const Case cases[] = {{"grain slab", slab, 1.0}, {"product layer", layer, 1.5}, {"modified grain", modified, expected_modified}};
    bool ok = true;
    for (const auto& c : cases) {
        const RunResult r = run_qm(c.p, options(2.0, 21));
        const bool hit = r.theta_c && std::abs(*r.theta_c - c.target) <= dtheta;
        d << c.label << ": " << (r.theta_c ? fmt(*r.theta_c) : std::string("none")) << " vs " << fmt(c.target) << "; ";
        ok = ok && hit;
    }
    return ok;
}

bool criterion_5(std::ostringstream& d)
{
    const RunOptions o = options(3.0, 301);
    const double g1 = max_gap(run_qm(model(ModelKind::Nucleation, 1.0), o).series,
                              run_qm(model(ModelKind::VolumeFirstOrder, std::sqrt(6.0)), o).series);

    ModelParams layer0 = model(ModelKind::GrainProductLayer, 2.0);
    const double g2 = max_gap(run_qm(layer0, o).series, run_qm(model(ModelKind::GrainSimple, 2.0), o).series);

    ModelParams layer = model(ModelKind::GrainProductLayer, 1.0);
    layer.grain_thiele_sq = 0.3;
    ModelParams modified = layer;
    modified.kind = ModelKind::GrainModified;
    modified.z_ratio = 1.0 + 1e-8;
    const double g3 = max_gap(run_qm(modified, o).series, run_qm(layer, o).series);

    ModelParams pore = model(ModelKind::RandomPore, 1.0);
    pore.structural_psi = 1e-8;
    const double g4 = max_gap(run_qm(pore, o).series, run_qm(model(ModelKind::VolumeFirstOrder, 1.0), o).series);

    d << "nucleation/volume " << fmt(g1) << " (1e-6); layer/simple " << fmt(g2) << " (1e-8); modified/layer "
      << fmt(g3) << " (1e-4); random pore/volume " << fmt(g4) << " (1e-4)";
    return g1 <= 1e-6 && g2 <= 1e-8 && g3 <= 1e-4 && g4 <= 1e-4;
}

bool criterion_6(std::ostringstream& d)
{
    auto extremes = [](double sa, double sc) {
        ModelParams p = model(ModelKind::Simultaneous, 0.0);
        p.thiele_a = sa;
        p.thiele_c = sc;
        p.psi_ab = 0.4;
        const RunResult r = run_qm(p, options(5.0, 101));
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 1; i < r.series.size(); ++i) {
            const auto s = selectivity(r.series.x[i], r.series.x_a[i]);
            if (!s)
                continue;
            lo = std::min(lo, *s);
            hi = std::max(hi, *s);
        }
        return std::pair{lo, hi};
    };
    const double target = 0.4 / 0.6;
    const auto [klo, khi] = extremes(0.05, 0.05);
    const bool kinetic = std::abs(klo - target) <= 1e-3 && std::abs(khi - target) <= 1e-3;
    const auto [dlo, dhi] = extremes(0.1, 3.0);
    const bool starved = dhi < 0.6667;
    d << "6a kinetic S0 in [" << fmt(klo) << ", " << fmt(khi) << "] vs 0.6667 +- 1e-3 " << (kinetic ? "ok" : "FAIL")
      << "; 6b sigma_C=3 S0 in [" << fmt(dlo) << ", " << fmt(dhi) << "] required < 0.6667 "
      << (starved ? "ok" : "FAIL");
    return kinetic && starved;
}

bool criterion_7(std::ostringstream& d)
{
    ModelParams q = model(ModelKind::VolumeFirstOrder, 2.0);
    ModelParams u = q;
    u.accumulation_psi = 0.025;
    const RunOptions o = options(5.0, 501);
    const double gap = max_gap(run_qm(u, o).series, run_qm(q, o).series, 1.0);

    SpatialGrid g;
    const auto un = profile_unsteady(2.0, 5.0, u.relaxation(), g, PelletGeometry::sphere());
    const auto qs = profile_qss(2.0, g, PelletGeometry::sphere());
    double pgap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        pgap = std::max(pgap, std::abs(un.profile.values[i] - qs.values[i]));
    d << "psi phi^2 = 0.1: max|dX| for theta >= 1 = " << fmt(gap) << " (2e-3); profile gap at theta = 5 = "
      << fmt(pgap) << " (1e-6)";
    return gap <= 2e-3 && pgap <= 1e-6;
}

bool criterion_8(std::ostringstream& d)
{
    BedParams b;
    b.peclet = 1.1;
    b.beta = 3.3;
    b.phi = 10.0;
    b.biot = 50.0;
    b.length = 1.0;
    BedOptions o;
    o.samples = 41;
    o.verify_bulk = true;
    const BedResult r = march_bed(b, 1e-3, 4.0, o);

    bool y_mono = true, c_mono = true, f_mono = true;
    for (std::size_t k = 0; k < r.tau.size(); ++k) {
        for (std::size_t j = 1; j < r.eta.size(); ++j)
            y_mono = y_mono && r.Y[k][j] <= r.Y[k][j - 1];
        if (k) {
            f_mono = f_mono && r.front[k] >= r.front[k - 1];
            for (std::size_t j = 0; j < r.eta.size(); ++j)
                c_mono = c_mono && r.C_Y[k][j] >= r.C_Y[k - 1][j];
        }
    }
    const double disc = std::sqrt(b.peclet * b.peclet + 4.0 * b.beta);
    const double root_err = std::max(std::abs(r.roots.r1 - (b.peclet + disc) / 2.0),
                                     std::abs(r.roots.r2 - (b.peclet - disc) / 2.0));
    d << "bulk vs oracle " << fmt(r.max_oracle_gap) << " (1e-4); Y monotone " << y_mono << "; front nondecreasing "
      << f_mono << " (" << fmt(r.front.front()) << " -> " << fmt(r.front.back()) << "); C_Y monotone " << c_mono
      << "; root error " << fmt(root_err) << " (1e-12)";
    return r.max_oracle_gap <= 1e-4 && y_mono && f_mono && c_mono && root_err <= 1e-12;
}

bool criterion_9(std::ostringstream& d)
{
    ModelParams grain = model(ModelKind::GrainSimple, 2.0);
    grain.grain = GrainGeometry(2);
    ModelParams pore = model(ModelKind::RandomPore, 1.0);
    pore.structural_psi = 1.0;
    ModelParams layer = model(ModelKind::GrainProductLayer, 1.0);
    layer.grain_thiele_sq = 0.5;
    double flux = 0.0, balance = 0.0;
    for (const ModelParams& p : {model(ModelKind::VolumeFirstOrder, 1.0), model(ModelKind::VolumeFirstOrder, 5.0),
                                 grain, pore, layer, model(ModelKind::Nucleation, 1.0)}) {
        FdControl c;
        c.samples = 101;
        const FdRun r = fd_solve_detailed(p, 3.0, c);
        flux = std::max(flux, r.diagnostics.max_flux_residual);
        balance = std::max(balance, r.diagnostics.max_balance_error);
    }
    d << "max flux residual " << fmt(flux) << " (1e-6); max balance error " << fmt(balance) << " (1e-4)";
    return flux <= 1e-6 && balance <= 1e-4;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion_10(std::ostringstream& d)
{
    ModelParams grain = model(ModelKind::GrainSimple, 2.0);
    ModelParams pore = model(ModelKind::RandomPore, 1.0);
    pore.structural_psi = 1.0;
    ModelParams layer = model(ModelKind::GrainProductLayer, 1.0);
    layer.grain_thiele_sq = 0.5;
    double worst = 0.0;
    for (const ModelParams& p : {model(ModelKind::VolumeFirstOrder, 1.0), model(ModelKind::VolumeFirstOrder, 5.0),
                                 grain, pore, layer}) {
        const RunResult a = run_qm(p, options(5.0, 101, 201));
        const RunResult b = run_qm(p, options(5.0, 101, 401));
        worst = std::max(worst, max_gap(a.series, b.series));
    }

    const auto root = std::filesystem::temp_directory_path() / ("qmsolid_acceptance_" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    const RunConfig rc = parse_run_config(ConfigFile::parse("model.kind = VolumeFirstOrder\nmodel.thiele = 1\n"
                                                            "grid.theta_end = 2\ngrid.samples = 101\n"
                                                            "grid.snapshots = 0.5, 1\nrun.mode = compare\n"));
    const RunOutcome first = execute(rc, root / "a");
    const RunOutcome second = execute(rc, root / "b");
    bool same = first.exit_code == exit_ok && second.exit_code == exit_ok;
    for (const char* f : {"conversion.csv", "profiles.csv", "summary.txt"})
        same = same && slurp(root / "a" / f) == slurp(root / "b" / f) && !slurp(root / "a" / f).empty();
    std::filesystem::remove_all(root);

    d << "max |X(N=201) - X(N=401)| = " << fmt(worst) << " (1e-3); repeated runs byte-identical " << same;
    return worst <= 1e-3 && same;
}

} // namespace

int main()
{
    const Criterion criteria[] = {
        {1, "kinetic-control volume reaction", criterion_1},
        {2, "half-order slab completion time", criterion_2},
        {3, "QM against finite-difference reference", criterion_3},
        {4, "stage-switch times", criterion_4},
        {5, "limiting-case reductions", criterion_5},
        {6, "simultaneous-reaction selectivity", criterion_6},
        {7, "unsteady against quasi-steady", criterion_7},
        {8, "packed bed", criterion_8},
        {9, "reference solver conservation", criterion_9},
        {10, "determinism and grid robustness", criterion_10},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = c.check(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        failed += !ok;
        std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed ? 1 : 0;
}
