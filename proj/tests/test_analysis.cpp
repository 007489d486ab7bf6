#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qmsolid/analysis.hpp"

using namespace qmsolid;

namespace {

PelletState state_with(const std::vector<double>& solid, const SpatialGrid& g)
{
    PelletState s;
    s.grid = g;
    s.solid = solid;
    s.exposure.assign(g.size(), 0.0);
    return s;
}

ModelParams volume_sphere()
{
    ModelParams p;
    p.kind = ModelKind::VolumeFirstOrder;
    return p;
}

ConversionSeries series(std::vector<double> t, std::vector<double> x)
{
    ConversionSeries s;
    s.theta = std::move(t);
    s.x = std::move(x);
    return s;
}

} // namespace

TEST(Conversion, LinearSolidInSphere)
{
    SpatialGrid g;
    std::vector<double> b(g.nodes().begin(), g.nodes().end());
    EXPECT_NEAR(conversion(state_with(b, g), volume_sphere()), 0.25, 1e-14);
}

TEST(Conversion, FreshAndSpentPellets)
{
    SpatialGrid g;
    const ModelParams p = volume_sphere();
    EXPECT_NEAR(conversion(state_with(std::vector<double>(g.size(), 1.0), g), p), 0.0, 1e-15);
    EXPECT_NEAR(conversion(state_with(std::vector<double>(g.size(), 0.0), g), p), 1.0, 1e-15);
}

TEST(Conversion, SlabUsesPlainAverage)
{
    SpatialGrid g;
    ModelParams p = volume_sphere();
    p.pellet = PelletGeometry::slab();
    std::vector<double> b(g.nodes().begin(), g.nodes().end());
    EXPECT_NEAR(conversion(state_with(b, g), p), 0.5, 1e-14);
}

TEST(Conversion, GrainsCountUnreactedCoreVolume)
{
    SpatialGrid g;
    ModelParams p = volume_sphere();
    p.kind = ModelKind::GrainSimple;
    for (int fg = 1; fg <= 3; ++fg) {
        p.grain = GrainGeometry(fg);
        const std::vector<double> r(g.size(), 0.5);
        EXPECT_NEAR(conversion(state_with(r, g), p), 1.0 - std::pow(0.5, fg), 1e-14) << fg;
    }
}

TEST(Conversion, MonotoneInPointwiseSolid)
{
    SpatialGrid g;
    const ModelParams p = volume_sphere();
    std::vector<double> lo(g.size()), hi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        lo[i] = 0.3 + 0.5 * std::sin(3.0 * g[i]) * std::sin(3.0 * g[i]);
        hi[i] = std::min(1.0, lo[i] + 0.05 * g[i]);
    }
    EXPECT_GE(conversion(state_with(lo, g), p), conversion(state_with(hi, g), p));
}

TEST(Conversion, ClampsRoundOff)
{
    EXPECT_EQ(clamp_unit(-1e-16), 0.0);
    EXPECT_EQ(clamp_unit(1.0 + 1e-16), 1.0);
    EXPECT_EQ(clamp_unit(0.3), 0.3);
}

TEST(Selectivity, RatioOfContributions)
{
    const auto s = selectivity(1.0, 0.4);
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(*s, 0.4 / 0.6, 1e-15);
    EXPECT_FALSE(selectivity(0.0, 0.0).has_value());
    EXPECT_FALSE(selectivity(0.5, 0.5).has_value());
}

TEST(Selectivity, FlatProfilesGiveTimeIndependentRatio)
{
    // proportional contributions at two different times
    const auto s1 = selectivity(0.2, 0.08);
    const auto s2 = selectivity(0.9, 0.36);
    ASSERT_TRUE(s1 && s2);
    EXPECT_LE(std::abs(*s1 - *s2), 1e-6);
}

TEST(CumulativeConcentration, ExponentialDecay)
{
    const int n = 1000;
    std::vector<double> tau(n + 1);
    std::vector<std::vector<double>> Y(n + 1, std::vector<double>(1));
    for (int k = 0; k <= n; ++k) {
        tau[k] = static_cast<double>(k) / n;
        Y[k][0] = std::exp(-tau[k]);
    }
    const auto C = cumulative_bulk_concentration(tau, Y);
    EXPECT_NEAR(C.back()[0], 0.63212055882855768, 1e-7);
    EXPECT_EQ(C.front()[0], 0.0);
    for (int k = 1; k <= n; ++k)
        EXPECT_GE(C[k][0], C[k - 1][0]);
}

TEST(CumulativeConcentration, ShapeMismatchIsRejected)
{
    std::vector<double> tau{0.0, 1.0};
    std::vector<std::vector<double>> Y(3, std::vector<double>(2, 1.0));
    EXPECT_THROW(cumulative_bulk_concentration(tau, Y), ConfigError);
}

TEST(Compare, ConstantOffset)
{
    const auto a = series({0, 1, 2, 3}, {0.01, 0.51, 0.81, 0.96});
    const auto b = series({0, 1, 2, 3}, {0.0, 0.5, 0.8, 0.95});
    const CompareMetrics m = compare_series(a, b);
    EXPECT_NEAR(m.max_abs_dX, 0.01, 1e-15);
    EXPECT_NEAR(m.rms_dX, 0.01, 1e-15);
}

TEST(Compare, InterpolatesOtherSchedule)
{
    const auto a = series({0, 0.5, 1}, {0.0, 0.5, 1.0});
    const auto b = series({0, 1}, {0.0, 1.0});
    EXPECT_NEAR(compare_series(a, b).max_abs_dX, 0.0, 1e-15);
}

TEST(Compare, RejectsEmptyOrDisjointRuns)
{
    EXPECT_THROW(compare_series(series({}, {}), series({0}, {0})), ConfigError);
    EXPECT_THROW(compare_series(series({0, 1}, {0, 0.1}), series({2, 3}, {0.2, 0.3})), ConfigError);
}

TEST(Compare, ThetaAtConversionInterpolates)
{
    const auto s = series({0, 1, 2}, {0.0, 0.4, 0.8});
    EXPECT_NEAR(*theta_at_conversion(s, 0.5), 1.25, 1e-15);
    EXPECT_FALSE(theta_at_conversion(s, 0.9).has_value());
}
