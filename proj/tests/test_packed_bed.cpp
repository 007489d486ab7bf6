#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qmsolid/packed_bed.hpp"

using namespace qmsolid;

namespace {

BedParams reference_bed()
{
    BedParams b;
    b.peclet = 1.1;
    b.beta = 3.3;
    b.phi = 10.0;
    b.biot = 50.0;
    b.length = 1.0;
    return b;
}

BedOptions quick(std::size_t samples = 21)
{
    BedOptions o;
    o.radial_nodes = 101;
    o.samples = samples;
    return o;
}

} // namespace

TEST(BedRoots, ReferenceValues)
{
    const BedRoots r = bed_roots(1.1, 3.3);
    EXPECT_NEAR(r.r1, 2.4480252896102307, 1e-12);
    EXPECT_NEAR(r.r2, -1.3480252896102307, 1e-12);
    const double d = std::sqrt(1.1 * 1.1 + 4.0 * 3.3);
    EXPECT_NEAR(r.r1, (1.1 + d) / 2.0, 1e-12);
    EXPECT_NEAR(r.r2, (1.1 - d) / 2.0, 1e-12);
}

TEST(BedRoots, NoConsumptionGivesPecletAndZero)
{
    const BedRoots r = bed_roots(2.0, 0.0);
    EXPECT_DOUBLE_EQ(r.r1, 2.0);
    EXPECT_EQ(r.r2, 0.0);
}

TEST(BedPellet, SurfaceReferenceValue)
{
    EXPECT_NEAR(bed_pellet_value(1.0, 1.0, 50.0, 1.0), 0.99377824685545158, 1e-14);
    EXPECT_NEAR(pellet_surface_ratio(1.0, 50.0), 0.99377824685545158, 1e-14);
}

TEST(BedPellet, RobinConditionAtSurface)
{
    for (double M : {0.3, 1.0, 10.0})
        for (double bi : {0.5, 5.0, 50.0}) {
            const double Y = 0.7;
            auto a = [&](double y) { return bed_pellet_value(M, Y, bi, y); };
            const double h = 1e-5;
            const double dady = (3.0 * a(1.0) - 4.0 * a(1.0 - h) + a(1.0 - 2.0 * h)) / (2.0 * h);
            EXPECT_NEAR(dady, bi * (Y - a(1.0)), 1e-8 * std::max(1.0, std::abs(dady))) << M << " " << bi;
        }
}

TEST(BedPellet, Limits)
{
    SpatialGrid g(101);
    // vanishing film resistance
    EXPECT_NEAR(bed_pellet_value(2.0, 0.8, 1e12, 1.0), 0.8, 1e-10);
    // no reaction
    for (double a : bed_pellet_profile(0.0, 0.6, 5.0, g).values)
        EXPECT_NEAR(a, 0.6, 1e-15);
    // large modulus stays finite
    for (double a : bed_pellet_profile(900.0, 1.0, 50.0, g).values)
        EXPECT_TRUE(std::isfinite(a));
    EXPECT_THROW(bed_pellet_profile(1.0, 1.0, 0.0, g), ConfigError);
}

TEST(BedBulk, SingleSegmentMatchesPinnedProfile)
{
    BedParams b = reference_bed();
    b.segments = 1;
    const std::vector<double> s{0.0};
    const std::vector<double> eta{0.0, 0.25, 0.5, 0.75, 1.0};
    const auto y = bed_bulk_profile(b, s, eta);
    const double pinned[] = {0.45801815088533741, 0.33330507020265373, 0.24961006688099678,
                             0.19970417223895808, 0.18223033943179718};
    for (std::size_t k = 0; k < eta.size(); ++k)
        EXPECT_NEAR(y[k], pinned[k], 1e-12) << eta[k];
}

TEST(BedBulk, BoundaryAndJointConditions)
{
    BedParams b = reference_bed();
    BedBulkSolver solver(b);
    std::vector<double> s(b.segments);
    for (std::size_t j = 0; j < s.size(); ++j)
        s[j] = 0.9 * std::exp(-3.0 * solver.midpoint(j));
    solver.solve(s);
    EXPECT_NEAR(solver.value(0.0) - solver.derivative(0.0) / b.peclet, 1.0, 1e-12);
    EXPECT_NEAR(solver.derivative(b.length), 0.0, 1e-12);
    const double ell = solver.segment_length();
    for (std::size_t j = 1; j < b.segments; ++j) {
        const double x = static_cast<double>(j) * ell;
        EXPECT_NEAR(solver.value(x - 1e-12), solver.value(x + 1e-12), 1e-10);
        EXPECT_NEAR(solver.derivative(x - 1e-12), solver.derivative(x + 1e-12), 1e-9);
    }
}

TEST(BedBulk, AgreesWithFiniteDifferenceOracle)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t segments : {1u, 8u, 64u}) {
        BedParams b = reference_bed();
        b.segments = segments;
        std::vector<double> s(segments);
        for (auto& v : s)
            v = u(rng);
        FdControl c;
        c.n_space = 401;
        const BedBulkSolution ref = fd_solve_bed_bulk(b, s, c);
        const auto y = bed_bulk_profile(b, s, ref.eta);
        for (std::size_t i = 0; i < y.size(); ++i)
            EXPECT_NEAR(y[i], ref.y[i], 1e-4) << segments << " " << ref.eta[i];
    }
}

TEST(BedBulk, TrivialInputsTransmitInlet)
{
    BedParams b = reference_bed();
    const std::vector<double> eta{0.0, 0.3, 1.0};
    for (double y : bed_bulk_profile(b, std::vector<double>(64, 1.0), eta))
        EXPECT_NEAR(y, 1.0, 1e-12);
    b.beta = 0.0;
    for (double y : bed_bulk_profile(b, std::vector<double>(64, 0.2), eta))
        EXPECT_NEAR(y, 1.0, 1e-12);
}

TEST(BedMarch, FreshBedHasNoConversion)
{
    const BedResult r = march_bed(reference_bed(), 1e-2, 0.5, quick());
    ASSERT_FALSE(r.tau.empty());
    EXPECT_EQ(r.tau.front(), 0.0);
    for (std::size_t j = 0; j < r.eta.size(); ++j) {
        EXPECT_EQ(r.X_surface[0][j], 0.0);
        EXPECT_EQ(r.X_pellet_avg[0][j], 0.0);
        EXPECT_EQ(r.C_Y[0][j], 0.0);
    }
}

TEST(BedMarch, MonotoneFields)
{
    for (double beta : {3.3, 30.0}) {
        BedParams b = reference_bed();
        b.beta = beta;
        const BedResult r = march_bed(b, 1e-2, 3.0, quick(31));
        for (std::size_t k = 0; k < r.tau.size(); ++k) {
            for (std::size_t j = 0; j < r.eta.size(); ++j) {
                EXPECT_GE(r.Y[k][j], 0.0);
                EXPECT_LE(r.Y[k][j], 1.0);
                if (j) {
                    EXPECT_LE(r.Y[k][j], r.Y[k][j - 1] + 1e-14);
                    EXPECT_LE(r.X_surface[k][j], r.X_surface[k][j - 1] + 1e-14);
                    EXPECT_LE(r.C_Y[k][j], r.C_Y[k][j - 1] + 1e-14);
                }
                if (k) {
                    EXPECT_GE(r.X_surface[k][j], r.X_surface[k - 1][j]);
                    EXPECT_GE(r.X_pellet_avg[k][j], r.X_pellet_avg[k - 1][j]);
                    EXPECT_GE(r.C_Y[k][j], r.C_Y[k - 1][j]);
                }
            }
            if (k) {
                EXPECT_GE(r.front[k], r.front[k - 1]);
            }
        }
    }
}

TEST(BedMarch, FrontTravelsTowardsOutlet)
{
    BedParams b = reference_bed();
    b.beta = 10.0;
    const BedResult r = march_bed(b, 1e-2, 2.0, quick(21));
    EXPECT_GT(r.front.back(), r.front.front() + 0.5);
    EXPECT_LT(r.front.front(), b.length);
}

TEST(BedMarch, SpentBedTransmitsInlet)
{
    BedParams b = reference_bed();
    b.phi = 1.0;
    const BedResult r = march_bed(b, 5e-2, 40.0, quick(5));
    for (std::size_t j = 0; j < r.eta.size(); ++j) {
        EXPECT_GT(r.X_pellet_avg.back()[j], 0.999);
        EXPECT_GT(r.Y.back()[j], 0.999);
    }
}

TEST(BedMarch, OracleCheckDuringMarch)
{
    BedOptions o = quick(3);
    o.verify_bulk = true;
    const BedResult r = march_bed(reference_bed(), 2e-2, 0.4, o);
    EXPECT_LE(r.max_oracle_gap, 1e-4);
    EXPECT_GT(r.max_oracle_gap, 0.0);
}

TEST(BedMarch, RejectsBadSteps)
{
    EXPECT_THROW(march_bed(reference_bed(), 0.0, 1.0), ConfigError);
    EXPECT_THROW(march_bed(reference_bed(), 1e-2, -1.0), ConfigError);
}
