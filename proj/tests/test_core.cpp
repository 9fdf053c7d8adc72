#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "hypiter/core.hpp"
#include "hypiter/parallel.hpp"
#include "oracles.hpp"

using namespace hypiter;

namespace {

Complex random_point(Rng& rng, double max_modulus = 0.95) {
    return std::polar(max_modulus * std::sqrt(rng.uniform()), rng.uniform(0, 2 * std::numbers::pi));
}

}  // namespace

TEST(DiskPoint, RejectsBoundaryAndNonFinite) {
    EXPECT_THROW(DiskPoint(1.0), PreconditionError);
    EXPECT_THROW(DiskPoint(Complex(0.6, 0.8)), PreconditionError);
    EXPECT_THROW(DiskPoint(1.0 - 1e-16), PreconditionError);
    EXPECT_THROW(DiskPoint(std::numeric_limits<double>::quiet_NaN()), PreconditionError);
    EXPECT_NO_THROW(DiskPoint(1.0 - 1e-12));
    EXPECT_EQ(DiskPoint(Complex(0.3, -0.2)).value(), Complex(0.3, -0.2));
}

TEST(Rho, MatchesDefiningFormula) {
    EXPECT_NEAR(rho0(Complex(0.5)), oracle::artanh_log(0.5), 1e-15);
    EXPECT_NEAR(rho0(Complex(0.5)), 0.5493061443340549, 1e-15);
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Complex z = random_point(rng), w = random_point(rng);
        EXPECT_NEAR(rho(z, w), oracle::rho(z, w), 1e-11 * (1 + oracle::rho(z, w)));
    }
}

TEST(Rho, MetricAxioms) {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Complex x = random_point(rng), y = random_point(rng), z = random_point(rng);
        EXPECT_DOUBLE_EQ(rho(x, y), rho(y, x));
        EXPECT_EQ(rho(x, x), 0.0);
        EXPECT_LE(rho(x, z), rho(x, y) + rho(y, z) + 1e-12);
    }
}

TEST(Rho, StaysAccurateNearTheCircle) {
    // 1 - |z| = 1e-12: the artanh form loses most digits; the closed form
    // rho(0, r) = artanh(r) = 0.5 log((1 + r) / (1 - r)) with 1 - r exact.
    const double gap = 0x1p-40;
    const double r = 1.0 - gap;
    const double expected = 0.5 * std::log((2.0 - gap) / gap);
    EXPECT_NEAR(rho0(Complex(r)), expected, 1e-12 * expected);
}

TEST(Rho, LongDoubleAgrees) {
    const std::complex<long double> z(0.3L, 0.4L), w(-0.2L, 0.1L);
    EXPECT_NEAR(static_cast<double>(rho(z, w)), rho(Complex(0.3, 0.4), Complex(-0.2, 0.1)), 1e-15);
}

TEST(Mobius, MatchesFormulaAndIsIsometry) {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const Complex a = random_point(rng);
        const double theta = rng.uniform(0, 6.28);
        const MobiusAut m(a, theta);
        const Complex z = random_point(rng), w = random_point(rng);
        EXPECT_LT(std::abs(m.apply(z) - oracle::mobius(a, theta, z)), 1e-12);
        EXPECT_NEAR(rho(m.apply(z), m.apply(w)), rho(z, w), 1e-10);
    }
}

TEST(Mobius, GroupLaws) {
    Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        const MobiusAut f(random_point(rng), rng.uniform(0, 6)), g(random_point(rng), rng.uniform(0, 6));
        const Complex z = random_point(rng);
        EXPECT_LT(std::abs(mobius_compose(f, g).apply(z) - f.apply(g.apply(z))), 1e-11);
        EXPECT_LT(std::abs(mobius_invert(f).apply(f.apply(z)) - z), 1e-12);
        EXPECT_LT(std::abs(f.apply(mobius_invert(f).apply(z)) - z), 1e-12);
    }
    const Complex z(0.2, 0.3);
    EXPECT_EQ(MobiusAut::identity().apply(z), z);
}

TEST(Mobius, TwoPointSendsPToQ) {
    Rng rng(9);
    for (int i = 0; i < 300; ++i) {
        const DiskPoint p(random_point(rng)), q(random_point(rng));
        const double theta = rng.uniform(0, 6.28);
        const MobiusAut m = mobius_two_point(p, q, theta);
        EXPECT_LT(std::abs(m.apply(p.value()) - q.value()), 1e-12);
        // The rotation freedom: the derivative at p has phase theta after the
        // positive-derivative transports on both ends.
        const Complex d = m.derivative(p.value());
        EXPECT_NEAR(std::remainder(std::arg(d) - theta, 2 * std::numbers::pi), 0.0, 1e-9);
    }
}

TEST(Mobius, DerivativeMatchesFiniteDifference) {
    const MobiusAut m(Complex(0.4, -0.3), 1.1);
    const Complex z(0.1, 0.2), h(1e-6, 0);
    const Complex fd = (m.apply(z + h) - m.apply(z - h)) / (2.0 * h);
    EXPECT_LT(std::abs(m.derivative(z) - fd), 1e-8);
}

TEST(Blaschke2, RejectsZeroParameter) { EXPECT_THROW(Blaschke2(DiskPoint(0.0)), PreconditionError); }

TEST(Blaschke2, PreimagesMatchQuadraticFormula) {
    // a = 0.9, c = 0.3: z^2 - 0.63 z - 0.3 = 0.
    const auto pre = blaschke2_preimages(Blaschke2(DiskPoint(0.9)), DiskPoint(0.3));
    const double disc = std::sqrt(0.63 * 0.63 + 1.2);
    EXPECT_NEAR(pre.z1.real(), (0.63 - disc) / 2, 1e-15);
    EXPECT_NEAR(pre.z2.real(), (0.63 + disc) / 2, 1e-15);
    EXPECT_NEAR(pre.z1.real(), -0.31684254367682460, 1e-15);
    EXPECT_NEAR(pre.z2.real(), 0.94684254367682460, 1e-15);
    EXPECT_NEAR(pre.z1.real() * pre.z2.real(), -0.3, 1e-15);

    Rng rng(21);
    for (int i = 0; i < 500; ++i) {
        const Complex a = random_point(rng, 0.99);
        const Complex c = std::polar(0.7 * std::sqrt(rng.uniform()) + 0.01, rng.uniform(0, 6.28));
        const Blaschke2 b{DiskPoint(a)};
        const auto got = blaschke2_preimages(b, DiskPoint(c));
        const auto want = oracle::preimages(a, c);
        EXPECT_LT(std::abs(got.z1.value() - want.first), 1e-9);
        EXPECT_LT(std::abs(got.z2.value() - want.second), 1e-9);
        EXPECT_LT(std::abs(b.apply(got.z1.value()) - c), 1e-12);
        EXPECT_LT(std::abs(b.apply(got.z2.value()) - c), 1e-12);
        EXPECT_LT(std::abs(got.z1.value() * got.z2.value() + c), 1e-12);
        EXPECT_LE(got.z1.modulus(), got.z2.modulus());
    }
}

TEST(Blaschke2, PreimagePreconditions) {
    const Blaschke2 b{DiskPoint(0.5)};
    EXPECT_THROW(blaschke2_preimages(b, DiskPoint(0.0)), PreconditionError);
    EXPECT_THROW(blaschke2_preimages(b, DiskPoint(0.8)), PreconditionError);  // rho(0, 0.8) > 1
    // a = 0.1, c = -0.5: complex-conjugate roots of equal modulus.
    EXPECT_THROW(blaschke2_preimages(Blaschke2(DiskPoint(0.1)), DiskPoint(-0.5)), NumericError);
}

TEST(Disks, HyperbolicEuclideanRoundTrip) {
    Rng rng(13);
    for (int i = 0; i < 300; ++i) {
        const HyperbolicDisk h{DiskPoint(random_point(rng, 0.9)), rng.uniform(0.01, 3.0)};
        const EuclideanDisk e = hyp_to_euclid(h);
        // Oracle: the diameter endpoints along the ray through h are at
        // rho-distance radius from h.
        const Complex dir = std::abs(h.center.value()) > 0 ? h.center.value() / std::abs(h.center.value()) : 1.0;
        const Complex near = e.center - e.radius * dir, far = e.center + e.radius * dir;
        EXPECT_NEAR(rho(h.center.value(), near), h.radius, 1e-9 * (1 + h.radius));
        EXPECT_NEAR(rho(h.center.value(), far), h.radius, 1e-8 * (1 + h.radius));
        const HyperbolicDisk back = euclid_to_hyp(e);
        EXPECT_LT(std::abs(back.center.value() - h.center.value()), 1e-9);
        EXPECT_NEAR(back.radius, h.radius, 1e-8);
    }
    EXPECT_THROW(euclid_to_hyp(Complex(0.5), 0.5), PreconditionError);
    EXPECT_THROW(hyp_to_euclid(HyperbolicDisk{DiskPoint(0.0), -1.0}), PreconditionError);
}

TEST(Disks, CenteredDiskHasArtanhRadius) {
    const auto h = euclid_to_hyp(Complex(0.0), 0.5);
    EXPECT_EQ(h.center.value(), Complex(0.0));
    EXPECT_NEAR(h.radius, oracle::artanh_log(0.5), 1e-15);
}

TEST(Parallel, VisitsEveryIndexOnce) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Parallel, RethrowsWorkerFailure) {
    EXPECT_THROW(parallel_for(100, [](std::size_t i) {
                     if (i == 37) throw NumericError("boom");
                 }),
                 NumericError);
}

TEST(Rng, SeededStreamsRepeat) {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
    EXPECT_NE(Rng(42).uniform(), c.uniform());
}
