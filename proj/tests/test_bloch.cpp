#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "hypiter/bloch.hpp"
#include "oracles.hpp"

using namespace hypiter;

TEST(BlochSearch, CenteredDiskAttainsArtanhHalf) {
    const auto d = parse_domain("disk(0,0,0.5)");
    const BlochReport r = bloch_radius_search(*d);
    EXPECT_NEAR(r.best_inradius, oracle::artanh_log(0.5), 1e-3);
    EXPECT_LE(r.best_inradius, oracle::artanh_log(0.5) + 1e-9);
    EXPECT_EQ(r.verdict.kind, BlochVerdict::Kind::BlochUpTo);
}

TEST(BlochSearch, OffCenterDiskFindsHyperbolicRadius) {
    const auto d = parse_domain("disk(0.3,0.2,0.4)");
    const double radius = euclid_to_hyp(Complex(0.3, 0.2), 0.4).radius;
    const BlochReport r = bloch_radius_search(*d);
    EXPECT_NEAR(r.best_inradius, radius, 1e-3);
    EXPECT_EQ(r.verdict.kind, BlochVerdict::Kind::BlochUpTo);
}

TEST(BlochSearch, HorodiskWitnessAtDepthFive) {
    const auto h = parse_domain("horodisk(0,0.5)");
    const BlochReport r = bloch_radius_search(*h);
    EXPECT_EQ(r.verdict.kind, BlochVerdict::Kind::NonBlochWitness);
    EXPECT_GE(r.verdict.value, 3.0);
    EXPECT_TRUE(r.witness_verified);
    EXPECT_TRUE(witness_disk_verify(*h, {r.best_center, r.verdict.value}, 10000));
}

TEST(BlochSearch, MonotoneInBudget) {
    const auto h = parse_domain("horodisk(0.7,0.3)");
    double previous = -1;
    for (double depth : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        BlochBudget b;
        b.depth = depth;
        const BlochReport r = bloch_radius_search(*h, b);
        EXPECT_GE(r.best_inradius, previous);
        previous = r.best_inradius;
    }
    // The search exceeds any threshold T once the depth passes the deep point
    // for T.
    BlochBudget b;
    b.depth = rho0(h->deep_point(4.0).value()) + 0.5;
    EXPECT_GT(bloch_radius_search(*h, b).best_inradius, 4.0);
}

TEST(BlochSearch, RDenseStaysBounded) {
    const auto n = parse_domain("rdense(0.5,4)");
    const BlochReport r = bloch_radius_search(*n);
    EXPECT_LE(r.best_inradius, 0.55);
    EXPECT_NE(r.verdict.kind, BlochVerdict::Kind::NonBlochWitness);
    EXPECT_LE(rho0(r.best_center.value()), 3.5 + 1e-12);
}

TEST(BlochSearch, ShallowBudgetOnHorodiskIsExhausted) {
    // At depth 3 the best value is still growing with the ring radius.
    const auto h = parse_domain("horodisk(0,0.5)");
    BlochBudget b;
    b.depth = 3.0;
    b.witness_threshold = 10.0;
    EXPECT_EQ(bloch_radius_search(*h, b).verdict.kind, BlochVerdict::Kind::BudgetExhausted);
}

TEST(BlochSearch, Deterministic) {
    const auto n = parse_domain("rdense(0.5,4)");
    EXPECT_TRUE(bloch_radius_search(*n) == bloch_radius_search(*n));
}

TEST(WitnessDisk, SamplingCertification) {
    const auto h = parse_domain("horodisk(0,0.5)");
    const DiskPoint a = h->deep_point(2.0);
    EXPECT_TRUE(witness_disk_verify(*h, {a, 2.0}, 10000));
    EXPECT_FALSE(witness_disk_verify(*h, {a, 2.1}, 10000));
    const auto n = parse_domain("rdense(0.5,4)");
    // A disk between punctures that still swallows one is rejected.
    EXPECT_TRUE(witness_disk_verify(*n, {DiskPoint(std::tanh(0.25)), 0.2}, 2000));
    EXPECT_FALSE(witness_disk_verify(*n, {DiskPoint(std::tanh(0.25)), 0.3}, 2000));
}

TEST(QcExperiment, IdentityReproducesReport) {
    for (const char* spec : {"horodisk(0,0.5)", "rdense(0.5,4)", "disk(0,0,0.5)"}) {
        const auto x = parse_domain(spec);
        EXPECT_TRUE(qc_image_experiment(x, RadialStretch(1.0)) == bloch_radius_search(*x)) << spec;
    }
}

TEST(QcExperiment, StretchPreservesClasses) {
    const auto h = parse_domain("horodisk(0,0.5)");
    const auto n = parse_domain("rdense(0.5,4)");
    for (double k : {2.0, 4.0}) {
        EXPECT_EQ(qc_image_experiment(h, RadialStretch(k)).verdict.kind, BlochVerdict::Kind::NonBlochWitness) << k;
        EXPECT_NE(qc_image_experiment(n, RadialStretch(k)).verdict.kind, BlochVerdict::Kind::NonBlochWitness) << k;
    }
}
