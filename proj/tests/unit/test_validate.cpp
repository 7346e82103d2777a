#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lh/synth.hpp"
#include "lh/validate.hpp"

using namespace lh;

namespace {

SurfacePatch catenoid(std::size_t n) {
    SynthSpec spec;
    spec.kind = SynthKind::catenoid;
    spec.n = n;
    return synth(spec).patch;
}

}  // namespace

TEST(Align, IdentityForEqualPatches) {
    auto s = catenoid(16);
    auto a = best_rigid_align(s, s);
    EXPECT_NEAR(a.rmsd, 0.0, 1e-12);
    EXPECT_NEAR((a.motion.rotation - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-10);
    EXPECT_NEAR(a.motion.translation.norm(), 0.0, 1e-10);
}

TEST(Align, RecoversKnownMotion) {
    auto s = catenoid(16);
    RigidMotion m;
    m.rotation = Eigen::AngleAxisd(2.1, Vec3(0.3, 1.0, -0.4).normalized()).toRotationMatrix();
    m.translation = Vec3(4.0, -1.0, 0.25);
    auto a = best_rigid_align(s, m.apply(s));
    EXPECT_LE(a.rmsd, 1e-10 * s.scale());
    EXPECT_NEAR((a.motion.rotation - m.rotation).norm(), 0.0, 1e-10);
    EXPECT_NEAR((a.motion.translation - m.translation).norm(), 0.0, 1e-10);
    EXPECT_TRUE(a.motion.is_proper());
}

TEST(Align, ExcludesReflections) {
    auto s = catenoid(16);
    Vec3Field mirrored = s.phi();
    for (auto& p : mirrored.values()) p.z() = -p.z();
    auto a = best_rigid_align(s, SurfacePatch(mirrored));
    EXPECT_TRUE(a.motion.is_proper());
    EXPECT_NEAR(a.motion.rotation.determinant(), 1.0, 1e-12);
}

TEST(Align, NoiseBound) {
    auto s = catenoid(24);
    std::mt19937_64 rng(11);
    const double eps = 1e-3;
    std::uniform_real_distribution<double> d(-eps, eps);
    for (int trial = 0; trial < 5; ++trial) {
        Vec3Field noisy = s.phi();
        for (auto& p : noisy.values()) p += Vec3(d(rng), d(rng), d(rng));
        auto a = best_rigid_align(s, SurfacePatch(noisy));
        EXPECT_LE(a.rmsd, eps * std::sqrt(3.0));
        // Uniform noise per axis has variance eps^2/3, so rmsd is close to eps.
        EXPECT_NEAR(a.rmsd, eps, 0.1 * eps);
    }
}

TEST(Align, DegenerateRejected) {
    ParamGrid g(8, 1.0);
    SurfacePatch point(Vec3Field::sample(g, [](double, double) { return Vec3(1.0, 2.0, 3.0); }));
    EXPECT_THROW(best_rigid_align(point, point), NumericalError);
}

TEST(FieldError, ZeroAndOffset) {
    ParamGrid g(16, 1.0);
    auto f = ScalarField::sample(g, [](double u, double v) { return u + 2 * v; });
    auto e0 = field_error(f, f);
    EXPECT_EQ(e0.max, 0.0);
    EXPECT_EQ(e0.rms, 0.0);
    auto shifted = transform(f, [](double x) { return x + 0.25; });
    auto e1 = field_error(shifted, f);
    EXPECT_NEAR(e1.max, 0.25, 1e-15);
    EXPECT_NEAR(e1.rms, 0.25, 1e-15);
    EXPECT_EQ(e1.count, g.size());
}

TEST(FieldError, RegionRestrictions) {
    ParamGrid g(16, 1.0);
    ScalarField f(g), ref(g);
    f(8, 8) = 3.0;
    f(0, 0) = 7.0;
    ErrorRegion interior;
    interior.margin = 1;
    EXPECT_EQ(field_error(f, ref, interior).max, 3.0);
    ErrorRegion only;
    only.only = HoleMask::rectangle(g, 0.0, 0.0, 0.1, 0.1);
    EXPECT_EQ(field_error(f, ref, only).max, 7.0);
    ErrorRegion skip;
    skip.exclude = HoleMask::rectangle(g, 0.4, 0.4, 0.6, 0.6);
    skip.margin = 1;
    EXPECT_EQ(field_error(f, ref, skip).max, 0.0);
}

TEST(FieldError, MismatchedGridsRejected) {
    EXPECT_THROW(field_error(ScalarField(ParamGrid(16, 1.0)), ScalarField(ParamGrid(16, 2.0))), InputError);
}

TEST(ConvergenceOrder, Examples) {
    EXPECT_NEAR(convergence_order(4.0, 1.0, 0.25), 2.0, 1e-12);
    EXPECT_NEAR(convergence_order(8.0, 4.0, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(pairwise_order(1.0, 0.125), 3.0, 1e-12);
}
