#include <gtest/gtest.h>

#include <cmath>

#include "lh/grid.hpp"

using namespace lh;

namespace {

// Composed 13-point stencil of the 5-point Laplacian applied twice, written
// out directly: (20 f0 - 8 sum(axis) + 2 sum(diagonal) + sum(distance two)) / h^4.
template <class Fn>
double bilaplacian_oracle(Fn&& f, double u, double v, double h) {
    const double axis = f(u + h, v) + f(u - h, v) + f(u, v + h) + f(u, v - h);
    const double diag = f(u + h, v + h) + f(u - h, v + h) + f(u + h, v - h) + f(u - h, v - h);
    const double two = f(u + 2 * h, v) + f(u - 2 * h, v) + f(u, v + 2 * h) + f(u, v - 2 * h);
    return (20.0 * f(u, v) - 8.0 * axis + 2.0 * diag + two) / (h * h * h * h);
}

}  // namespace

TEST(ParamGrid, SpacingAndRows) {
    ParamGrid g(32, 0.7);
    EXPECT_EQ(g.h(), 1.0 / 32.0);
    EXPECT_EQ(g.u(g.n()), 1.0);
    EXPECT_LE(std::abs(g.v(g.m()) - 0.7), g.h() / 2);
    EXPECT_EQ(g.size(), 33u * (g.m() + 1));
}

TEST(ParamGrid, RejectsTooFewNodes) {
    EXPECT_THROW(ParamGrid(4, 1.0), InputError);
    EXPECT_THROW(ParamGrid(16, 0.1), InputError);  // m = 2
    EXPECT_THROW(ParamGrid(16, -1.0), InputError);
    EXPECT_THROW(ParamGrid(16, std::nan("")), InputError);
}

TEST(Laplacian, ConstantIsAnnihilated) {
    ParamGrid g(16, 1.0);
    auto f = ScalarField::sample(g, [](double, double) { return 3.5; });
    auto l = laplacian(f);
    EXPECT_EQ(l.margin(), 1u);
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) EXPECT_NEAR(l(i, j), 0.0, 1e-10);
}

TEST(Laplacian, ExactOnQuadratics) {
    ParamGrid g(16, 1.5);
    auto l = laplacian(ScalarField::sample(g, [](double u, double v) { return u * u + v * v; }));
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) EXPECT_NEAR(l(i, j), 4.0, 1e-9);
}

TEST(Laplacian, QuarticAtCentre) {
    ParamGrid g(8, 1.0);
    auto l = laplacian(ScalarField::sample(g, [](double u, double) { return u * u * u * u; }));
    EXPECT_NEAR(l(4, 4), 3.03125, 1e-12);
}

TEST(Laplacian, OuterRingIsZeroed) {
    ParamGrid g(8, 1.0);
    auto l = laplacian(ScalarField::sample(g, [](double u, double v) { return u * v + u * u; }));
    for (std::size_t i = 0; i <= g.n(); ++i) {
        EXPECT_EQ(l(i, 0), 0.0);
        EXPECT_EQ(l(i, g.m()), 0.0);
    }
    EXPECT_TRUE(l.all_finite());
}

TEST(Laplacian, VectorFieldsActPerComponent) {
    ParamGrid g(12, 1.0);
    auto f = Vec3Field::sample(g, [](double u, double v) { return Vec3(u * u, v * v * v, u * v); });
    auto l = laplacian(f);
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) {
            EXPECT_NEAR(l(i, j).x(), 2.0, 1e-9);
            EXPECT_NEAR(l(i, j).y(), 6.0 * g.v(j), 1e-9);
            EXPECT_NEAR(l(i, j).z(), 0.0, 1e-9);
        }
}

TEST(Bilaplacian, HarmonicCubicVanishes) {
    ParamGrid g(16, 1.0);
    auto b = bilaplacian(ScalarField::sample(g, [](double u, double v) { return u * u * u - 3 * u * v * v; }));
    EXPECT_EQ(b.margin(), 2u);
    for (std::size_t j = 2; j + 2 <= g.m(); ++j)
        for (std::size_t i = 2; i + 2 <= g.n(); ++i) EXPECT_NEAR(b(i, j), 0.0, 1e-6);
}

TEST(Bilaplacian, ConstantLaplacianVanishes) {
    ParamGrid g(16, 1.0);
    auto b = bilaplacian(ScalarField::sample(g, [](double u, double v) { return u * u + v * v; }));
    for (std::size_t j = 2; j + 2 <= g.m(); ++j)
        for (std::size_t i = 2; i + 2 <= g.n(); ++i) EXPECT_NEAR(b(i, j), 0.0, 1e-6);
}

TEST(Bilaplacian, MatchesComposedStencil) {
    ParamGrid g(16, 1.0);
    auto fn = [](double u, double v) { return u * u * u * u + std::sin(3 * u) * v * v; };
    auto b = bilaplacian(ScalarField::sample(g, fn));
    for (std::size_t j = 2; j + 2 <= g.m(); ++j)
        for (std::size_t i = 2; i + 2 <= g.n(); ++i) {
            const double want = bilaplacian_oracle(fn, g.u(i), g.v(j), g.h());
            EXPECT_NEAR(b(i, j), want, 1e-6 * (1.0 + std::abs(want)));
        }
}

TEST(Bilaplacian, QuarticIsTwentyFour) {
    ParamGrid g(16, 1.0);
    auto b = bilaplacian(ScalarField::sample(g, [](double u, double) { return u * u * u * u; }));
    EXPECT_NEAR(b(8, 8), 24.0, 1e-6);
}

TEST(Wirtinger, HolomorphicIdentity) {
    ParamGrid g(16, 1.0);
    auto z = ComplexField::sample(g, [](double u, double v) { return Complex(u, v); });
    auto dz = d_z(z), dzb = d_zbar(z);
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) {
            EXPECT_NEAR(std::abs(dz(i, j) - Complex(1.0, 0.0)), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(dzb(i, j)), 0.0, 1e-12);
        }
}

TEST(Wirtinger, RealCoordinate) {
    ParamGrid g(16, 1.0);
    auto dz = d_z(ScalarField::sample(g, [](double u, double) { return u; }));
    EXPECT_NEAR(std::abs(dz(5, 7) - Complex(0.5, 0.0)), 0.0, 1e-12);
}

TEST(Wirtinger, BilinearAtSample) {
    ParamGrid g(8, 1.0);
    auto dz = d_z(ScalarField::sample(g, [](double u, double v) { return u * v; }));
    // (u, v) = (0.25, 0.5) is node (2, 4).
    EXPECT_NEAR(dz(2, 4).real(), 0.25, 1e-12);
    EXPECT_NEAR(dz(2, 4).imag(), -0.125, 1e-12);
}

TEST(Wirtinger, ConjugateSymmetryForRealFields) {
    ParamGrid g(10, 1.2);
    auto f = ScalarField::sample(g, [](double u, double v) { return std::exp(u) * std::cos(2 * v); });
    auto dz = d_z(f), dzb = d_zbar(f);
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) EXPECT_NEAR(std::abs(dzb(i, j) - std::conj(dz(i, j))), 0.0, 1e-12);
}

TEST(Operators, RejectMissingSupport) {
    ParamGrid g(8, 1.0);
    ScalarField f(g, 3);  // valid only from margin 3
    EXPECT_NO_THROW(laplacian(f));
    ScalarField deep(g, 4);
    EXPECT_THROW(laplacian(deep), InputError);
    EXPECT_THROW(bilaplacian(ScalarField(g, 3)), InputError);
}

TEST(HoleMask, RectangleAndDilation) {
    ParamGrid g(20, 1.0);
    auto m = HoleMask::rectangle(g, 0.4, 0.4, 0.6, 0.6);
    EXPECT_EQ(m.count(), 25u);
    EXPECT_EQ(m.edge_distance(), 8u);
    auto d = m.dilated(1);
    EXPECT_EQ(d.count(), 25u + 20u);
    EXPECT_TRUE(d.occluded(7, 10));
    EXPECT_FALSE(d.occluded(7, 7));  // 4-neighbour growth leaves the corners
}

TEST(HoleMask, InteriorRequirement) {
    ParamGrid g(20, 1.0);
    HoleMask m(g);
    EXPECT_THROW(m.require_interior(2, "test"), InputError);  // empty
    m.set(1, 10, true);
    EXPECT_THROW(m.require_interior(2, "test"), InputError);
    m.set(1, 10, false);
    m.set(2, 10, true);
    EXPECT_NO_THROW(m.require_interior(2, "test"));
}
