#include <gtest/gtest.h>

#include "lh/synth.hpp"
#include "lh/validate.hpp"

using namespace lh;

namespace {

SynthSurface make(SynthKind kind, std::size_t n = 32) {
    SynthSpec spec;
    spec.kind = kind;
    spec.n = n;
    return synth(spec);
}

}  // namespace

TEST(Synth, PlaneReferences) {
    auto s = make(SynthKind::plane);
    const auto& g = s.patch.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            EXPECT_EQ(s.patch.phi()(i, j), Vec3(g.u(i), g.v(j), 0.0));
            EXPECT_EQ((*s.lambda)(i, j), 1.0);
            EXPECT_EQ((*s.h_mean)(i, j), 0.0);
            EXPECT_EQ((*s.gaussian)(i, j), 0.0);
        }
}

TEST(Synth, EveryKindIsAnImmersion) {
    for (auto kind : {SynthKind::plane, SynthKind::tilted_plane, SynthKind::sphere_cap, SynthKind::catenoid,
                      SynthKind::cylinder, SynthKind::ridge, SynthKind::snowman, SynthKind::sine_graph}) {
        auto s = make(kind, 64);
        EXPECT_NO_THROW(require_immersion(s.patch)) << synth_kind_name(kind);
        EXPECT_EQ(parse_synth_kind(synth_kind_name(kind)), kind);
        // The ridge is conformal on both faces; central differences across the crease are not.
        if (s.conformal && kind != SynthKind::ridge) {
            EXPECT_TRUE(conformality_residual(s.patch).conformal()) << synth_kind_name(kind);
        }
    }
    EXPECT_FALSE(conformality_residual(make(SynthKind::sine_graph).patch).conformal());
}

TEST(Synth, ReferencesMatchForwardFields) {
    // Kinds with smooth closed forms: forward fields converge to the references.
    for (auto kind : {SynthKind::sphere_cap, SynthKind::catenoid, SynthKind::cylinder, SynthKind::snowman}) {
        double e[2];
        std::size_t ns[2] = {64, 128};
        for (int t = 0; t < 2; ++t) {
            auto s = make(kind, ns[t]);
            auto lh = extract_lambda_h(s.patch);
            e[t] = field_error(lh.lambda, *s.lambda).relative + field_error(lh.h_mean, *s.h_mean).max;
        }
        EXPECT_GT(e[0] / e[1], 2.8) << synth_kind_name(kind);
    }
}

TEST(Synth, RidgeCreaseAndFlatSides) {
    auto s = make(SynthKind::ridge);
    ASSERT_TRUE(s.crease_row.has_value());
    const auto& g = s.patch.grid();
    EXPECT_EQ(*s.crease_row, g.m() / 2);
    for (std::size_t i = 0; i < g.nu(); ++i) {
        EXPECT_NEAR(s.patch.phi()(i, *s.crease_row).y(), 0.0, 1e-15);
        EXPECT_NEAR(s.patch.phi()(i, *s.crease_row).z(), 0.0, 1e-15);
    }
    auto h = extract_lambda_h(s.patch).h_mean;
    for (std::size_t j = 1; j < g.m(); ++j) {
        if (j + 1 >= *s.crease_row && j <= *s.crease_row + 1) continue;
        for (std::size_t i = 1; i < g.n(); ++i) EXPECT_NEAR(h(i, j), 0.0, 1e-10);
    }
}

TEST(Synth, InvalidParameters) {
    SynthSpec spec;
    spec.kind = SynthKind::sphere_cap;
    spec.radius = -1.0;
    EXPECT_THROW(synth(spec), InputError);
    spec.kind = SynthKind::ridge;
    spec.radius.reset();
    spec.angle = 200.0;
    EXPECT_THROW(synth(spec), InputError);
    spec.angle.reset();
    spec.n = 33;  // odd m
    EXPECT_THROW(synth(spec), InputError);
    EXPECT_THROW(parse_synth_kind("torus"), InputError);
}
