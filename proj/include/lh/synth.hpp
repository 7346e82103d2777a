#pragma once

#include <optional>
#include <string>

#include "lh/geometry.hpp"

namespace lh {

enum class SynthKind { plane, tilted_plane, sphere_cap, catenoid, cylinder, ridge, snowman, sine_graph };

SynthKind parse_synth_kind(const std::string& name);
std::string synth_kind_name(SynthKind kind);

// Analytic test surfaces on [0,1] x [0,K]. Unset parameters take per-kind
// defaults (see synth.cpp); K = m h of the resulting grid.
struct SynthSpec {
    SynthKind kind = SynthKind::plane;
    std::size_t n = 32;
    std::optional<double> k;            // aspect ratio, default 1
    std::optional<double> radius;       // sphere-cap, cylinder: default 1
    std::optional<double> angle;        // degrees; tilted-plane tilt (30), ridge dihedral angle (90)
    std::optional<double> amplitude;    // sine-graph height (0.1)
    std::optional<double> chart_scale;  // parameter-to-chart scale, kind dependent
};

struct SynthSurface {
    SynthSurface(SurfacePatch p, std::optional<ScalarField> l, std::optional<ScalarField> h,
                 std::optional<ScalarField> k)
        : patch(std::move(p)), lambda(std::move(l)), h_mean(std::move(h)), gaussian(std::move(k)) {}

    SurfacePatch patch;
    // Closed-form (or quadrature-accurate for snowman) reference fields; absent
    // for non-conformal kinds. Ridge H is zero off the crease row.
    std::optional<ScalarField> lambda;
    std::optional<ScalarField> h_mean;
    std::optional<ScalarField> gaussian;
    std::optional<std::size_t> crease_row;  // ridge only: j of the crease
    bool conformal = true;
};

// Throws InputError for parameters outside a kind's validity range.
SynthSurface synth(const SynthSpec& spec);

}  // namespace lh
