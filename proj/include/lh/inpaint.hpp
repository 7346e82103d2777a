#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lh/geometry.hpp"
#include "lh/reconstruct.hpp"

namespace lh {

enum class InpaintMethod {
    automatic,  // direct up to direct_limit mask nodes, flow beyond
    flow,
    direct,
};

struct InpaintOptions {
    static constexpr std::size_t direct_limit = 20000;

    std::optional<double> dt;               // default h^4/40; must not exceed h^4/32
    std::optional<std::size_t> max_iters;   // default min(50 n^4, 5e6)
    // Stop once the largest update and its geometric tail (estimated from the
    // ratio of successive updates) are both below tol. Default 1e-10 * range.
    std::optional<double> tol;
    InpaintMethod method = InpaintMethod::automatic;

    [[nodiscard]] double time_step(const ParamGrid& g) const;
    [[nodiscard]] std::size_t iteration_cap(const ParamGrid& g) const;
    // Throws InputError for dt outside (0, h^4/32] or non-positive tol.
    void check(const ParamGrid& g) const;
};

InpaintMethod parse_method(const std::string& name);
std::string method_name(InpaintMethod m);

struct InpaintResult {
    ScalarField field;
    std::vector<double> energy;  // energy of every iterate, starting with the input
    std::size_t iterations = 0;
    bool converged = false;
    InpaintMethod method = InpaintMethod::flow;  // method actually used
};

// Discrete energy sum over valid nodes of |Lap f|^2 h^2.
double laplacian_energy(const ScalarField& f);

// Minimizes the discrete energy over the masked values with everything else
// clamped, by the explicit flow f <- f - dt Lap(Lap f) or by one sparse solve.
// The flow throws NumericalError when the energy rises; a rise within 1e-13
// relative is rounding, so that step is undone and the flow stops converged.
// The mask must sit at least f.margin() + 2 nodes inside the grid.
InpaintResult biharmonic_inpaint(const ScalarField& f, const HoleMask& mask, const InpaintOptions& opt = {});

// Lap(Lap f) = 0 on the mask as one SPD system.
ScalarField biharmonic_direct(const ScalarField& f, const HoleMask& mask);

// Per-coordinate discrete Laplace fill of the masked positions.
SurfacePatch initial_fill(const SurfacePatch& s, const HoleMask& mask);

struct SurfaceInpainting {
    SurfacePatch patch;
    SurfacePatch initial;       // harmonic fill
    HoleMask field_mask;        // nodes whose lambda/H were inpainted
    InpaintResult lambda;
    InpaintResult h_mean;
    std::vector<std::string> warnings;
};

// initial_fill -> extract (lambda, H) -> inpaint both -> reconstruct with the
// data outside the hole as boundary. The hole must sit >= 5 nodes inside.
SurfaceInpainting inpaint_surface(const SurfacePatch& s, const HoleMask& hole, const InpaintOptions& opt = {});

// CSV "iter,energy_lambda,energy_h"; the shorter history repeats its last value.
void write_energy_log(std::ostream& out, const InpaintResult& lambda, const InpaintResult& h_mean);

}  // namespace lh
