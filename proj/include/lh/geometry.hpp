#pragma once

#include <vector>

#include <Eigen/Geometry>

#include "lh/grid.hpp"

namespace lh {

// Position field phi(u_i, v_j) of a parameterized surface patch.
class SurfacePatch {
public:
    explicit SurfacePatch(Vec3Field phi);

    [[nodiscard]] const ParamGrid& grid() const noexcept { return phi_.grid(); }
    [[nodiscard]] const Vec3Field& phi() const noexcept { return phi_; }
    [[nodiscard]] Vec3Field& phi() noexcept { return phi_; }

    // Diagonal of the axis-aligned bounding box; the unit of every absolute
    // geometric tolerance.
    [[nodiscard]] double scale() const;

private:
    Vec3Field phi_;
};

// Throws InvariantError naming the first node (margin >= 1) where the central
// difference tangents are zero or parallel.
void require_immersion(const SurfacePatch& s);

struct LambdaH {
    ScalarField lambda;  // conformal factor, > 0 on its valid region
    ScalarField h_mean;  // mean curvature, signed by the chart normal
};

struct FirstFundamentalForm {
    ScalarField e;
    ScalarField f;
    ScalarField g;
};

// Central-difference tangents (phi_{i+1,j}-phi_{i-1,j})/2h and the v analogue.
struct Tangents {
    Vec3Field du;
    Vec3Field dv;
};
Tangents central_tangents(const SurfacePatch& s);

FirstFundamentalForm first_fundamental_form(const SurfacePatch& s);

// lambda^2 = (|d_u phi|^2 + |d_v phi|^2) / 2, so lambda^2 == (E + G) / 2.
ScalarField conformal_factor(const SurfacePatch& s);

// Unit normal of the central-difference tangents, d_u phi x d_v phi.
Vec3Field surface_normal(const SurfacePatch& s);

// H = sign(<Lap phi, n>) |Lap phi| / (2 lambda^2). Nodes where |Lap phi| is
// below 1e-12 * scale get H = 0.
ScalarField mean_curvature(const SurfacePatch& s);

// K = -Lap(log lambda^2) / (2 lambda^2) for the metric lambda^2 (du^2 + dv^2).
ScalarField gaussian_curvature(const ScalarField& lambda);

// mu = <phi_zz, n> with phi_zz = d_z(d_z(phi)).
ComplexField mu_from_surface(const SurfacePatch& s);

LambdaH extract_lambda_h(const SurfacePatch& s);

// d_zbar(mu) - (lambda^2 / 2) d_z(H); vanishes for a consistent (lambda, H, mu).
ComplexField codazzi_residual(const ScalarField& lambda, const ScalarField& h_mean, const ComplexField& mu);

struct ConformalityReport {
    double max_abs_f = 0.0;         // max |F| / mean((E+G)/2)
    double max_abs_e_minus_g = 0.0; // max |E-G| / mean((E+G)/2)
    double mean_metric = 0.0;       // mean((E+G)/2) over the valid region
    std::vector<double> histogram_edges;  // normalized F bin edges
    std::vector<std::size_t> histogram_counts;

    static constexpr double accept_threshold = 0.05;
    [[nodiscard]] double max_residual() const { return std::max(max_abs_f, max_abs_e_minus_g); }
    [[nodiscard]] bool conformal() const { return max_residual() <= accept_threshold; }
};

ConformalityReport conformality_residual(const SurfacePatch& s, std::size_t bins = 21);

}  // namespace lh
