#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "lh/geometry.hpp"

namespace lh {

struct RigidMotion {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 translation = Vec3::Zero();

    [[nodiscard]] Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    [[nodiscard]] SurfacePatch apply(const SurfacePatch& s) const;

    // True when R^T R = I and det R = 1 within tol.
    [[nodiscard]] bool is_proper(double tol = 1e-10) const;
};

struct Alignment {
    RigidMotion motion;  // maps a onto b
    double rmsd = 0.0;
};

// Closed-form orthogonal Procrustes (Kabsch) over corresponding grid nodes,
// reflections excluded.
Alignment best_rigid_align(const SurfacePatch& a, const SurfacePatch& b);

// Nodes that take part in an error measurement. The effective margin is the
// largest of `margin` and the compared fields' margins.
struct ErrorRegion {
    std::size_t margin = 0;
    std::optional<HoleMask> exclude;   // nodes skipped
    std::optional<HoleMask> only;      // if set, only these nodes count
};

struct FieldError {
    double max = 0.0;
    double rms = 0.0;
    double relative = 0.0;  // max / max|ref| (max itself when ref vanishes)
    std::size_t count = 0;
};

FieldError field_error(const ScalarField& f, const ScalarField& ref, const ErrorRegion& region = {});
FieldError field_error(const ComplexField& f, const ComplexField& ref, const ErrorRegion& region = {});
FieldError field_error(const Vec3Field& f, const Vec3Field& ref, const ErrorRegion& region = {});

// Observed order from errors at n, 2n, 4n: least-squares slope of log2 e
// against refinement level, (log2 e0 - log2 e2) / 2.
double convergence_order(double e_n, double e_2n, double e_4n);
// log2(e_coarse / e_fine).
double pairwise_order(double e_coarse, double e_fine);

}  // namespace lh
