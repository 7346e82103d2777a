#include "lh/validate.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace lh {

SurfacePatch RigidMotion::apply(const SurfacePatch& s) const {
    Vec3Field out = transform(s.phi(), [this](const Vec3& p) -> Vec3 { return apply(p); });
    return SurfacePatch(std::move(out));
}

bool RigidMotion::is_proper(double tol) const {
    double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Alignment best_rigid_align(const SurfacePatch& a, const SurfacePatch& b) {
    require_same_grid(a.grid(), b.grid(), "best_rigid_align");
    const auto pa = a.phi().values();
    const auto pb = b.phi().values();
    const double count = static_cast<double>(pa.size());

    Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
    for (std::size_t idx = 0; idx < pa.size(); ++idx) {
        ca += pa[idx];
        cb += pb[idx];
    }
    ca /= count;
    cb /= count;

    Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d spread = Eigen::Matrix3d::Zero();
    for (std::size_t idx = 0; idx < pa.size(); ++idx) {
        Vec3 x = pa[idx] - ca;
        cross += x * (pb[idx] - cb).transpose();
        spread += x * x.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(spread);
    Eigen::Vector3d ev = eig.eigenvalues();  // ascending
    if (!(ev[1] > 1e-20 * ev[2]) || !(ev[2] > 0.0)) {
        throw NumericalError("best_rigid_align: alignment error, points are collinear or coincident");
    }

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    Eigen::Matrix3d v = svd.matrixV();
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;

    Alignment out;
    out.motion.rotation = v * d * u.transpose();
    out.motion.translation = cb - out.motion.rotation * ca;
    double sum = 0.0;
    for (std::size_t idx = 0; idx < pa.size(); ++idx) sum += (out.motion.apply(pa[idx]) - pb[idx]).squaredNorm();
    out.rmsd = std::sqrt(sum / count);
    return out;
}

namespace {

double magnitude(double x) { return std::abs(x); }
double magnitude(const Complex& x) { return std::abs(x); }
double magnitude(const Vec3& x) { return x.norm(); }

template <class T>
FieldError field_error_impl(const Field<T>& f, const Field<T>& ref, const ErrorRegion& region) {
    require_same_grid(f.grid(), ref.grid(), "field_error");
    const ParamGrid& g = f.grid();
    const std::size_t margin = std::max({region.margin, f.margin(), ref.margin()});
    FieldError e;
    double sum = 0.0, ref_max = 0.0;
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (g.margin(i, j) < margin) continue;
            if (region.exclude && region.exclude->occluded(i, j)) continue;
            if (region.only && !region.only->occluded(i, j)) continue;
            double d = magnitude(T(f(i, j) - ref(i, j)));
            e.max = std::max(e.max, d);
            sum += d * d;
            ref_max = std::max(ref_max, magnitude(ref(i, j)));
            ++e.count;
        }
    if (e.count == 0) throw InputError("field_error: empty comparison region");
    e.rms = std::sqrt(sum / static_cast<double>(e.count));
    e.relative = ref_max > 0.0 ? e.max / ref_max : e.max;
    return e;
}

}  // namespace

FieldError field_error(const ScalarField& f, const ScalarField& ref, const ErrorRegion& region) {
    return field_error_impl(f, ref, region);
}
FieldError field_error(const ComplexField& f, const ComplexField& ref, const ErrorRegion& region) {
    return field_error_impl(f, ref, region);
}
FieldError field_error(const Vec3Field& f, const Vec3Field& ref, const ErrorRegion& region) {
    return field_error_impl(f, ref, region);
}

double pairwise_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

double convergence_order(double e_n, double e_2n, double e_4n) {
    if (!(e_n > 0.0 && e_2n > 0.0 && e_4n > 0.0)) {
        throw InputError("convergence_order: errors must be positive");
    }
    return (std::log2(e_n) - std::log2(e_4n)) / 2.0;
}

}  // namespace lh
