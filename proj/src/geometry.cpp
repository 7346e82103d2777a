#include "lh/geometry.hpp"

#include <cmath>
#include <limits>

namespace lh {

SurfacePatch::SurfacePatch(Vec3Field phi) : phi_(std::move(phi)) {
    if (!phi_.all_finite()) throw InvariantError("surface patch has non-finite positions");
    phi_.set_margin(0);
}

double SurfacePatch::scale() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto& p : phi_.values()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

Tangents central_tangents(const SurfacePatch& s) {
    const ParamGrid& g = s.grid();
    detail::require_support(g, 1, "central_tangents");
    Tangents t{Vec3Field(g, 1), Vec3Field(g, 1)};
    const double inv_2h = 1.0 / (2.0 * g.h());
    const Vec3Field& phi = s.phi();
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) {
            t.du(i, j) = (phi(i + 1, j) - phi(i - 1, j)) * inv_2h;
            t.dv(i, j) = (phi(i, j + 1) - phi(i, j - 1)) * inv_2h;
        }
    return t;
}

namespace {

void check_tangents(const Tangents& t, double scale) {
    const ParamGrid& g = t.du.grid();
    const double tol = 1e-12 * scale * scale;
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) {
            double c = t.du(i, j).cross(t.dv(i, j)).norm();
            if (!(c > tol)) {
                throw InvariantError("immersion error at node (" + std::to_string(i) + "," + std::to_string(j) +
                                     "): degenerate or parallel tangents");
            }
        }
}

Tangents immersed_tangents(const SurfacePatch& s) {
    Tangents t = central_tangents(s);
    check_tangents(t, s.scale());
    return t;
}

Vec3Field normals_from(const Tangents& t) {
    return combine(t.du, t.dv, [](const Vec3& a, const Vec3& b) -> Vec3 { return a.cross(b).normalized(); });
}

ScalarField lambda_from(const Tangents& t) {
    return combine(t.du, t.dv, [](const Vec3& a, const Vec3& b) {
        return std::sqrt((a.squaredNorm() + b.squaredNorm()) / 2.0);
    });
}

ScalarField mean_curvature_from(const SurfacePatch& s, const Tangents& t) {
    const ScalarField lambda = lambda_from(t);
    const Vec3Field n = normals_from(t);
    const Vec3Field lap = laplacian(s.phi());
    const double zero_tol = 1e-12 * s.scale();
    ScalarField h(s.grid(), 1);
    const ParamGrid& g = s.grid();
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) {
            const Vec3& d = lap(i, j);
            double mag = d.norm();
            if (mag < zero_tol) continue;
            double sign = d.dot(n(i, j)) < 0.0 ? -1.0 : 1.0;
            double l = lambda(i, j);
            h(i, j) = sign * mag / (2.0 * l * l);
        }
    return h;
}

}  // namespace

void require_immersion(const SurfacePatch& s) { check_tangents(central_tangents(s), s.scale()); }

FirstFundamentalForm first_fundamental_form(const SurfacePatch& s) {
    Tangents t = immersed_tangents(s);
    return {combine(t.du, t.du, [](const Vec3& a, const Vec3& b) { return a.dot(b); }),
            combine(t.du, t.dv, [](const Vec3& a, const Vec3& b) { return a.dot(b); }),
            combine(t.dv, t.dv, [](const Vec3& a, const Vec3& b) { return a.dot(b); })};
}

ScalarField conformal_factor(const SurfacePatch& s) { return lambda_from(immersed_tangents(s)); }

Vec3Field surface_normal(const SurfacePatch& s) { return normals_from(immersed_tangents(s)); }

ScalarField mean_curvature(const SurfacePatch& s) { return mean_curvature_from(s, immersed_tangents(s)); }

ScalarField gaussian_curvature(const ScalarField& lambda) {
    const ParamGrid& g = lambda.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (lambda.valid(i, j) && !(lambda(i, j) > 0.0)) {
                throw InputError("gaussian_curvature: domain error, lambda <= 0 at node (" + std::to_string(i) +
                                 "," + std::to_string(j) + ")");
            }
    // -Lap(log lambda^2) / (2 lambda^2) for the metric lambda^2 |dz|^2.
    ScalarField log_metric = transform(lambda, [](double x) { return 2.0 * std::log(x); });
    ScalarField lap = laplacian(log_metric);
    return combine(lap, lambda, [](double l, double lam) { return -l / (2.0 * lam * lam); });
}

ComplexField mu_from_surface(const SurfacePatch& s) {
    Tangents t = immersed_tangents(s);
    const Vec3Field n = normals_from(t);
    const CVec3Field phi_zz = d_z(d_z(s.phi()));
    return combine(phi_zz, n, [](const CVec3& a, const Vec3& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    });
}

LambdaH extract_lambda_h(const SurfacePatch& s) {
    Tangents t = immersed_tangents(s);
    return {lambda_from(t), mean_curvature_from(s, t)};
}

ComplexField codazzi_residual(const ScalarField& lambda, const ScalarField& h_mean, const ComplexField& mu) {
    ComplexField mu_zbar = d_zbar(mu);
    ComplexField h_z = d_z(h_mean);
    ComplexField rhs = combine(h_z, lambda, [](const Complex& hz, double l) { return 0.5 * l * l * hz; });
    return combine(mu_zbar, rhs, [](const Complex& a, const Complex& b) { return a - b; });
}

ConformalityReport conformality_residual(const SurfacePatch& s, std::size_t bins) {
    FirstFundamentalForm fff = first_fundamental_form(s);
    const ParamGrid& g = s.grid();
    ConformalityReport r;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) {
            sum += (fff.e(i, j) + fff.g(i, j)) / 2.0;
            ++count;
        }
    r.mean_metric = sum / static_cast<double>(count);
    std::vector<double> f_norm;
    f_norm.reserve(count);
    for (std::size_t j = 1; j < g.m(); ++j)
        for (std::size_t i = 1; i < g.n(); ++i) {
            double f = fff.f(i, j) / r.mean_metric;
            f_norm.push_back(f);
            r.max_abs_f = std::max(r.max_abs_f, std::abs(f));
            r.max_abs_e_minus_g = std::max(r.max_abs_e_minus_g, std::abs(fff.e(i, j) - fff.g(i, j)) / r.mean_metric);
        }
    bins = std::max<std::size_t>(bins, 1);
    double range = r.max_abs_f > 0.0 ? r.max_abs_f : 1e-16;
    r.histogram_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        r.histogram_edges[b] = -range + 2.0 * range * static_cast<double>(b) / static_cast<double>(bins);
    r.histogram_counts.assign(bins, 0);
    for (double f : f_norm) {
        auto b = static_cast<std::size_t>(std::floor((f + range) / (2.0 * range) * static_cast<double>(bins)));
        r.histogram_counts[std::min(b, bins - 1)]++;
    }
    return r;
}

}  // namespace lh
