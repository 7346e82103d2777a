#include "lh/parameterize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "linear_solve.hpp"

namespace lh {

using detail::SparseMatrix;
using Triplet = Eigen::Triplet<double>;

namespace {

double cotangent(const Vec3& apex, const Vec3& b, const Vec3& c) {
    Vec3 e1 = b - apex, e2 = c - apex;
    return e1.dot(e2) / e1.cross(e2).norm();
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

// Rectangle perimeter position at arc-length fraction t along side s.
Vec2 perimeter(int side, double t, double k) {
    switch (side) {
        case 0: return {t, 0.0};
        case 1: return {1.0, t * k};
        case 2: return {1.0 - t, k};
        default: return {0.0, k * (1.0 - t)};
    }
}

}  // namespace

UvChart harmonic_param(const TriMesh& mesh, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("harmonic_param: k must be positive");
    const std::vector<std::size_t> loop = boundary_loop(mesh);
    const std::size_t nv = mesh.vertices.size();
    const std::size_t len = loop.size();

    // Rotate the loop to start at c0 and locate the other corners in order.
    auto start = std::find(loop.begin(), loop.end(), mesh.corner_ids[0]);
    if (start == loop.end()) throw InputError("harmonic_param: corner 0 is not on the boundary loop");
    std::vector<std::size_t> ring(start, loop.end());
    ring.insert(ring.end(), loop.begin(), start);
    std::array<std::size_t, 5> corner_pos{};
    for (int c = 1; c < 4; ++c) {
        auto it = std::find(ring.begin(), ring.end(), mesh.corner_ids[c]);
        if (it == ring.end()) {
            throw InputError("harmonic_param: corner " + std::to_string(c) + " is not on the boundary loop");
        }
        corner_pos[c] = static_cast<std::size_t>(it - ring.begin());
        if (corner_pos[c] <= corner_pos[c - 1]) {
            throw InputError("harmonic_param: corners are not in boundary-loop (counterclockwise) order");
        }
    }
    corner_pos[4] = len;

    UvChart chart;
    chart.k = k;
    chart.uv.assign(nv, Vec2::Zero());
    std::vector<std::uint8_t> on_boundary(nv, 0);
    for (int side = 0; side < 4; ++side) {
        const std::size_t b = corner_pos[side], e = corner_pos[side + 1];
        double total = 0.0;
        std::vector<double> cum{0.0};
        for (std::size_t p = b; p < e; ++p) {
            total += (mesh.vertices[ring[(p + 1) % len]] - mesh.vertices[ring[p]]).norm();
            cum.push_back(total);
        }
        for (std::size_t p = b; p < e; ++p) {
            chart.uv[ring[p]] = perimeter(side, cum[p - b] / total, k);
            on_boundary[ring[p]] = 1;
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, double> weights;
    for (const Face& f : mesh.faces)
        for (int c = 0; c < 3; ++c) {
            std::size_t a = f[c], b = f[(c + 1) % 3], o = f[(c + 2) % 3];
            double w = 0.5 * cotangent(mesh.vertices[o], mesh.vertices[a], mesh.vertices[b]);
            weights[{std::min(a, b), std::max(a, b)}] += w;
        }

    std::vector<std::ptrdiff_t> col(nv, -1);
    std::size_t count = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (!on_boundary[v]) col[v] = static_cast<std::ptrdiff_t>(count++);
    if (count == 0) return chart;

    std::vector<Triplet> trip;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), 2);
    for (const auto& [edge, raw] : weights) {
        const double w = std::max(raw, 1e-6);
        auto [p, q] = edge;
        for (auto [x, y] : {std::pair{p, q}, std::pair{q, p}}) {
            if (col[x] < 0) continue;
            trip.emplace_back(static_cast<int>(col[x]), static_cast<int>(col[x]), w);
            if (col[y] >= 0) {
                trip.emplace_back(static_cast<int>(col[x]), static_cast<int>(col[y]), -w);
            } else {
                b.row(col[x]) += w * chart.uv[y].transpose();
            }
        }
    }
    SparseMatrix a(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd x = detail::spd_solve(a, b, "harmonic_param");
    const double bn = b.norm();
    chart.laplace_residual = (a * x - b).norm() / (bn > 0.0 ? bn : 1.0);
    for (std::size_t v = 0; v < nv; ++v)
        if (col[v] >= 0) chart.uv[v] = x.row(col[v]).transpose();

    std::size_t flipped = 0;
    for (const Face& f : mesh.faces)
        if (!(signed_area(chart.uv[f[0]], chart.uv[f[1]], chart.uv[f[2]]) > 0.0)) ++flipped;
    if (flipped > 0) {
        throw InvariantError("flattening error: " + std::to_string(flipped) + " flipped triangle(s) in the uv chart");
    }
    return chart;
}

double chart_distortion(const TriMesh& mesh, const UvChart& chart) {
    double sum = 0.0, area_sum = 0.0;
    for (const Face& f : mesh.faces) {
        const Vec2 d1 = chart.uv[f[1]] - chart.uv[f[0]];
        const Vec2 d2 = chart.uv[f[2]] - chart.uv[f[0]];
        const Vec3 e1 = mesh.vertices[f[1]] - mesh.vertices[f[0]];
        const Vec3 e2 = mesh.vertices[f[2]] - mesh.vertices[f[0]];
        const double det = d1.x() * d2.y() - d1.y() * d2.x();
        // Solve [phi_u phi_v] [d1 d2] = [e1 e2].
        const Vec3 phi_u = (e1 * d2.y() - e2 * d1.y()) / det;
        const Vec3 phi_v = (e2 * d1.x() - e1 * d2.x()) / det;
        const double ee = phi_u.squaredNorm(), ff = phi_u.dot(phi_v), gg = phi_v.squaredNorm();
        const double area = 0.5 * e1.cross(e2).norm();
        sum += area * std::sqrt((ee - gg) * (ee - gg) + 4.0 * ff * ff) / (ee + gg);
        area_sum += area;
    }
    return sum / area_sum;
}

AspectSearch optimal_aspect(const TriMesh& mesh) {
    AspectSearch out;
    out.distortion = INFINITY;
    auto objective = [&](double log_k) {
        const double k = std::exp(log_k);
        ++out.evaluations;
        double value = INFINITY;
        try {
            value = chart_distortion(mesh, harmonic_param(mesh, k));
        } catch (const InvariantError& e) {
            out.warnings.push_back("optimal_aspect: k = " + std::to_string(k) + " rejected (" + e.what() + ")");
        }
        if (value < out.distortion) {
            out.distortion = value;
            out.k = k;
        }
        return value;
    };

    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(0.1), hi = std::log(10.0);
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int iter = 0; iter < 40; ++iter) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1, f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2, f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(x2);
        }
    }
    if (!std::isfinite(out.distortion)) {
        throw InvariantError("optimal_aspect: no candidate k produced a valid chart");
    }
    if (out.k < 0.1 * 1.001 || out.k > 10.0 / 1.001) {
        out.warnings.push_back("optimal_aspect: optimum at the edge of the search range [0.1, 10]");
    }
    return out;
}

SurfacePatch resample_to_grid(const TriMesh& mesh, const UvChart& chart, const ParamGrid& grid) {
    if (chart.uv.size() != mesh.vertices.size()) throw InputError("resample_to_grid: chart does not match mesh");
    const double snap = 1e-9;
    const double k = chart.k;

    // Uniform buckets over [0,1] x [0,k].
    const auto side = static_cast<std::size_t>(std::max(1.0, std::sqrt(static_cast<double>(mesh.faces.size()) / 2.0)));
    const std::size_t bu = side, bv = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(side * k)));
    auto bucket_of = [&](double u, double v, std::size_t& iu, std::size_t& iv) {
        iu = static_cast<std::size_t>(std::clamp(u, 0.0, 1.0) * static_cast<double>(bu));
        iv = static_cast<std::size_t>(std::clamp(v / k, 0.0, 1.0) * static_cast<double>(bv));
        iu = std::min(iu, bu - 1);
        iv = std::min(iv, bv - 1);
    };
    std::vector<std::vector<std::size_t>> buckets(bu * bv);
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const Face& f = mesh.faces[fi];
        Vec2 lo = chart.uv[f[0]].cwiseMin(chart.uv[f[1]]).cwiseMin(chart.uv[f[2]]);
        Vec2 hi = chart.uv[f[0]].cwiseMax(chart.uv[f[1]]).cwiseMax(chart.uv[f[2]]);
        std::size_t u0, v0, u1, v1;
        bucket_of(lo.x() - snap, lo.y() - snap, u0, v0);
        bucket_of(hi.x() + snap, hi.y() + snap, u1, v1);
        for (std::size_t iv = v0; iv <= v1; ++iv)
            for (std::size_t iu = u0; iu <= u1; ++iu) buckets[iv * bu + iu].push_back(fi);
    }

    Vec3Field phi(grid);
    std::vector<std::pair<std::size_t, std::size_t>> uncovered;
    const double v_scale = k / (static_cast<double>(grid.m()) * grid.h());
    for (std::size_t j = 0; j < grid.nv(); ++j)
        for (std::size_t i = 0; i < grid.nu(); ++i) {
            const Vec2 p(grid.u(i), grid.v(j) * v_scale);
            std::size_t iu, iv;
            bucket_of(p.x(), p.y(), iu, iv);
            double best = -INFINITY;
            Vec3 value = Vec3::Zero();
            for (std::size_t fi : buckets[iv * bu + iu]) {
                const Face& f = mesh.faces[fi];
                const Vec2 &a = chart.uv[f[0]], &b = chart.uv[f[1]], &c = chart.uv[f[2]];
                const double total = signed_area(a, b, c);
                const double l0 = signed_area(p, b, c) / total;
                const double l1 = signed_area(a, p, c) / total;
                const double l2 = 1.0 - l0 - l1;
                const double worst = std::min({l0, l1, l2});
                if (worst >= -snap && worst > best) {
                    best = worst;
                    value = l0 * mesh.vertices[f[0]] + l1 * mesh.vertices[f[1]] + l2 * mesh.vertices[f[2]];
                }
            }
            if (best == -INFINITY) uncovered.emplace_back(i, j);
            phi(i, j) = value;
        }
    if (!uncovered.empty()) {
        std::ostringstream msg;
        msg << "coverage error: " << uncovered.size() << " grid node(s) outside the chart:";
        for (std::size_t t = 0; t < std::min<std::size_t>(uncovered.size(), 10); ++t)
            msg << " (" << uncovered[t].first << "," << uncovered[t].second << ")";
        if (uncovered.size() > 10) msg << " ...";
        throw InvariantError(msg.str());
    }
    SurfacePatch out(std::move(phi));
    require_immersion(out);
    return out;
}

}  // namespace lh
