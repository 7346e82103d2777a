#include "lh/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <Eigen/Geometry>

namespace lh {

double TriMesh::scale() const {
    if (vertices.empty()) return 0.0;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto& p : vertices) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

namespace {

std::size_t obj_index(const std::string& token, std::size_t vertex_count, std::size_t line) {
    std::string head = token.substr(0, token.find('/'));
    long long idx = 0;
    try {
        std::size_t used = 0;
        idx = std::stoll(head, &used);
        if (used != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
        throw InputError("OBJ line " + std::to_string(line) + ": bad face index '" + token + "'");
    }
    long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
    if (idx == 0 || resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
        throw InputError("OBJ line " + std::to_string(line) + ": face index " + head + " out of range");
    }
    return static_cast<std::size_t>(resolved);
}

}  // namespace

TriMesh read_obj(std::istream& in) {
    TriMesh mesh;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        std::istringstream ls(text);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p[0] >> p[1] >> p[2]) || !p.allFinite()) {
                throw InputError("OBJ line " + std::to_string(line) + ": malformed vertex");
            }
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<std::size_t> poly;
            std::string tok;
            while (ls >> tok) poly.push_back(obj_index(tok, mesh.vertices.size(), line));
            if (poly.size() < 3) throw InputError("OBJ line " + std::to_string(line) + ": face with < 3 vertices");
            for (std::size_t t = 1; t + 1 < poly.size(); ++t) mesh.faces.push_back({poly[0], poly[t], poly[t + 1]});
        }
    }
    if (mesh.faces.empty()) throw InputError("OBJ: no faces");
    return mesh;
}

TriMesh load_obj(const std::string& path) {
    if (path == "-") return read_obj(std::cin);
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_obj(in);
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
    char buf[128];
    for (const auto& p : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p[0], p[1], p[2]);
        out << buf;
    }
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_obj(const std::string& path, const TriMesh& mesh) {
    if (path == "-") {
        write_obj(std::cout, mesh);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    write_obj(out, mesh);
    if (!out) throw InputError("write failed: " + path);
}

std::vector<std::size_t> boundary_loop(const TriMesh& mesh) {
    const std::size_t nv = mesh.vertices.size();
    const double min_area = 1e-12 * mesh.scale() * mesh.scale();
    std::vector<std::uint8_t> used(nv, 0);
    std::unordered_map<std::uint64_t, std::size_t> half_edges;
    auto key = [nv](std::size_t a, std::size_t b) { return static_cast<std::uint64_t>(a) * nv + b; };

    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const Face& f = mesh.faces[fi];
        for (std::size_t c = 0; c < 3; ++c) {
            if (f[c] >= nv) throw InputError("mesh: face " + std::to_string(fi) + " has an out-of-range vertex");
            used[f[c]] = 1;
        }
        const Vec3& a = mesh.vertices[f[0]];
        double area = 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
        if (!(area > min_area)) throw InputError("mesh: degenerate face " + std::to_string(fi));
        for (std::size_t c = 0; c < 3; ++c) {
            auto [it, fresh] = half_edges.emplace(key(f[c], f[(c + 1) % 3]), fi);
            if (!fresh) {
                throw InputError("topology error: edge (" + std::to_string(f[c]) + "," + std::to_string(f[(c + 1) % 3]) +
                                 ") is non-manifold or inconsistently oriented");
            }
        }
    }
    for (std::size_t v = 0; v < nv; ++v)
        if (!used[v]) throw InputError("topology error: vertex " + std::to_string(v) + " belongs to no face");

    // Boundary half-edges have no twin; each boundary vertex needs exactly one.
    std::vector<std::size_t> next(nv, nv);
    std::size_t boundary_edges = 0;
    std::size_t edges = 0;
    for (const Face& f : mesh.faces)
        for (std::size_t c = 0; c < 3; ++c) {
            std::size_t a = f[c], b = f[(c + 1) % 3];
            if (half_edges.count(key(b, a))) {
                if (a < b) ++edges;
                continue;
            }
            ++edges;
            ++boundary_edges;
            if (next[a] != nv) {
                throw InputError("topology error: boundary pinches at vertex " + std::to_string(a));
            }
            next[a] = b;
        }
    if (boundary_edges == 0) throw InputError("topology error: mesh is closed (no boundary)");

    std::size_t start = nv;
    for (std::size_t v = 0; v < nv && start == nv; ++v)
        if (next[v] != nv) start = v;
    std::vector<std::size_t> loop;
    for (std::size_t v = start;;) {
        loop.push_back(v);
        v = next[v];
        if (v == nv) throw InputError("topology error: open boundary chain");
        if (v == start) break;
        if (loop.size() > boundary_edges) throw InputError("topology error: malformed boundary");
    }
    if (loop.size() != boundary_edges) {
        throw InputError("topology error: more than one boundary loop (mesh is not a disk)");
    }
    long long euler = static_cast<long long>(nv) - static_cast<long long>(edges) +
                      static_cast<long long>(mesh.faces.size());
    if (euler != 1) {
        throw InputError("topology error: Euler characteristic " + std::to_string(euler) + " (a disk has 1)");
    }
    return loop;
}

std::array<std::size_t, 4> auto_corners(const TriMesh& mesh) {
    const std::vector<std::size_t> loop = boundary_loop(mesh);
    const std::size_t len = loop.size();
    if (len < 4) throw InputError("auto corners: boundary loop has fewer than 4 vertices");
    auto at = [&](std::size_t pos) -> const Vec3& { return mesh.vertices[loop[pos % len]]; };

    Vec3 centroid = Vec3::Zero();
    for (std::size_t p = 0; p < len; ++p) centroid += at(p);
    centroid /= static_cast<double>(len);

    auto argmax = [&](std::size_t begin, std::size_t end, auto&& score) {
        std::size_t best = begin;
        double best_score = -1.0;
        for (std::size_t p = begin; p < end; ++p) {
            double s = score(at(p));
            if (s > best_score) best_score = s, best = p;
        }
        return best;
    };
    std::size_t p0 = argmax(0, len, [&](const Vec3& x) { return (x - centroid).norm(); });
    std::vector<std::size_t> rotated(len);
    for (std::size_t p = 0; p < len; ++p) rotated[p] = loop[(p0 + p) % len];
    auto at_rot = [&](std::size_t pos) -> const Vec3& { return mesh.vertices[rotated[pos]]; };
    auto argmax_rot = [&](std::size_t begin, std::size_t end, auto&& score) {
        std::size_t best = begin;
        double best_score = -1.0;
        for (std::size_t p = begin; p < end; ++p) {
            double s = score(at_rot(p));
            if (s > best_score) best_score = s, best = p;
        }
        return best;
    };
    const Vec3 c0 = at_rot(0);
    std::size_t d2 = argmax_rot(1, len, [&](const Vec3& x) { return (x - c0).norm(); });
    if (d2 < 2 || d2 + 2 > len) throw InputError("auto corners: boundary loop too short between corners");
    const Vec3 c2 = at_rot(d2);
    auto sum = [&](const Vec3& x) { return (x - c0).norm() + (x - c2).norm(); };
    std::size_t d1 = argmax_rot(1, d2, sum);
    std::size_t d3 = argmax_rot(d2 + 1, len, sum);
    return {rotated[0], rotated[d1], rotated[d2], rotated[d3]};
}

TriMesh patch_to_mesh(const SurfacePatch& s) {
    const ParamGrid& g = s.grid();
    TriMesh mesh;
    mesh.vertices.assign(s.phi().values().begin(), s.phi().values().end());
    for (std::size_t j = 0; j < g.m(); ++j)
        for (std::size_t i = 0; i < g.n(); ++i) {
            std::size_t a = g.index(i, j), b = g.index(i + 1, j), c = g.index(i + 1, j + 1), d = g.index(i, j + 1);
            mesh.faces.push_back({a, b, c});
            mesh.faces.push_back({a, c, d});
        }
    mesh.corner_ids = {g.index(0, 0), g.index(g.n(), 0), g.index(g.n(), g.m()), g.index(0, g.m())};
    return mesh;
}

}  // namespace lh
