#pragma once

#include <cmath>
#include <numbers>

#include "lh/mesh.hpp"

namespace lh::test {

// Structured triangulation of a (cols x rows) lattice mapped through fn(s, t),
// s, t in [0, 1]. Faces are CCW in (s, t); corner_ids are the lattice corners
// in boundary order (0,0), (1,0), (1,1), (0,1).
template <class Fn>
TriMesh lattice_mesh(std::size_t cols, std::size_t rows, Fn&& fn) {
    TriMesh mesh;
    for (std::size_t j = 0; j <= rows; ++j)
        for (std::size_t i = 0; i <= cols; ++i)
            mesh.vertices.push_back(fn(static_cast<double>(i) / cols, static_cast<double>(j) / rows));
    auto id = [cols](std::size_t i, std::size_t j) { return j * (cols + 1) + i; };
    for (std::size_t j = 0; j < rows; ++j)
        for (std::size_t i = 0; i < cols; ++i) {
            // Alternate the diagonal so the mesh has no preferred direction.
            if ((i + j) % 2 == 0) {
                mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            } else {
                mesh.faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
                mesh.faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
            }
        }
    mesh.corner_ids = {id(0, 0), id(cols, 0), id(cols, rows), id(0, rows)};
    return mesh;
}

// Flat width x height rectangle in the xy plane.
inline TriMesh rectangle_mesh(double width, double height, std::size_t cols, std::size_t rows) {
    return lattice_mesh(cols, rows, [=](double s, double t) { return Vec3(width * s, height * t, 0.0); });
}

// Half of a cylinder of radius r (arc length pi r along s) and height len.
// Its conformal aspect is len / (pi r).
inline TriMesh half_cylinder_mesh(double r, double len, std::size_t cols, std::size_t rows) {
    return lattice_mesh(cols, rows, [=](double s, double t) {
        const double th = std::numbers::pi * s;
        return Vec3(r * std::cos(th), r * std::sin(th), len * t);
    });
}

}  // namespace lh::test
