#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "lh/geometry.hpp"

namespace lh {

using Face = std::array<std::size_t, 3>;

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    // Rectangle corners on the boundary loop, in loop order: the sides
    // c0->c1, c1->c2, c2->c3, c3->c0 become v = 0, u = 1, v = K and u = 0.
    std::array<std::size_t, 4> corner_ids{};

    [[nodiscard]] double scale() const;  // bounding-box diagonal
};

// Wavefront OBJ: "v x y z" and "f a b c ..." records (1-based or negative
// indices, "a/t/n" forms accepted, polygons fanned); everything else ignored.
TriMesh read_obj(std::istream& in);
TriMesh load_obj(const std::string& path);
void write_obj(std::ostream& out, const TriMesh& mesh);
void save_obj(const std::string& path, const TriMesh& mesh);

// Checks indices, face areas (> 1e-12 scale^2), edge manifoldness and disk
// topology, and returns the boundary loop oriented along the faces' boundary
// half-edges. Throws InputError describing the first violation.
std::vector<std::size_t> boundary_loop(const TriMesh& mesh);

// Corners by a deterministic farthest-point rule on the boundary loop:
// c0 is the loop vertex farthest from the loop centroid, c2 the one farthest
// from c0, c1 and c3 maximize the distance sum to c0 and c2 on either arc.
// Ties go to the earlier loop position.
std::array<std::size_t, 4> auto_corners(const TriMesh& mesh);

// Two triangles per grid cell, vertex (i, j) at index j (n + 1) + i, corners
// at the grid corners.
TriMesh patch_to_mesh(const SurfacePatch& s);

}  // namespace lh
