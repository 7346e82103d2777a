#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "lh/mesh.hpp"

namespace lh {

using Vec2 = Eigen::Vector2d;

struct UvChart {
    std::vector<Vec2> uv;  // one per mesh vertex, inside [0,1] x [0,k]
    double k = 1.0;
    double laplace_residual = 0.0;  // |L uv - b| / |b| over interior vertices
};

// Piecewise-linear harmonic map onto [0,1] x [0,k]: cotangent weights
// (clamped below at 1e-6), boundary loop placed on the rectangle perimeter
// by arc length per side, corners pinned. Throws InputError for non-disk
// input and InvariantError (with the count) for flipped triangles.
UvChart harmonic_param(const TriMesh& mesh, double k);

// 3D-area-weighted mean over triangles of sqrt((E-G)^2 + 4F^2) / (E+G) of
// the chart-to-surface map; zero for a conformal chart.
double chart_distortion(const TriMesh& mesh, const UvChart& chart);

struct AspectSearch {
    double k = 1.0;
    double distortion = 0.0;
    std::size_t evaluations = 0;
    std::vector<std::string> warnings;
};

// Golden-section search of chart_distortion over log k in [log 0.1, log 10]
// (at most 40 iterations); returns the best sampled k.
AspectSearch optimal_aspect(const TriMesh& mesh);

// Barycentric interpolation of vertex positions at every grid node. Grid
// v_j is stretched onto the chart height: v = v_j k / (m h). Nodes are
// matched with a 1e-9 barycentric snap; uncovered nodes raise InvariantError.
SurfacePatch resample_to_grid(const TriMesh& mesh, const UvChart& chart, const ParamGrid& grid);

}  // namespace lh
