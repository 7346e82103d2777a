#include "lh/grid.hpp"

#include <cmath>
#include <limits>

namespace lh {

ParamGrid::ParamGrid(std::size_t n, double k) : n_(n), m_(0), k_(k), h_(0.0) {
    if (n < min_n) {
        throw InputError("grid size error: n = " + std::to_string(n) + " < " + std::to_string(min_n));
    }
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw InputError("grid size error: aspect ratio k must be positive and finite");
    }
    double m = std::round(k * static_cast<double>(n));
    if (m + 1.0 < static_cast<double>(min_nodes)) {
        throw InputError("grid size error: k*n gives fewer than " + std::to_string(min_nodes) +
                         " nodes along v");
    }
    if (m > 1e8) throw InputError("grid size error: m too large");
    m_ = static_cast<std::size_t>(m);
    h_ = 1.0 / static_cast<double>(n);
}

void require_same_grid(const ParamGrid& a, const ParamGrid& b, const char* what) {
    if (!(a == b)) throw InputError(std::string(what) + ": fields live on different grids");
}

namespace detail {

void require_support(const ParamGrid& grid, std::size_t margin, const char* op) {
    if (2 * margin > grid.n() || 2 * margin > grid.m()) {
        throw InputError(std::string(op) + ": grid size error, " + std::to_string(grid.nu()) + "x" +
                         std::to_string(grid.nv()) + " nodes cannot hold a stencil result with margin " +
                         std::to_string(margin));
    }
}

}  // namespace detail

HoleMask::HoleMask(const ParamGrid& grid, std::vector<std::uint8_t> occluded)
    : grid_(grid), occluded_(std::move(occluded)) {
    if (occluded_.size() != grid_.size()) throw InputError("mask size does not match grid");
    for (auto& x : occluded_) x = x ? 1 : 0;
}

HoleMask HoleMask::rectangle(const ParamGrid& grid, double u0, double v0, double u1, double v1) {
    HoleMask mask(grid);
    const double eps = 1e-9 * grid.h();
    for (std::size_t j = 0; j < grid.nv(); ++j)
        for (std::size_t i = 0; i < grid.nu(); ++i) {
            double u = grid.u(i), v = grid.v(j);
            if (u >= u0 - eps && u <= u1 + eps && v >= v0 - eps && v <= v1 + eps) mask.set(i, j, true);
        }
    return mask;
}

std::size_t HoleMask::count() const noexcept {
    std::size_t c = 0;
    for (auto x : occluded_) c += x;
    return c;
}

std::size_t HoleMask::edge_distance() const noexcept {
    std::size_t best = std::max(grid_.n(), grid_.m());
    for (std::size_t j = 0; j < grid_.nv(); ++j)
        for (std::size_t i = 0; i < grid_.nu(); ++i)
            if (occluded(i, j)) best = std::min(best, grid_.margin(i, j));
    return best;
}

HoleMask HoleMask::dilated(std::size_t steps) const {
    HoleMask cur = *this;
    for (std::size_t s = 0; s < steps; ++s) {
        HoleMask next = cur;
        for (std::size_t j = 0; j < grid_.nv(); ++j)
            for (std::size_t i = 0; i < grid_.nu(); ++i) {
                if (!cur.occluded(i, j)) continue;
                if (i > 0) next.set(i - 1, j, true);
                if (i + 1 < grid_.nu()) next.set(i + 1, j, true);
                if (j > 0) next.set(i, j - 1, true);
                if (j + 1 < grid_.nv()) next.set(i, j + 1, true);
            }
        cur = std::move(next);
    }
    return cur;
}

void HoleMask::require_interior(std::size_t min_margin, const char* what) const {
    if (empty()) throw InputError(std::string(what) + ": mask error, mask is empty");
    std::size_t d = edge_distance();
    if (d < min_margin) {
        throw InputError(std::string(what) + ": mask error, occluded node " + std::to_string(d) +
                         " nodes from the grid edge (need >= " + std::to_string(min_margin) + ")");
    }
}

}  // namespace lh
