#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "lh/errors.hpp"
#include "lh/parallel.hpp"

namespace lh {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

// ---------------------------------------------------------------------------
// ParamGrid
// ---------------------------------------------------------------------------

// Uniform grid on [0,1] x [0,~k]: nodes u_i = i*h, v_j = j*h with h = 1/n and
// m = round(k*n). Both axes share the spacing h, so v_m is within h/2 of k.
class ParamGrid {
public:
    static constexpr std::size_t min_n = 8;
    static constexpr std::size_t min_nodes = 5;

    ParamGrid(std::size_t n, double k);

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] double k() const noexcept { return k_; }
    [[nodiscard]] double h() const noexcept { return h_; }

    [[nodiscard]] std::size_t nu() const noexcept { return n_ + 1; }
    [[nodiscard]] std::size_t nv() const noexcept { return m_ + 1; }
    [[nodiscard]] std::size_t size() const noexcept { return nu() * nv(); }

    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nu() + i; }
    [[nodiscard]] double u(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }
    [[nodiscard]] double v(std::size_t j) const noexcept { return static_cast<double>(j) * h_; }

    // Distance (in nodes) from (i,j) to the nearest grid edge.
    [[nodiscard]] std::size_t margin(std::size_t i, std::size_t j) const noexcept {
        return std::min({i, j, n_ - i, m_ - j});
    }

    friend bool operator==(const ParamGrid& a, const ParamGrid& b) noexcept {
        return a.n_ == b.n_ && a.m_ == b.m_ && a.k_ == b.k_;
    }

private:
    std::size_t n_;
    std::size_t m_;
    double k_;
    double h_;
};

void require_same_grid(const ParamGrid& a, const ParamGrid& b, const char* what);

// ---------------------------------------------------------------------------
// Value-type helpers
// ---------------------------------------------------------------------------

template <class T>
T zero_value() {
    if constexpr (std::is_base_of_v<Eigen::MatrixBase<T>, T>) {
        return T::Zero();
    } else {
        return T{};
    }
}

template <class T>
struct complexified;
template <>
struct complexified<double> { using type = Complex; };
template <>
struct complexified<Complex> { using type = Complex; };
template <>
struct complexified<Vec3> { using type = CVec3; };
template <>
struct complexified<CVec3> { using type = CVec3; };
template <class T>
using complexified_t = typename complexified<T>::type;

inline Complex to_complex(double x) { return {x, 0.0}; }
inline Complex to_complex(const Complex& x) { return x; }
inline CVec3 to_complex(const Vec3& x) { return x.cast<Complex>(); }
inline CVec3 to_complex(const CVec3& x) { return x; }

inline Complex conj_value(const Complex& x) { return std::conj(x); }
inline CVec3 conj_value(const CVec3& x) { return x.conjugate(); }

inline bool is_finite_value(double x) { return std::isfinite(x); }
inline bool is_finite_value(const Complex& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }
inline bool is_finite_value(const Vec3& x) { return x.allFinite(); }
inline bool is_finite_value(const CVec3& x) {
    return x.real().allFinite() && x.imag().allFinite();
}

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

// One value per grid node, row-major with i fastest. `margin` is the width of
// the outer band whose values are not defined by the producing operator; those
// entries hold zero.
template <class T>
class Field {
public:
    using value_type = T;

    explicit Field(const ParamGrid& grid, std::size_t margin = 0)
        : grid_(grid), values_(grid.size(), zero_value<T>()), margin_(margin) {}

    Field(const ParamGrid& grid, std::vector<T> values, std::size_t margin = 0)
        : grid_(grid), values_(std::move(values)), margin_(margin) {
        if (values_.size() != grid_.size()) {
            throw InputError("field value count " + std::to_string(values_.size()) +
                             " does not match grid size " + std::to_string(grid_.size()));
        }
    }

    // Samples fn(u, v) at every node.
    template <class Fn>
    static Field sample(const ParamGrid& grid, Fn&& fn) {
        Field out(grid);
        for (std::size_t j = 0; j < grid.nv(); ++j)
            for (std::size_t i = 0; i < grid.nu(); ++i) out(i, j) = fn(grid.u(i), grid.v(j));
        return out;
    }

    [[nodiscard]] const ParamGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t margin() const noexcept { return margin_; }
    void set_margin(std::size_t margin) noexcept { margin_ = margin; }

    [[nodiscard]] bool valid(std::size_t i, std::size_t j) const noexcept {
        return grid_.margin(i, j) >= margin_;
    }

    T& operator()(std::size_t i, std::size_t j) noexcept { return values_[grid_.index(i, j)]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return values_[grid_.index(i, j)]; }
    T& operator[](std::size_t idx) noexcept { return values_[idx]; }
    const T& operator[](std::size_t idx) const noexcept { return values_[idx]; }

    [[nodiscard]] std::span<T> values() noexcept { return values_; }
    [[nodiscard]] std::span<const T> values() const noexcept { return values_; }

    // Zeroes every entry outside the valid region.
    void clear_margin() {
        for (std::size_t j = 0; j < grid_.nv(); ++j)
            for (std::size_t i = 0; i < grid_.nu(); ++i)
                if (!valid(i, j)) (*this)(i, j) = zero_value<T>();
    }

    [[nodiscard]] bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](const T& x) { return is_finite_value(x); });
    }

private:
    ParamGrid grid_;
    std::vector<T> values_;
    std::size_t margin_;
};

using ScalarField = Field<double>;
using ComplexField = Field<Complex>;
using Vec3Field = Field<Vec3>;
using CVec3Field = Field<CVec3>;

// Applies fn to every valid node; the result keeps the input margin.
template <class T, class Fn>
auto transform(const Field<T>& f, Fn&& fn) {
    using R = std::decay_t<decltype(fn(f[0]))>;
    Field<R> out(f.grid(), f.margin());
    const ParamGrid& g = f.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (f.valid(i, j)) out(i, j) = fn(f(i, j));
    return out;
}

// Node-wise binary combination; the result margin is the larger input margin.
template <class A, class B, class Fn>
auto combine(const Field<A>& a, const Field<B>& b, Fn&& fn) {
    require_same_grid(a.grid(), b.grid(), "combine");
    using R = std::decay_t<decltype(fn(a[0], b[0]))>;
    Field<R> out(a.grid(), std::max(a.margin(), b.margin()));
    const ParamGrid& g = a.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (out.valid(i, j)) out(i, j) = fn(a(i, j), b(i, j));
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference operators
// ---------------------------------------------------------------------------

namespace detail {

// Throws unless a stencil result with the given margin has at least one node.
void require_support(const ParamGrid& grid, std::size_t margin, const char* op);

template <class T, class Stencil>
auto apply_stencil(const Field<T>& f, Stencil&& stencil) {
    using R = std::decay_t<decltype(stencil(f, std::size_t{1}, std::size_t{1}))>;
    const ParamGrid& g = f.grid();
    const std::size_t margin = f.margin() + 1;
    Field<R> out(g, margin);
    parallel_for(g.nv(), [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = std::max(j0, margin); j < std::min(j1, g.nv() - margin); ++j)
            for (std::size_t i = margin; i + margin < g.nu(); ++i) out(i, j) = stencil(f, i, j);
    }, 16);
    return out;
}

}  // namespace detail

// Five-point Laplacian (f_{i+1,j}+f_{i-1,j}-4f_{ij}+f_{i,j+1}+f_{i,j-1})/h^2.
template <class T>
Field<T> laplacian(const Field<T>& f) {
    const ParamGrid& g = f.grid();
    detail::require_support(g, f.margin() + 1, "laplacian");
    const double inv_h2 = 1.0 / (g.h() * g.h());
    return detail::apply_stencil(f, [inv_h2](const Field<T>& x, std::size_t i, std::size_t j) -> T {
        T acc = x(i + 1, j) + x(i - 1, j);
        acc = acc - 4.0 * x(i, j);
        acc = acc + x(i, j + 1);
        acc = acc + x(i, j - 1);
        return acc * inv_h2;
    });
}

template <class T>
Field<T> bilaplacian(const Field<T>& f) {
    detail::require_support(f.grid(), f.margin() + 2, "bilaplacian");
    return laplacian(laplacian(f));
}

namespace detail {

template <class T>
Field<complexified_t<T>> wirtinger(const Field<T>& f, double v_sign, const char* op) {
    const ParamGrid& g = f.grid();
    require_support(g, f.margin() + 1, op);
    const double inv_4h = 1.0 / (4.0 * g.h());
    const Complex iv(0.0, v_sign);
    return apply_stencil(f, [=](const Field<T>& x, std::size_t i, std::size_t j) -> complexified_t<T> {
        auto du = to_complex(T(x(i + 1, j) - x(i - 1, j)));
        auto dv = to_complex(T(x(i, j + 1) - x(i, j - 1)));
        return complexified_t<T>((du + iv * dv) * inv_4h);
    });
}

}  // namespace detail

// Central-difference dz = (d/du - i d/dv)/2.
template <class T>
Field<complexified_t<T>> d_z(const Field<T>& f) {
    return detail::wirtinger(f, -1.0, "d_z");
}

// Central-difference dzbar = (d/du + i d/dv)/2.
template <class T>
Field<complexified_t<T>> d_zbar(const Field<T>& f) {
    return detail::wirtinger(f, +1.0, "d_zbar");
}

// ---------------------------------------------------------------------------
// HoleMask
// ---------------------------------------------------------------------------

class HoleMask {
public:
    explicit HoleMask(const ParamGrid& grid) : grid_(grid), occluded_(grid.size(), 0) {}
    HoleMask(const ParamGrid& grid, std::vector<std::uint8_t> occluded);

    // Occludes every node with u0 <= u <= u1 and v0 <= v <= v1.
    static HoleMask rectangle(const ParamGrid& grid, double u0, double v0, double u1, double v1);

    [[nodiscard]] const ParamGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] bool occluded(std::size_t i, std::size_t j) const noexcept {
        return occluded_[grid_.index(i, j)] != 0;
    }
    [[nodiscard]] bool occluded(std::size_t idx) const noexcept { return occluded_[idx] != 0; }
    void set(std::size_t i, std::size_t j, bool value) { occluded_[grid_.index(i, j)] = value ? 1 : 0; }

    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] bool empty() const noexcept { return count() == 0; }

    // Smallest grid margin over occluded nodes (grid size if empty).
    [[nodiscard]] std::size_t edge_distance() const noexcept;

    // Grows the mask by `steps` rings of 4-neighbours.
    [[nodiscard]] HoleMask dilated(std::size_t steps) const;

    // Throws InputError unless the mask is nonempty and every occluded node is
    // at least `min_margin` nodes from the grid edge.
    void require_interior(std::size_t min_margin, const char* what) const;

    [[nodiscard]] std::span<const std::uint8_t> data() const noexcept { return occluded_; }

private:
    ParamGrid grid_;
    std::vector<std::uint8_t> occluded_;
};

}  // namespace lh
