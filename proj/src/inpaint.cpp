#include "lh/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "linear_solve.hpp"
#include "lh/parallel.hpp"

namespace lh {

using detail::SparseMatrix;
using Triplet = Eigen::Triplet<double>;

double InpaintOptions::time_step(const ParamGrid& g) const {
    const double h4 = std::pow(g.h(), 4);
    return dt ? *dt : h4 / 40.0;
}

std::size_t InpaintOptions::iteration_cap(const ParamGrid& g) const {
    if (max_iters) return *max_iters;
    const double n = static_cast<double>(g.n());
    return static_cast<std::size_t>(std::min(50.0 * n * n * n * n, 5e6));
}

void InpaintOptions::check(const ParamGrid& g) const {
    const double bound = std::pow(g.h(), 4) / 32.0;
    const double step = time_step(g);
    if (!(step > 0.0) || step > bound) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "inpaint options: dt = %.6g outside the stability range (0, h^4/32 = %.6g]",
                      step, bound);
        throw InputError(buf);
    }
    if (tol && !(*tol > 0.0)) throw InputError("inpaint options: tol must be positive");
}

InpaintMethod parse_method(const std::string& name) {
    if (name == "flow") return InpaintMethod::flow;
    if (name == "direct") return InpaintMethod::direct;
    if (name == "auto") return InpaintMethod::automatic;
    throw InputError("unknown inpaint method '" + name + "' (expected flow, direct or auto)");
}

std::string method_name(InpaintMethod m) {
    switch (m) {
        case InpaintMethod::flow: return "flow";
        case InpaintMethod::direct: return "direct";
        case InpaintMethod::automatic: return "auto";
    }
    return "auto";
}

namespace {

std::vector<std::size_t> masked_indices(const HoleMask& mask) {
    std::vector<std::size_t> out;
    for (std::size_t idx = 0; idx < mask.grid().size(); ++idx)
        if (mask.occluded(idx)) out.push_back(idx);
    return out;
}

// 5-point Laplacian at a node index without the 1/h^2 factor.
template <class V>
long double raw_laplacian(const V& f, std::size_t idx, std::size_t stride) {
    return static_cast<long double>(f[idx + 1]) + f[idx - 1] + f[idx + stride] + f[idx - stride] -
           4.0L * static_cast<long double>(f[idx]);
}

void require_inpaint_input(const ScalarField& f, const HoleMask& mask, const char* what) {
    require_same_grid(f.grid(), mask.grid(), what);
    mask.require_interior(f.margin() + 2, what);
    const ParamGrid& g = f.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (f.valid(i, j) && !std::isfinite(f(i, j))) {
                throw InputError(std::string(what) + ": non-finite input value at node (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
            }
}

double field_range(const ScalarField& f) {
    double lo = INFINITY, hi = -INFINITY;
    const ParamGrid& g = f.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (f.valid(i, j)) {
                lo = std::min(lo, f(i, j));
                hi = std::max(hi, f(i, j));
            }
    return hi - lo;
}

InpaintResult flow(const ScalarField& f, const HoleMask& mask, const InpaintOptions& opt) {
    const ParamGrid& g = f.grid();
    const double dt = opt.time_step(g);
    const std::size_t cap = opt.iteration_cap(g);
    const double range = field_range(f);
    const double tol = opt.tol ? *opt.tol : 1e-10 * (range > 0.0 ? range : 1.0);
    const std::size_t stride = g.nu();
    const long double inv_h2 = 1.0L / (static_cast<long double>(g.h()) * g.h());
    const long double h2 = static_cast<long double>(g.h()) * g.h();

    const std::vector<std::size_t> inner = masked_indices(mask);
    const HoleMask ring_mask = mask.dilated(1);
    const std::vector<std::size_t> ring = masked_indices(ring_mask);

    // Energy contribution of Laplacian rows the mask cannot reach.
    long double fixed = 0.0L;
    const std::size_t lap_margin = f.margin() + 1;
    for (std::size_t j = lap_margin; j + lap_margin <= g.m(); ++j)
        for (std::size_t i = lap_margin; i + lap_margin <= g.n(); ++i) {
            std::size_t idx = g.index(i, j);
            if (ring_mask.occluded(idx)) continue;
            long double l = raw_laplacian(f.values(), idx, stride) * inv_h2;
            fixed += l * l;
        }

    InpaintResult out{f, {}, 0, false, InpaintMethod::flow};
    auto values = out.field.values();
    std::vector<double> lap(g.size(), 0.0);
    std::vector<double> step(inner.size(), 0.0);
    std::vector<double> before(inner.size(), 0.0);
    long double previous = 0.0L;
    double last_step = 0.0;

    for (std::size_t iter = 0;; ++iter) {
        parallel_for(ring.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t r = b; r < e; ++r) {
                std::size_t idx = ring[r];
                lap[idx] = static_cast<double>(raw_laplacian(values, idx, stride) * inv_h2);
            }
        });
        // Fixed-order reduction keeps the energy bitwise reproducible.
        long double local = 0.0L;
        for (std::size_t idx : ring) {
            long double l = raw_laplacian(values, idx, stride) * inv_h2;
            local += l * l;
        }
        const long double energy = (fixed + local) * h2;
        if (iter > 0 && energy > previous) {
            // Rises at the rounding level of the energy mean the iterate stopped
            // moving in double precision: undo the step and stop there.
            if (energy - previous <= 1e-13L * previous) {
                for (std::size_t r = 0; r < inner.size(); ++r) values[inner[r]] = before[r];
                out.iterations = iter - 1;
                out.converged = true;
                break;
            }
            char buf[200];
            std::snprintf(buf, sizeof buf, "biharmonic flow diverged: energy rose from %.17g to %.17g at iteration %zu",
                          static_cast<double>(previous), static_cast<double>(energy), iter);
            throw NumericalError(buf);
        }
        out.energy.push_back(static_cast<double>(energy));
        previous = energy;
        if (out.converged || iter == cap) break;

        double largest = 0.0;
        parallel_for(inner.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t r = b; r < e; ++r) {
                std::size_t idx = inner[r];
                double bil = (lap[idx + 1] + lap[idx - 1] + lap[idx + stride] + lap[idx - stride] - 4.0 * lap[idx]) *
                             static_cast<double>(inv_h2);
                step[r] = dt * bil;
            }
        });
        for (std::size_t r = 0; r < inner.size(); ++r) {
            before[r] = values[inner[r]];
            values[inner[r]] -= step[r];
            largest = std::max(largest, std::abs(step[r]));
        }
        if (!std::isfinite(largest)) {
            throw NumericalError("biharmonic flow diverged: non-finite update at iteration " +
                                 std::to_string(iter + 1));
        }
        out.iterations = iter + 1;
        // A small step alone does not bound the distance to the limit when the
        // slowest mode contracts by rho per step; the tail is step * rho / (1 - rho).
        const double rho = last_step > 0.0 ? largest / last_step : 1.0;
        out.converged = largest == 0.0 || (largest <= tol && rho < 1.0 && largest * rho <= tol * (1.0 - rho));
        last_step = largest;
    }
    return out;
}

}  // namespace

double laplacian_energy(const ScalarField& f) {
    const ParamGrid& g = f.grid();
    const std::size_t margin = f.margin() + 1;
    detail::require_support(g, margin, "laplacian_energy");
    const long double inv_h2 = 1.0L / (static_cast<long double>(g.h()) * g.h());
    long double sum = 0.0L;
    for (std::size_t j = margin; j + margin <= g.m(); ++j)
        for (std::size_t i = margin; i + margin <= g.n(); ++i) {
            long double l = raw_laplacian(f.values(), g.index(i, j), g.nu()) * inv_h2;
            sum += l * l;
        }
    return static_cast<double>(sum * g.h() * g.h());
}

ScalarField biharmonic_direct(const ScalarField& f, const HoleMask& mask) {
    require_inpaint_input(f, mask, "biharmonic_direct");
    const ParamGrid& g = f.grid();
    const std::size_t stride = g.nu();
    const std::vector<std::size_t> inner = masked_indices(mask);
    const std::vector<std::size_t> ring = masked_indices(mask.dilated(1));
    std::vector<std::ptrdiff_t> col(g.size(), -1);
    for (std::size_t c = 0; c < inner.size(); ++c) col[inner[c]] = static_cast<std::ptrdiff_t>(c);

    // Rows: the (h^2-scaled) Laplacian at every node it can reach from the mask.
    std::vector<Triplet> trip;
    trip.reserve(ring.size() * 5);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ring.size()), 1);
    for (std::size_t r = 0; r < ring.size(); ++r) {
        const std::size_t idx = ring[r];
        const std::pair<std::size_t, double> stencil[5] = {
            {idx, -4.0}, {idx + 1, 1.0}, {idx - 1, 1.0}, {idx + stride, 1.0}, {idx - stride, 1.0}};
        for (auto [q, w] : stencil) {
            if (col[q] >= 0) {
                trip.emplace_back(static_cast<int>(r), static_cast<int>(col[q]), w);
            } else {
                b(static_cast<Eigen::Index>(r), 0) -= w * f[q];
            }
        }
    }
    SparseMatrix a(static_cast<Eigen::Index>(ring.size()), static_cast<Eigen::Index>(inner.size()));
    a.setFromTriplets(trip.begin(), trip.end());
    double residual = 0.0, misfit = 0.0;
    Eigen::MatrixXd x = detail::least_squares(a, b, "biharmonic_direct", residual, misfit);

    ScalarField out = f;
    for (std::size_t c = 0; c < inner.size(); ++c) out[inner[c]] = x(static_cast<Eigen::Index>(c), 0);
    return out;
}

InpaintResult biharmonic_inpaint(const ScalarField& f, const HoleMask& mask, const InpaintOptions& opt) {
    require_inpaint_input(f, mask, "biharmonic_inpaint");
    opt.check(f.grid());
    InpaintMethod method = opt.method;
    if (method == InpaintMethod::automatic) {
        method = mask.count() <= InpaintOptions::direct_limit ? InpaintMethod::direct : InpaintMethod::flow;
    }
    if (method == InpaintMethod::flow) return flow(f, mask, opt);

    InpaintResult out{biharmonic_direct(f, mask), {}, 1, true, InpaintMethod::direct};
    out.energy = {laplacian_energy(f), laplacian_energy(out.field)};
    return out;
}

SurfacePatch initial_fill(const SurfacePatch& s, const HoleMask& mask) {
    require_same_grid(s.grid(), mask.grid(), "initial_fill");
    mask.require_interior(1, "initial_fill");
    const ParamGrid& g = s.grid();
    const std::size_t stride = g.nu();
    const std::vector<std::size_t> inner = masked_indices(mask);
    std::vector<std::ptrdiff_t> col(g.size(), -1);
    for (std::size_t c = 0; c < inner.size(); ++c) col[inner[c]] = static_cast<std::ptrdiff_t>(c);

    const Vec3Field& phi = s.phi();
    std::vector<Triplet> trip;
    trip.reserve(inner.size() * 5);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inner.size()), 3);
    for (std::size_t r = 0; r < inner.size(); ++r) {
        const std::size_t idx = inner[r];
        trip.emplace_back(static_cast<int>(r), static_cast<int>(r), 4.0);
        for (std::size_t q : {idx + 1, idx - 1, idx + stride, idx - stride}) {
            if (col[q] >= 0) {
                trip.emplace_back(static_cast<int>(r), static_cast<int>(col[q]), -1.0);
            } else {
                b.row(static_cast<Eigen::Index>(r)) += phi[q].transpose();
            }
        }
    }
    SparseMatrix a(static_cast<Eigen::Index>(inner.size()), static_cast<Eigen::Index>(inner.size()));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd x = detail::spd_solve(a, b, "initial_fill");

    Vec3Field out = phi;
    for (std::size_t c = 0; c < inner.size(); ++c) out[inner[c]] = x.row(static_cast<Eigen::Index>(c)).transpose();
    return SurfacePatch(std::move(out));
}

SurfaceInpainting inpaint_surface(const SurfacePatch& s, const HoleMask& hole, const InpaintOptions& opt) {
    require_same_grid(s.grid(), hole.grid(), "inpaint_surface");
    try {
        hole.require_interior(5, "inpaint_surface");
    } catch (const Error& e) {
        rethrow_tagged(e, "inpaint_surface");
    }

    std::optional<SurfacePatch> initial;
    try {
        initial = initial_fill(s, hole);
    } catch (const Error& e) {
        rethrow_tagged(e, "initial_fill");
    }
    std::optional<LambdaH> lh0;
    try {
        lh0 = extract_lambda_h(*initial);
    } catch (const Error& e) {
        rethrow_tagged(e, "extract_lambda_h");
    }

    // Forward lambda and H one node outside the hole already read filled
    // positions, so they are inpainted along with the hole itself.
    HoleMask field_mask = hole.dilated(1);
    std::optional<InpaintResult> lambda, h_mean;
    try {
        lambda = biharmonic_inpaint(lh0->lambda, field_mask, opt);
    } catch (const Error& e) {
        rethrow_tagged(e, "inpaint lambda");
    }
    try {
        h_mean = biharmonic_inpaint(lh0->h_mean, field_mask, opt);
    } catch (const Error& e) {
        rethrow_tagged(e, "inpaint H");
    }

    const BoundaryData bd = BoundaryData::around_hole(*initial, hole);
    Reconstruction rec = reconstruct_surface(LambdaH{lambda->field, h_mean->field}, bd);
    try {
        require_immersion(rec.patch);
    } catch (const Error& e) {
        rethrow_tagged(e, "inpaint_surface");
    }

    SurfaceInpainting out{std::move(rec.patch), std::move(*initial), std::move(field_mask),
                          std::move(*lambda),   std::move(*h_mean),  std::move(rec.warnings)};
    if (!out.lambda.converged || !out.h_mean.converged) {
        out.warnings.push_back("biharmonic flow stopped at the iteration cap before reaching tol");
    }
    return out;
}

void write_energy_log(std::ostream& out, const InpaintResult& lambda, const InpaintResult& h_mean) {
    out << "iter,energy_lambda,energy_h\n";
    const std::size_t rows = std::max(lambda.energy.size(), h_mean.energy.size());
    auto at = [](const std::vector<double>& e, std::size_t r) {
        return e.empty() ? 0.0 : e[std::min(r, e.size() - 1)];
    };
    char buf[96];
    for (std::size_t r = 0; r < rows; ++r) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", r, at(lambda.energy, r), at(h_mean.energy, r));
        out << buf;
    }
}

}  // namespace lh
