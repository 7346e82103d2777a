// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lh/inpaint.hpp"
#include "lh/mesh.hpp"
#include "lh/parameterize.hpp"
#include "lh/reconstruct.hpp"
#include "lh/synth.hpp"
#include "lh/validate.hpp"
#include "test_meshes.hpp"

#ifndef LHSURF_PATH
#error "LHSURF_PATH must name the CLI binary"
#endif

using namespace lh;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SynthSurface make(SynthKind kind, std::size_t n) {
    SynthSpec spec;
    spec.kind = kind;
    spec.n = n;
    return synth(spec);
}

double max_abs_interior(const ScalarField& f) {
    double worst = 0.0;
    const auto& g = f.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (f.valid(i, j)) worst = std::max(worst, std::abs(f(i, j)));
    return worst;
}

// 1. Forward curvature accuracy on the sphere cap.
Outcome forward_curvature() {
    const std::size_t ns[3] = {32, 64, 128};
    double eh[3], ek[3];
    for (int t = 0; t < 3; ++t) {
        auto s = make(SynthKind::sphere_cap, ns[t]);
        auto lh = extract_lambda_h(s.patch);
        eh[t] = field_error(lh.h_mean, *s.h_mean).relative;
        ek[t] = field_error(gaussian_curvature(lh.lambda), *s.gaussian).relative;
    }
    const double ph = convergence_order(eh[0], eh[1], eh[2]);
    const double pk = convergence_order(ek[0], ek[1], ek[2]);
    const bool pass = eh[2] <= 0.02 && ek[2] <= 0.02 && ph >= 1.7 && ph <= 2.3 && pk >= 1.7 && pk <= 2.3;
    return {pass, fmt("n=128 rel err H %.3g K %.3g (<= 0.02); order H %.3f K %.3f (in [1.7, 2.3])", eh[2], ek[2],
                      ph, pk)};
}

// 2. Catenoid is minimal.
Outcome minimal_surface() {
    auto s = make(SynthKind::catenoid, 128);
    const double v = max_abs_interior(extract_lambda_h(s.patch).h_mean) * s.patch.scale();
    return {v <= 1e-2, fmt("n=128 max|H|*scale %.3g (<= 1e-2)", v)};
}

// 3. Codazzi residual decays.
Outcome codazzi() {
    std::string detail;
    bool pass = true;
    for (auto kind : {SynthKind::sphere_cap, SynthKind::catenoid}) {
        double e[3];
        const std::size_t ns[3] = {32, 64, 128};
        for (int t = 0; t < 3; ++t) {
            auto s = make(kind, ns[t]);
            auto lh = extract_lambda_h(s.patch);
            auto r = codazzi_residual(lh.lambda, lh.h_mean, mu_from_surface(s.patch));
            e[t] = 0.0;
            for (auto x : r.values()) e[t] = std::max(e[t], std::abs(x));
        }
        const double p = convergence_order(e[0], e[1], e[2]);
        pass = pass && p >= 1.5;
        detail += fmt("%s residual %.3g/%.3g/%.3g order %.3f; ", synth_kind_name(kind).c_str(), e[0], e[1], e[2], p);
    }
    return {pass, detail + "(order >= 1.5)"};
}

// 4. Round trip through (lambda, H) and boundary rings.
Outcome round_trip() {
    bool pass = true;
    std::string detail;
    {
        auto s = make(SynthKind::plane, 32);
        auto rec = reconstruct_surface(extract_lambda_h(s.patch), BoundaryData::from_rings(s.patch));
        const double e = field_error(rec.patch.phi(), s.patch.phi()).max / s.patch.scale();
        pass = pass && e <= 1e-10;
        detail += fmt("plane max err/scale %.3g (<= 1e-10); ", e);
    }
    for (auto kind : {SynthKind::sphere_cap, SynthKind::catenoid}) {
        double e[3];
        const std::size_t ns[3] = {32, 64, 128};
        for (int t = 0; t < 3; ++t) {
            auto s = make(kind, ns[t]);
            auto rec = reconstruct_surface(extract_lambda_h(s.patch), BoundaryData::from_rings(s.patch));
            e[t] = best_rigid_align(rec.patch, s.patch).rmsd / s.patch.scale();
        }
        const double p = convergence_order(e[0], e[1], e[2]);
        pass = pass && e[2] <= 1e-2 && p >= 1.5;
        detail += fmt("%s rmsd/scale n=128 %.3g order %.3f; ", synth_kind_name(kind).c_str(), e[2], p);
    }
    return {pass, detail + "(<= 1e-2, order >= 1.5)"};
}

// 5. Harmonic and constant-Laplacian fields are fixed points.
Outcome fixed_points() {
    const ParamGrid g(32, 1.0);
    const HoleMask mask = HoleMask::rectangle(g, 0.3, 0.35, 0.6, 0.65);
    const std::function<double(double, double)> fields[] = {
        [](double u, double v) { return u * u - v * v; },
        [](double u, double v) { return std::exp(2 * u) * std::cos(2 * v); },
        [](double u, double v) { return u * u + v * v; },
        [](double u, double v) { return 3 * u * u - v * v + u * v - 2 * v; },
    };
    double worst = 0.0;
    bool identical = true;
    for (const auto& fn : fields)
        for (auto method : {InpaintMethod::flow, InpaintMethod::direct}) {
            const ScalarField exact = ScalarField::sample(g, fn);
            ScalarField start = exact;
            for (std::size_t idx = 0; idx < g.size(); ++idx)
                if (mask.occluded(idx)) start[idx] = 0.0;
            InpaintOptions opt;
            opt.method = method;
            const auto r = biharmonic_inpaint(start, mask, opt);
            for (std::size_t idx = 0; idx < g.size(); ++idx) {
                if (mask.occluded(idx))
                    worst = std::max(worst, std::abs(r.field[idx] - exact[idx]));
                else
                    identical = identical && r.field[idx] == exact[idx];
            }
        }
    return {worst <= 1e-8 && identical,
            fmt("4 fields x {flow, direct}: max hole error %.3g (<= 1e-8); off-mask bit-identical: %s", worst,
                identical ? "yes" : "no")};
}

struct RandomCase {
    ScalarField field;
    HoleMask mask;
};

// Smooth random fields (low-order Fourier sums) with random rectangular masks.
std::vector<RandomCase> random_cases(std::size_t count) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), corner(0.2, 0.45), size(0.12, 0.3);
    std::vector<RandomCase> out;
    const ParamGrid g(32, 1.0);
    for (std::size_t c = 0; c < count; ++c) {
        double a[3][3];
        for (auto& row : a)
            for (auto& x : row) x = coef(rng);
        const double u0 = corner(rng), v0 = corner(rng), du = size(rng), dv = size(rng);
        auto f = ScalarField::sample(g, [&](double u, double v) {
            double s = 0.0;
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) s += a[p][q] * std::cos(pi * (p * u + 0.5)) * std::sin(pi * (q + 1) * v);
            return s;
        });
        out.push_back({std::move(f), HoleMask::rectangle(g, u0, v0, u0 + du, v0 + dv)});
    }
    return out;
}

// 6. Flow limit equals the direct solve.
Outcome flow_direct() {
    double worst = 0.0;
    bool converged = true;
    const auto cases = random_cases(6);
    for (const auto& c : cases) {
        InpaintOptions opt;
        opt.method = InpaintMethod::flow;
        const auto flow = biharmonic_inpaint(c.field, c.mask, opt);
        converged = converged && flow.converged;
        const ScalarField direct = biharmonic_direct(c.field, c.mask);
        for (std::size_t idx = 0; idx < direct.grid().size(); ++idx)
            worst = std::max(worst, std::abs(flow.field[idx] - direct[idx]));
    }
    return {worst <= 1e-6 && converged,
            fmt("%zu random fields/masks, n=32: max |flow - direct| %.3g (<= 1e-6), all converged: %s", cases.size(),
                worst, converged ? "yes" : "no")};
}

// 7. Discrete energy is non-increasing along the flow.
Outcome energy_monotone() {
    std::size_t runs = 0, steps = 0, increases = 0;
    auto check = [&](const InpaintResult& r) {
        ++runs;
        for (std::size_t t = 1; t < r.energy.size(); ++t) {
            ++steps;
            if (r.energy[t] > r.energy[t - 1]) ++increases;
        }
    };
    InpaintOptions opt;
    opt.method = InpaintMethod::flow;
    try {
        for (const auto& c : random_cases(6)) check(biharmonic_inpaint(c.field, c.mask, opt));
        for (auto kind : {SynthKind::sphere_cap, SynthKind::ridge, SynthKind::tilted_plane}) {
            auto s = make(kind, 32);
            auto r = inpaint_surface(s.patch, HoleMask::rectangle(s.patch.grid(), 0.4, 0.4, 0.6, 0.6), opt);
            check(r.lambda);
            check(r.h_mean);
        }
    } catch (const NumericalError& e) {
        return {false, std::string("flow reported an energy increase: ") + e.what()};
    }
    return {increases == 0, fmt("dt = h^4/40: %zu runs, %zu steps, %zu increases", runs, steps, increases)};
}

// 8. Plane with an interior hole is restored.
Outcome plane_hole() {
    double worst = 0.0;
    std::string detail;
    for (auto kind : {SynthKind::plane, SynthKind::tilted_plane}) {
        auto s = make(kind, 64);
        auto r = inpaint_surface(s.patch, HoleMask::rectangle(s.patch.grid(), 0.4, 0.4, 0.6, 0.6));
        const double e = field_error(r.patch.phi(), s.patch.phi()).max / s.patch.scale();
        worst = std::max(worst, e);
        detail += fmt("%s %.3g; ", synth_kind_name(kind).c_str(), e);
    }
    return {worst <= 1e-6, "n=64, 0.2x0.2 hole, max deviation/scale: " + detail + "(<= 1e-6)"};
}

// 9. Lambda-H fill beats the harmonic fill on curved and creased surfaces.
Outcome geometry_aware() {
    std::string detail;
    bool pass = true;
    {
        auto s = make(SynthKind::sphere_cap, 64);
        const HoleMask hole = HoleMask::rectangle(s.patch.grid(), 0.4, 0.4, 0.6, 0.6);
        auto r = inpaint_surface(s.patch, hole);
        ErrorRegion in_hole;
        in_hole.only = hole;
        const double e_lh = field_error(extract_lambda_h(r.patch).h_mean, *s.h_mean, in_hole).max;
        const double e_naive = field_error(extract_lambda_h(r.initial).h_mean, *s.h_mean, in_hole).max;
        pass = pass && e_lh < e_naive;
        detail += fmt("sphere H error in hole: lambda-H %.4g vs harmonic %.4g; ", e_lh, e_naive);
    }
    {
        auto s = make(SynthKind::ridge, 64);
        const HoleMask hole = HoleMask::rectangle(s.patch.grid(), 0.4, 0.4, 0.6, 0.6);
        auto r = inpaint_surface(s.patch, hole);
        // The analytic crease is the line (u, 0, 0).
        auto crease_dev = [&](const SurfacePatch& p) {
            double worst = 0.0;
            const std::size_t j = *s.crease_row;
            for (std::size_t i = 0; i < p.grid().nu(); ++i)
                if (hole.occluded(i, j)) worst = std::max(worst, std::hypot(p.phi()(i, j).y(), p.phi()(i, j).z()));
            return worst;
        };
        const double e_lh = crease_dev(r.patch), e_naive = crease_dev(r.initial);
        pass = pass && e_lh < e_naive;
        detail += fmt("ridge crease deviation: lambda-H %.4g vs harmonic %.4g", e_lh, e_naive);
    }
    return {pass, detail};
}

// 10. Parameterization front end.
Outcome parameterization() {
    const TriMesh rect = test::rectangle_mesh(1.0, 2.0, 16, 32);
    const AspectSearch rs = optimal_aspect(rect);
    const ParamGrid rg(32, rs.k);
    const SurfacePatch rp =
        resample_to_grid(rect, harmonic_param(rect, static_cast<double>(rg.m()) * rg.h()), rg);
    const double r_rect = conformality_residual(rp).max_residual();

    const TriMesh cyl = test::half_cylinder_mesh(1.0, 2.0, 48, 32);
    const AspectSearch cs = optimal_aspect(cyl);
    const ParamGrid cg(32, cs.k);
    const SurfacePatch cp = resample_to_grid(cyl, harmonic_param(cyl, static_cast<double>(cg.m()) * cg.h()), cg);
    const double r_cyl = conformality_residual(cp).max_residual();

    const bool pass = std::abs(rs.k - 2.0) <= 0.02 && r_rect <= 1e-6 && r_cyl <= 0.05;
    return {pass, fmt("rectangle k %.5f (2 +- 0.02) residual %.3g (<= 1e-6); half-cylinder k %.4f (analytic %.4f) "
                      "residual %.3g (<= 0.05)",
                      rs.k, r_rect, cs.k, 2.0 / pi, r_cyl)};
}

// 11. Every CLI command is byte-for-byte repeatable, also across thread counts.
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Outcome determinism() {
    const std::string cli = LHSURF_PATH;
    const std::vector<std::pair<std::string, std::vector<std::string>>> steps = {
        {"synth sphere-cap -n 48 -o s.lhf --ref-dir ref", {"s.lhf", "ref/lambda.lhf", "ref/H.lhf", "ref/K.lhf"}},
        {"synth ridge -n 48 -o r.lhf", {"r.lhf"}},
        {"analyze s.lhf -o an --csv",
         {"an/lambda.lhf", "an/H.lhf", "an/K.lhf", "an/mu.lhf", "an/boundary.lhb", "an/report.txt", "an/mu.csv"}},
        {"analyze s.lhf", {"stdout"}},
        {"reconstruct an/lambda.lhf an/H.lhf an/boundary.lhb -o rec.lhf", {"rec.lhf"}},
        {"roundtrip s.lhf -o rt.lhf", {"stdout", "rt.lhf"}},
        {"mask s.lhf --rect 0.4,0.4,0.6,0.6 -o m.pgm", {"m.pgm"}},
        {"inpaint s.lhf m.pgm --method direct -o in_d.lhf --log e_d.csv", {"in_d.lhf", "e_d.csv"}},
        {"inpaint r.lhf m.pgm --method flow -o in_f.lhf --log e_f.csv", {"in_f.lhf", "e_f.csv"}},
        {"obj s.lhf -o s.obj", {"s.obj"}},
        {"param s.obj --corners auto -n 32 -o p.lhf", {"p.lhf"}},
        {"param s.obj --corners 0,48,2400,2352 -n 32 --k 1 -o q.lhf", {"q.lhf"}},
    };
    const fs::path root = fs::temp_directory_path() / "lhsurf_acceptance_determinism";
    fs::remove_all(root);
    const char* threads[2] = {"1", "4"};
    std::vector<std::string> outputs[2];
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = root / ("run" + std::to_string(run));
        fs::create_directories(dir);
        for (const auto& [args, files] : steps) {
            const std::string cmd = "cd '" + dir.string() + "' && LH_THREADS=" + threads[run] + " '" + cli + "' " +
                                    args + " > stdout 2> stderr";
            if (std::system(cmd.c_str()) != 0) return {false, "command failed: lhsurf " + args};
            for (const auto& f : files) outputs[run].push_back(slurp(dir / f));
        }
    }
    std::size_t differing = 0;
    for (std::size_t i = 0; i < outputs[0].size(); ++i)
        if (outputs[0][i] != outputs[1][i] || outputs[0][i].empty()) ++differing;
    return {differing == 0, fmt("%zu commands, %zu artifacts compared across two runs (LH_THREADS 1 vs 4): %zu differ",
                                steps.size(), outputs[0].size(), differing)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"forward curvature accuracy", forward_curvature},
        {"minimal surface check", minimal_surface},
        {"Codazzi consistency", codazzi},
        {"round-trip reconstruction", round_trip},
        {"inpainting fixed points", fixed_points},
        {"flow/direct equivalence", flow_direct},
        {"energy monotonicity", energy_monotone},
        {"plane-hole restoration", plane_hole},
        {"geometry-aware vs naive fill", geometry_aware},
        {"parameterization front end", parameterization},
        {"determinism", determinism},
    };
    int failed = 0, index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
