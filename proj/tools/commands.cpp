#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "lh/field_io.hpp"
#include "lh/inpaint.hpp"
#include "lh/mesh.hpp"
#include "lh/parameterize.hpp"
#include "lh/reconstruct.hpp"
#include "lh/synth.hpp"
#include "lh/validate.hpp"

namespace lh::cli {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw InputError("write failed: " + path);
}

template <class T>
void write_csv(const std::string& path, const Field<T>& f) {
    std::ostringstream out;
    write_field_csv(out, f);
    write_text(path, out.str());
}

std::filesystem::path make_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create directory " + dir + ": " + ec.message());
    return dir;
}

SurfacePatch load_patch(const std::string& path) { return SurfacePatch(load_vec3_field(path)); }

struct Range {
    double lo = INFINITY;
    double hi = -INFINITY;
    double abs = 0.0;
};

template <class T, class Fn>
Range range_of(const Field<T>& f, Fn&& value) {
    Range r;
    const ParamGrid& g = f.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (!f.valid(i, j)) continue;
            double x = value(f(i, j));
            r.lo = std::min(r.lo, x);
            r.hi = std::max(r.hi, x);
            r.abs = std::max(r.abs, std::abs(x));
        }
    return r;
}

// ---------------------------------------------------------------------------

void add_synth(CLI::App& app) {
    auto opt = std::make_shared<SynthSpec>();
    auto kind = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("-");
    auto ref_dir = std::make_shared<std::string>();
    auto k = std::make_shared<double>(0.0), radius = std::make_shared<double>(0.0),
         angle = std::make_shared<double>(0.0), amp = std::make_shared<double>(0.0),
         scale = std::make_shared<double>(0.0);

    CLI::App* cmd = app.add_subcommand("synth", "Sample an analytic test surface onto a grid");
    cmd->add_option("kind", *kind,
                    "plane | tilted-plane | sphere-cap | catenoid | cylinder | ridge | snowman | sine-graph")
        ->required();
    cmd->add_option("-n", opt->n, "Grid intervals along u")->capture_default_str();
    auto* ok = cmd->add_option("--k", *k, "Aspect ratio K (default 1)");
    auto* oradius = cmd->add_option("--radius", *radius, "Sphere/cylinder radius (default 1)");
    auto* oangle = cmd->add_option("--angle", *angle, "Degrees: tilted-plane tilt (30), ridge dihedral angle (90)");
    auto* oamp = cmd->add_option("--amp", *amp, "sine-graph amplitude (default 0.1)");
    auto* oscale = cmd->add_option("--scale", *scale, "Parameter-to-chart scale (kind dependent)");
    cmd->add_option("-o,--output", *out, "Output patch (.lhf, '-' = stdout)")->capture_default_str();
    cmd->add_option("--ref-dir", *ref_dir, "Also write analytic lambda/H/K reference fields here");
    cmd->callback([=] {
        opt->kind = parse_synth_kind(*kind);
        if (ok->count()) opt->k = *k;
        if (oradius->count()) opt->radius = *radius;
        if (oangle->count()) opt->angle = *angle;
        if (oamp->count()) opt->amplitude = *amp;
        if (oscale->count()) opt->chart_scale = *scale;
        SynthSurface s = synth(*opt);
        save_field(*out, s.patch.phi());
        if (!ref_dir->empty()) {
            auto dir = make_dir(*ref_dir);
            if (s.lambda) save_field((dir / "lambda.lhf").string(), *s.lambda);
            if (s.h_mean) save_field((dir / "H.lhf").string(), *s.h_mean);
            if (s.gaussian) save_field((dir / "K.lhf").string(), *s.gaussian);
        }
    });
}

// ---------------------------------------------------------------------------

std::string analysis_report(const SurfacePatch& s, const LambdaH& lh, const ScalarField& k, const ComplexField& mu,
                            const ConformalityReport& conf) {
    const ParamGrid& g = s.grid();
    const Range lr = range_of(lh.lambda, [](double x) { return x; });
    const Range hr = range_of(lh.h_mean, [](double x) { return x; });
    const Range kr = range_of(k, [](double x) { return x; });
    const Range mr = range_of(mu, [](const Complex& x) { return std::abs(x); });
    const ComplexField cod = codazzi_residual(lh.lambda, lh.h_mean, mu);
    const Range cr = range_of(cod, [](const Complex& x) { return std::abs(x); });

    std::ostringstream r;
    r << "grid n " << g.n() << " m " << g.m() << " k " << num(g.k()) << " h " << num(g.h()) << '\n';
    r << "scale " << num(s.scale()) << '\n';
    r << "lambda min " << num(lr.lo) << " max " << num(lr.hi) << '\n';
    r << "H min " << num(hr.lo) << " max " << num(hr.hi) << " max_abs " << num(hr.abs) << '\n';
    r << "K min " << num(kr.lo) << " max " << num(kr.hi) << " max_abs " << num(kr.abs) << '\n';
    r << "mu max_abs " << num(mr.abs) << '\n';
    r << "codazzi_residual max_abs " << num(cr.abs) << '\n';
    r << "conformality max_abs_F " << num(conf.max_abs_f) << " max_abs_E_minus_G " << num(conf.max_abs_e_minus_g)
      << " mean_metric " << num(conf.mean_metric) << " conformal " << (conf.conformal() ? "yes" : "no") << '\n';
    r << "F_histogram\n";
    for (std::size_t b = 0; b < conf.histogram_counts.size(); ++b)
        r << "  [" << num(conf.histogram_edges[b]) << ", " << num(conf.histogram_edges[b + 1]) << ") "
          << conf.histogram_counts[b] << '\n';
    return r.str();
}

void add_analyze(CLI::App& app) {
    auto in = std::make_shared<std::string>("-");
    auto dir = std::make_shared<std::string>();
    auto csv = std::make_shared<bool>(false);
    CLI::App* cmd = app.add_subcommand("analyze", "Forward pass: lambda, H, K, mu and conformality report");
    cmd->add_option("patch", *in, "Input patch (.lhf, '-' = stdin)")->capture_default_str();
    cmd->add_option("-o,--output-dir", *dir,
                    "Write lambda.lhf, H.lhf, K.lhf, mu.lhf, boundary.lhb and report.txt here "
                    "(report goes to stdout when omitted)");
    cmd->add_flag("--csv", *csv, "Also write CSV versions of the fields");
    cmd->callback([=] {
        SurfacePatch s = load_patch(*in);
        const LambdaH lh = extract_lambda_h(s);
        const ScalarField k = gaussian_curvature(lh.lambda);
        const ComplexField mu = mu_from_surface(s);
        const ConformalityReport conf = conformality_residual(s);
        const std::string report = analysis_report(s, lh, k, mu, conf);
        if (dir->empty()) {
            write_text("-", report);
            return;
        }
        auto d = make_dir(*dir);
        save_field((d / "lambda.lhf").string(), lh.lambda);
        save_field((d / "H.lhf").string(), lh.h_mean);
        save_field((d / "K.lhf").string(), k);
        save_field((d / "mu.lhf").string(), mu);
        save_boundary((d / "boundary.lhb").string(), BoundaryData::from_rings(s));
        write_text((d / "report.txt").string(), report);
        if (*csv) {
            write_csv((d / "lambda.csv").string(), lh.lambda);
            write_csv((d / "H.csv").string(), lh.h_mean);
            write_csv((d / "K.csv").string(), k);
            write_csv((d / "mu.csv").string(), mu);
        }
    });
}

// ---------------------------------------------------------------------------

std::array<std::size_t, 4> parse_corners(const std::string& text, const TriMesh& mesh) {
    if (text == "auto") return auto_corners(mesh);
    std::array<std::size_t, 4> c{};
    std::istringstream in(text);
    std::string tok;
    std::size_t count = 0;
    while (std::getline(in, tok, ',')) {
        if (count == 4) throw InputError("--corners expects exactly four vertex indices");
        try {
            std::size_t used = 0;
            long long v = std::stoll(tok, &used);
            if (used != tok.size() || v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size()) throw 0;
            c[count++] = static_cast<std::size_t>(v);
        } catch (...) {
            throw InputError("--corners: bad vertex index '" + tok + "'");
        }
    }
    if (count != 4) throw InputError("--corners expects exactly four vertex indices");
    return c;
}

void add_param(CLI::App& app) {
    auto in = std::make_shared<std::string>();
    auto corners = std::make_shared<std::string>("auto");
    auto n = std::make_shared<std::size_t>(64);
    auto k = std::make_shared<double>(0.0);
    auto out = std::make_shared<std::string>("-");
    CLI::App* cmd = app.add_subcommand("param", "Flatten a disk-type OBJ mesh and resample it onto a grid");
    cmd->add_option("mesh", *in, "Input mesh (.obj)")->required();
    cmd->add_option("--corners", *corners,
                    "Rectangle corners as a,b,c,d (0-based vertex indices in boundary order) or 'auto'")
        ->capture_default_str();
    cmd->add_option("-n", *n, "Grid intervals along u")->capture_default_str();
    auto* ok = cmd->add_option("--k", *k, "Fix the aspect ratio instead of searching for it");
    cmd->add_option("-o,--output", *out, "Output patch (.lhf, '-' = stdout)")->capture_default_str();
    cmd->callback([=] {
        TriMesh mesh = load_obj(*in);
        mesh.corner_ids = parse_corners(*corners, mesh);
        double aspect = *k;
        if (!ok->count()) {
            AspectSearch search = optimal_aspect(mesh);
            warn(search.warnings);
            aspect = search.k;
            std::fprintf(stderr, "optimal k %s (distortion %s)\n", num(search.k).c_str(),
                         num(search.distortion).c_str());
        }
        // Flatten again at the aspect the grid can represent exactly.
        const ParamGrid coarse(*n, aspect);
        const ParamGrid grid(*n, static_cast<double>(coarse.m()) / static_cast<double>(*n));
        UvChart chart = harmonic_param(mesh, static_cast<double>(grid.m()) * grid.h());
        std::fprintf(stderr, "grid k %s laplace residual %s distortion %s\n", num(grid.k()).c_str(),
                     num(chart.laplace_residual).c_str(), num(chart_distortion(mesh, chart)).c_str());
        SurfacePatch s = resample_to_grid(mesh, chart, grid);
        save_field(*out, s.phi());
    });
}

// ---------------------------------------------------------------------------

void add_reconstruct(CLI::App& app) {
    auto lambda = std::make_shared<std::string>(), h = std::make_shared<std::string>(),
         boundary = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("-");
    CLI::App* cmd = app.add_subcommand("reconstruct", "Rebuild a patch from lambda, H and boundary rings");
    cmd->add_option("lambda", *lambda, "Conformal factor field (.lhf)")->required();
    cmd->add_option("H", *h, "Mean curvature field (.lhf)")->required();
    cmd->add_option("boundary", *boundary, "Boundary rings (.lhb)")->required();
    cmd->add_option("-o,--output", *out, "Output patch (.lhf, '-' = stdout)")->capture_default_str();
    cmd->callback([=] {
        // Forward fields are undefined on the outermost ring.
        ScalarField l = load_scalar_field(*lambda);
        ScalarField hm = load_scalar_field(*h);
        l.set_margin(1);
        hm.set_margin(1);
        BoundaryData bd = load_boundary(*boundary);
        require_same_grid(l.grid(), bd.grid(), "reconstruct");
        Reconstruction rec = reconstruct_surface(LambdaH{std::move(l), std::move(hm)}, bd);
        warn(rec.warnings);
        save_field(*out, rec.patch.phi());
    });
}

// ---------------------------------------------------------------------------

void add_inpaint(CLI::App& app) {
    auto in = std::make_shared<std::string>(), mask = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("-");
    auto log = std::make_shared<std::string>();
    auto method = std::make_shared<std::string>("auto");
    auto dt = std::make_shared<double>(0.0), tol = std::make_shared<double>(0.0);
    auto iters = std::make_shared<std::size_t>(0);
    CLI::App* cmd = app.add_subcommand("inpaint", "Fill a masked hole by biharmonic lambda-H inpainting");
    cmd->add_option("patch", *in, "Input patch (.lhf)")->required();
    cmd->add_option("mask", *mask, "Hole mask (ASCII PGM, nonzero = occluded)")->required();
    auto* odt = cmd->add_option("--dt", *dt, "Flow time step (default h^4/40, at most h^4/32)");
    auto* oiters = cmd->add_option("--iters", *iters, "Flow iteration cap (default min(50 n^4, 5e6))");
    auto* otol = cmd->add_option("--tol", *tol, "Stop when the largest update is below this (default 1e-10 * range)");
    cmd->add_option("--method", *method, "flow | direct | auto")->capture_default_str();
    cmd->add_option("-o,--output", *out, "Output patch (.lhf, '-' = stdout)")->capture_default_str();
    cmd->add_option("--log", *log, "Energy log CSV (iter,energy_lambda,energy_h)");
    cmd->callback([=] {
        InpaintOptions opt;
        opt.method = parse_method(*method);
        if (odt->count()) opt.dt = *dt;
        if (oiters->count()) opt.max_iters = *iters;
        if (otol->count()) opt.tol = *tol;
        SurfacePatch s = load_patch(*in);
        HoleMask hole = load_mask(*mask, s.grid());
        SurfaceInpainting r = inpaint_surface(s, hole, opt);
        warn(r.warnings);
        std::fprintf(stderr, "method %s iterations %zu/%zu\n", method_name(r.lambda.method).c_str(),
                     r.lambda.iterations, r.h_mean.iterations);
        save_field(*out, r.patch.phi());
        if (!log->empty()) {
            std::ostringstream csv;
            write_energy_log(csv, r.lambda, r.h_mean);
            write_text(*log, csv.str());
        }
    });
}

// ---------------------------------------------------------------------------

void add_roundtrip(CLI::App& app) {
    auto in = std::make_shared<std::string>("-");
    auto out = std::make_shared<std::string>();
    CLI::App* cmd = app.add_subcommand("roundtrip", "Extract lambda-H, reconstruct from the rings, report errors");
    cmd->add_option("patch", *in, "Input patch (.lhf, '-' = stdin)")->capture_default_str();
    cmd->add_option("-o,--output", *out, "Also write the reconstructed patch");
    cmd->callback([=] {
        SurfacePatch s = load_patch(*in);
        const LambdaH lh = extract_lambda_h(s);
        Reconstruction rec = reconstruct_surface(lh, BoundaryData::from_rings(s));
        warn(rec.warnings);
        const Alignment a = best_rigid_align(rec.patch, s);
        const LambdaH back = extract_lambda_h(rec.patch);
        const double scale = s.scale();
        std::ostringstream r;
        r << "rmsd " << num(a.rmsd) << '\n';
        r << "rmsd_over_scale " << num(a.rmsd / scale) << '\n';
        r << "lambda_max_error " << num(field_error(back.lambda, lh.lambda).max) << '\n';
        r << "H_max_error " << num(field_error(back.h_mean, lh.h_mean).max) << '\n';
        r << "warnings " << rec.warnings.size() << '\n';
        write_text("-", r.str());
        if (!out->empty()) save_field(*out, rec.patch.phi());
    });
}

// ---------------------------------------------------------------------------

void add_mask(CLI::App& app) {
    auto in = std::make_shared<std::string>();
    auto rects = std::make_shared<std::vector<std::vector<double>>>();
    auto out = std::make_shared<std::string>("-");
    CLI::App* cmd = app.add_subcommand("mask", "Write a rectangular hole mask for a patch's grid");
    cmd->add_option("patch", *in, "Patch whose grid the mask lives on (.lhf)")->required();
    cmd->add_option("--rect", *rects, "u0,v0,u1,v1 (repeatable); nodes inside are occluded")
        ->delimiter(',')
        ->expected(4)
        ->allow_extra_args(false)
        ->required();
    cmd->add_option("-o,--output", *out, "Output PGM ('-' = stdout)")->capture_default_str();
    cmd->callback([=] {
        const ParamGrid g = load_vec3_field(*in).grid();
        HoleMask mask(g);
        for (const auto& r : *rects) {
            if (r.size() != 4) throw InputError("--rect expects u0,v0,u1,v1");
            HoleMask part = HoleMask::rectangle(g, r[0], r[1], r[2], r[3]);
            for (std::size_t j = 0; j < g.nv(); ++j)
                for (std::size_t i = 0; i < g.nu(); ++i)
                    if (part.occluded(i, j)) mask.set(i, j, true);
        }
        save_mask(*out, mask);
    });
}

void add_obj(CLI::App& app) {
    auto in = std::make_shared<std::string>("-");
    auto out = std::make_shared<std::string>("-");
    CLI::App* cmd = app.add_subcommand("obj", "Export a patch as a triangulated OBJ mesh");
    cmd->add_option("patch", *in, "Input patch (.lhf)")->capture_default_str();
    cmd->add_option("-o,--output", *out, "Output OBJ ('-' = stdout)")->capture_default_str();
    cmd->callback([=] { save_obj(*out, patch_to_mesh(load_patch(*in))); });
}

}  // namespace

void add_commands(CLI::App& app) {
    add_synth(app);
    add_analyze(app);
    add_param(app);
    add_reconstruct(app);
    add_inpaint(app);
    add_roundtrip(app);
    add_mask(app);
    add_obj(app);
}

}  // namespace lh::cli
