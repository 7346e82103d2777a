#include "lh/synth.hpp"

#include <cmath>
#include <numbers>

namespace lh {

namespace {

constexpr double pi = std::numbers::pi;

struct KindName {
    SynthKind kind;
    const char* name;
};
constexpr KindName kNames[] = {
    {SynthKind::plane, "plane"},       {SynthKind::tilted_plane, "tilted-plane"},
    {SynthKind::sphere_cap, "sphere-cap"}, {SynthKind::catenoid, "catenoid"},
    {SynthKind::cylinder, "cylinder"}, {SynthKind::ridge, "ridge"},
    {SynthKind::snowman, "snowman"},   {SynthKind::sine_graph, "sine-graph"},
};

double require_positive(std::optional<double> x, double fallback, const char* what) {
    double v = x ? *x : fallback;
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("synth: ") + what + " must be positive");
    return v;
}

ScalarField constant(const ParamGrid& g, double value) {
    return ScalarField::sample(g, [value](double, double) { return value; });
}

// Snowman meridian: radius as a function of height, two bulges and a neck.
double snow_r(double z) { return 0.8 + 0.15 * std::cos(2.0 * pi * z) - 0.1 * z; }
double snow_rz(double z) { return -0.3 * pi * std::sin(2.0 * pi * z) - 0.1; }
double snow_rzz(double z) { return -0.6 * pi * pi * std::cos(2.0 * pi * z); }
// dz/dt for the conformal meridian coordinate t = integral ds / r.
double snow_dz(double z) { return snow_r(z) / std::sqrt(1.0 + snow_rz(z) * snow_rz(z)); }

}  // namespace

SynthKind parse_synth_kind(const std::string& name) {
    for (const auto& k : kNames)
        if (name == k.name) return k.kind;
    throw InputError("unknown surface kind '" + name + "'");
}

std::string synth_kind_name(SynthKind kind) {
    for (const auto& k : kNames)
        if (kind == k.kind) return k.name;
    return "plane";
}

SynthSurface synth(const SynthSpec& spec) {
    const ParamGrid g(spec.n, require_positive(spec.k, 1.0, "k"));
    const double big_k = static_cast<double>(g.m()) * g.h();  // v extent
    const double vc = big_k / 2.0;

    auto make = [&](auto&& phi) { return SurfacePatch(Vec3Field::sample(g, phi)); };

    switch (spec.kind) {
        case SynthKind::plane: {
            SynthSurface s{make([](double u, double v) -> Vec3 { return Vec3(u, v, 0.0); }), constant(g, 1.0),
                           constant(g, 0.0), constant(g, 0.0)};
            return s;
        }
        case SynthKind::tilted_plane: {
            const double a = (spec.angle ? *spec.angle : 30.0) * pi / 180.0;
            SynthSurface s{make([a](double u, double v) -> Vec3 { return Vec3(u * std::cos(a), v, u * std::sin(a)); }),
                           constant(g, 1.0), constant(g, 0.0), constant(g, 0.0)};
            return s;
        }
        case SynthKind::sphere_cap: {
            // Inverse stereographic chart of the southern cap; its normal
            // points to the centre, so H = +1/R.
            const double r = require_positive(spec.radius, 1.0, "radius");
            const double sc = require_positive(spec.chart_scale, 1.2, "chart scale");
            auto ab = [=](double u, double v) { return std::pair{sc * (u - 0.5), sc * (v - vc)}; };
            SynthSurface s{make([=](double u, double v) -> Vec3 {
                               auto [a, b] = ab(u, v);
                               double rho2 = a * a + b * b;
                               return Vec3(2.0 * a, 2.0 * b, rho2 - 1.0) * (r / (1.0 + rho2));
                           }),
                           ScalarField::sample(g, [=](double u, double v) {
                               auto [a, b] = ab(u, v);
                               return 2.0 * r * sc / (1.0 + a * a + b * b);
                           }),
                           constant(g, 1.0 / r), constant(g, 1.0 / (r * r))};
            return s;
        }
        case SynthKind::catenoid: {
            const double c = require_positive(spec.chart_scale, pi, "chart scale");
            SynthSurface s{make([=](double u, double v) -> Vec3 {
                               double th = c * (u - 0.5), t = c * (v - vc);
                               return Vec3(std::cosh(t) * std::cos(th), std::cosh(t) * std::sin(th), t);
                           }),
                           ScalarField::sample(g, [=](double, double v) { return c * std::cosh(c * (v - vc)); }),
                           constant(g, 0.0), ScalarField::sample(g, [=](double, double v) {
                               return -1.0 / std::pow(std::cosh(c * (v - vc)), 4);
                           })};
            return s;
        }
        case SynthKind::cylinder: {
            // Outward normal, so H = -1/(2R).
            const double r = require_positive(spec.radius, 1.0, "radius");
            const double c = require_positive(spec.chart_scale, pi, "chart scale");
            SynthSurface s{make([=](double u, double v) -> Vec3 {
                               double th = c * (u - 0.5);
                               return Vec3(r * std::cos(th), r * std::sin(th), r * c * (v - vc));
                           }),
                           constant(g, r * c), constant(g, -0.5 / r), constant(g, 0.0)};
            return s;
        }
        case SynthKind::ridge: {
            const double dihedral = spec.angle ? *spec.angle : 90.0;
            if (!(dihedral > 0.0 && dihedral <= 180.0)) {
                throw InputError("synth: ridge dihedral angle must lie in (0, 180] degrees");
            }
            if (g.m() % 2 != 0) throw InputError("synth: ridge needs an even number of v intervals (m)");
            const double beta = (pi - dihedral * pi / 180.0) / 2.0;
            const double cb = std::cos(beta), sb = std::sin(beta);
            SynthSurface s{make([=](double u, double v) -> Vec3 {
                               double t = v - vc;
                               return Vec3(u, t * cb, std::abs(t) * sb);
                           }),
                           constant(g, 1.0), constant(g, 0.0), constant(g, 0.0)};
            s.crease_row = g.m() / 2;
            return s;
        }
        case SynthKind::snowman: {
            const double c = require_positive(spec.chart_scale, 2.2, "chart scale");
            // z(t) along the rows by RK4 with fine substeps.
            std::vector<double> z(g.nv());
            const int sub = 64;
            const double dt = c * g.h() / sub;
            double zt = 0.0;
            for (std::size_t j = 0; j < g.nv(); ++j) {
                z[j] = zt;
                for (int step = 0; step < sub; ++step) {
                    double k1 = snow_dz(zt), k2 = snow_dz(zt + 0.5 * dt * k1), k3 = snow_dz(zt + 0.5 * dt * k2),
                           k4 = snow_dz(zt + dt * k3);
                    zt += dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
                }
            }
            Vec3Field phi(g);
            ScalarField lambda(g), h(g), kg(g);
            for (std::size_t j = 0; j < g.nv(); ++j) {
                const double zz = z[j], r = snow_r(zz), rz = snow_rz(zz), rzz = snow_rzz(zz);
                const double w = 1.0 + rz * rz;
                const double k_par = 1.0 / (r * std::sqrt(w));
                const double k_mer = -rzz / std::pow(w, 1.5);
                for (std::size_t i = 0; i < g.nu(); ++i) {
                    const double th = c * (g.u(i) - 0.5);
                    phi(i, j) = Vec3(r * std::cos(th), r * std::sin(th), zz);
                    lambda(i, j) = c * r;
                    h(i, j) = -0.5 * (k_par + k_mer);
                    kg(i, j) = k_par * k_mer;
                }
            }
            SynthSurface s{SurfacePatch(std::move(phi)), std::move(lambda), std::move(h), std::move(kg)};
            return s;
        }
        case SynthKind::sine_graph: {
            const double amp = spec.amplitude ? *spec.amplitude : 0.1;
            if (!std::isfinite(amp)) throw InputError("synth: amplitude must be finite");
            SynthSurface s{make([=](double u, double v) -> Vec3 {
                               return Vec3(u, v, amp * std::sin(2.0 * pi * u) * std::sin(2.0 * pi * v));
                           }),
                           std::nullopt, std::nullopt, std::nullopt};
            s.conformal = false;
            return s;
        }
    }
    throw InputError("synth: unknown kind");
}

}  // namespace lh
