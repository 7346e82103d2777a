#include <fstream>
#include <iostream>
#include <sstream>

#include "lh/field_io.hpp"
#include "lh/reconstruct.hpp"

namespace lh {

namespace {

template <class Fn>
void for_known(const NodeStates& st, Fn&& fn) {
    const ParamGrid& g = st.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (st(i, j) == NodeState::known) fn(i, j);
}

std::uint8_t narrow(std::size_t x) {
    if (x > 255) throw InputError("boundary ring layout does not fit the LHB1 header");
    return static_cast<std::uint8_t>(x);
}

}  // namespace

void write_boundary(std::ostream& out, const BoundaryData& bd) {
    if (!bd.rings) throw InputError("write_boundary: only ring-layout boundary data can be serialized");
    const ParamGrid& g = bd.grid();
    const auto& r = *bd.rings;
    binary::write_magic(out, "LHB1");
    binary::write_u64(out, g.n());
    binary::write_u64(out, g.m());
    binary::write_f64(out, g.k());
    for (std::size_t x : {r.phi_width, r.frame_begin, r.frame_width, r.mu_begin, r.mu_width})
        binary::write_u8(out, narrow(x));
    for_known(bd.position.states, [&](std::size_t i, std::size_t j) {
        for (int c = 0; c < 3; ++c) binary::write_f64(out, bd.position.phi(i, j)[c]);
    });
    for_known(bd.frame.states, [&](std::size_t i, std::size_t j) {
        for (int c = 0; c < 3; ++c) {
            binary::write_f64(out, bd.frame.frame.u(i, j)[c].real());
            binary::write_f64(out, bd.frame.frame.u(i, j)[c].imag());
        }
        for (int c = 0; c < 3; ++c) binary::write_f64(out, bd.frame.frame.w(i, j)[c]);
    });
    for_known(bd.mu.states, [&](std::size_t i, std::size_t j) {
        binary::write_f64(out, bd.mu.mu(i, j).real());
        binary::write_f64(out, bd.mu.mu(i, j).imag());
    });
}

BoundaryData read_boundary(std::istream& in) {
    binary::expect_magic(in, "LHB1");
    std::uint64_t n = binary::read_u64(in);
    std::uint64_t m = binary::read_u64(in);
    double k = binary::read_f64(in);
    ParamGrid g(static_cast<std::size_t>(n), k);
    if (g.m() != m) throw InputError("LHB1 header: m inconsistent with n and k");
    BoundaryData::Rings r;
    r.phi_width = binary::read_u8(in);
    r.frame_begin = binary::read_u8(in);
    r.frame_width = binary::read_u8(in);
    r.mu_begin = binary::read_u8(in);
    r.mu_width = binary::read_u8(in);
    if (r.phi_width == 0 || r.frame_begin < 1 || r.frame_width == 0 || r.mu_begin < 2 || r.mu_width == 0) {
        throw InputError("LHB1 header: invalid ring layout");
    }

    Vec3Field phi(g);
    CVec3Field u(g, r.frame_begin);
    Vec3Field w(g, r.frame_begin);
    ComplexField mu(g, r.mu_begin);
    NodeStates ps = NodeStates::rings(g, 0, r.phi_width);
    NodeStates fs = NodeStates::rings(g, r.frame_begin, r.frame_width);
    NodeStates ms = NodeStates::rings(g, r.mu_begin, r.mu_width);
    for_known(ps, [&](std::size_t i, std::size_t j) {
        for (int c = 0; c < 3; ++c) phi(i, j)[c] = binary::read_f64(in);
    });
    for_known(fs, [&](std::size_t i, std::size_t j) {
        for (int c = 0; c < 3; ++c) {
            double re = binary::read_f64(in);
            double im = binary::read_f64(in);
            u(i, j)[c] = Complex(re, im);
        }
        for (int c = 0; c < 3; ++c) w(i, j)[c] = binary::read_f64(in);
    });
    for_known(ms, [&](std::size_t i, std::size_t j) {
        double re = binary::read_f64(in);
        double im = binary::read_f64(in);
        mu(i, j) = Complex(re, im);
    });
    if (!phi.all_finite() || !u.all_finite() || !w.all_finite() || !mu.all_finite()) {
        throw InputError("LHB1 payload contains non-finite values");
    }
    return BoundaryData{{std::move(phi), std::move(ps)},
                        {NaturalFrame(std::move(u), std::move(w)), std::move(fs)},
                        {std::move(mu), std::move(ms)},
                        r};
}

void save_boundary(const std::string& path, const BoundaryData& bd) {
    if (path == "-") {
        write_boundary(std::cout, bd);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    write_boundary(out, bd);
    if (!out) throw InputError("write failed: " + path);
}

BoundaryData load_boundary(const std::string& path) {
    if (path == "-") {
        std::stringstream buffer;
        buffer << std::cin.rdbuf();
        return read_boundary(buffer);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return read_boundary(in);
}

}  // namespace lh
