#include "lh/field_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lh {

namespace binary {

void write_u64(std::ostream& out, std::uint64_t x) {
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((x >> (8 * b)) & 0xffu);
    out.write(bytes, 8);
}

void write_f64(std::ostream& out, double x) { write_u64(out, std::bit_cast<std::uint64_t>(x)); }

void write_u8(std::ostream& out, std::uint8_t x) { out.put(static_cast<char>(x)); }

std::uint64_t read_u64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw InputError("truncated binary file");
    std::uint64_t x = 0;
    for (int b = 0; b < 8; ++b) x |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    return x;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

std::uint8_t read_u8(std::istream& in) {
    int c = in.get();
    if (c == std::char_traits<char>::eof()) throw InputError("truncated binary file");
    return static_cast<std::uint8_t>(c);
}

void write_magic(std::ostream& out, const char (&magic)[5]) { out.write(magic, 4); }

void expect_magic(std::istream& in, const char (&magic)[5]) {
    char got[4];
    if (!in.read(got, 4) || std::string(got, 4) != std::string(magic, 4)) {
        throw InputError(std::string("bad magic, expected ") + magic);
    }
}

}  // namespace binary

namespace {

void write_header(std::ostream& out, const ParamGrid& g, FieldKind kind) {
    binary::write_magic(out, "LHF1");
    binary::write_u64(out, g.n());
    binary::write_u64(out, g.m());
    binary::write_f64(out, g.k());
    binary::write_u8(out, static_cast<std::uint8_t>(kind));
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& f) {
    write_header(out, f.grid(), FieldKind::scalar);
    for (double x : f.values()) binary::write_f64(out, x);
}

void write_field(std::ostream& out, const ComplexField& f) {
    write_header(out, f.grid(), FieldKind::complex);
    for (const auto& x : f.values()) {
        binary::write_f64(out, x.real());
        binary::write_f64(out, x.imag());
    }
}

void write_field(std::ostream& out, const Vec3Field& f) {
    write_header(out, f.grid(), FieldKind::vec3);
    for (const auto& x : f.values())
        for (int c = 0; c < 3; ++c) binary::write_f64(out, x[c]);
}

namespace {

AnyField read_payload(std::istream& in) {
    binary::expect_magic(in, "LHF1");
    std::uint64_t n = binary::read_u64(in);
    std::uint64_t m = binary::read_u64(in);
    double k = binary::read_f64(in);
    std::uint8_t kind = binary::read_u8(in);
    ParamGrid grid(static_cast<std::size_t>(n), k);
    if (grid.m() != m) throw InputError("LHF1 header: m inconsistent with n and k");
    switch (kind) {
        case 0: {
            ScalarField f(grid);
            for (auto& x : f.values()) x = binary::read_f64(in);
            return f;
        }
        case 1: {
            ComplexField f(grid);
            for (auto& x : f.values()) {
                double re = binary::read_f64(in);
                double im = binary::read_f64(in);
                x = {re, im};
            }
            return f;
        }
        case 2: {
            Vec3Field f(grid);
            for (auto& x : f.values())
                for (int c = 0; c < 3; ++c) x[c] = binary::read_f64(in);
            return f;
        }
        default:
            throw InputError("LHF1 header: unknown field kind " + std::to_string(kind));
    }
}

}  // namespace

AnyField read_field(std::istream& in) {
    AnyField f = read_payload(in);
    if (!std::visit([](const auto& x) { return x.all_finite(); }, f)) {
        throw InputError("LHF1 payload contains non-finite values");
    }
    return f;
}

FieldKind kind_of(const AnyField& f) { return static_cast<FieldKind>(f.index()); }

void save_field(const std::string& path, const AnyField& f) {
    auto emit = [&](std::ostream& out) { std::visit([&](const auto& x) { write_field(out, x); }, f); };
    if (path == "-") {
        emit(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    emit(out);
    if (!out) throw InputError("write failed: " + path);
}

AnyField load_field(const std::string& path) {
    if (path == "-") {
        std::stringstream buffer;
        buffer << std::cin.rdbuf();
        return read_field(buffer);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return read_field(in);
}

namespace {

template <class T>
T load_as(const std::string& path, const char* kind) {
    AnyField f = load_field(path);
    if (auto* x = std::get_if<T>(&f)) return std::move(*x);
    throw InputError(path + ": expected a " + kind + " field");
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T, class Emit>
void write_csv(std::ostream& out, const Field<T>& f, const char* columns, Emit&& emit) {
    out << "i,j,u,v," << columns << '\n';
    const ParamGrid& g = f.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            out << i << ',' << j << ',' << fmt17(g.u(i)) << ',' << fmt17(g.v(j));
            emit(f(i, j));
            out << '\n';
        }
}

}  // namespace

ScalarField load_scalar_field(const std::string& path) { return load_as<ScalarField>(path, "scalar"); }
ComplexField load_complex_field(const std::string& path) { return load_as<ComplexField>(path, "complex"); }
Vec3Field load_vec3_field(const std::string& path) { return load_as<Vec3Field>(path, "vec3"); }

void write_field_csv(std::ostream& out, const ScalarField& f) {
    write_csv(out, f, "value", [&](double x) { out << ',' << fmt17(x); });
}

void write_field_csv(std::ostream& out, const ComplexField& f) {
    write_csv(out, f, "re,im", [&](const Complex& x) { out << ',' << fmt17(x.real()) << ',' << fmt17(x.imag()); });
}

void write_field_csv(std::ostream& out, const Vec3Field& f) {
    write_csv(out, f, "x,y,z", [&](const Vec3& x) {
        out << ',' << fmt17(x[0]) << ',' << fmt17(x[1]) << ',' << fmt17(x[2]);
    });
}

namespace {

// Next whitespace-separated PGM token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            if (!tok.empty()) return tok;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(c);
    }
    if (tok.empty()) throw InputError("PGM: unexpected end of file");
    return tok;
}

long pgm_int(std::istream& in) {
    std::string tok = pgm_token(in);
    try {
        std::size_t used = 0;
        long v = std::stol(tok, &used);
        if (used != tok.size()) throw InputError("PGM: bad integer '" + tok + "'");
        return v;
    } catch (const std::logic_error&) {
        throw InputError("PGM: bad integer '" + tok + "'");
    }
}

}  // namespace

HoleMask read_mask_pgm(std::istream& in, const ParamGrid& grid) {
    if (pgm_token(in) != "P2") throw InputError("PGM: only ASCII P2 masks are supported");
    long width = pgm_int(in);
    long height = pgm_int(in);
    long maxval = pgm_int(in);
    if (width != static_cast<long>(grid.nu()) || height != static_cast<long>(grid.nv())) {
        throw InputError("PGM: mask is " + std::to_string(width) + "x" + std::to_string(height) +
                         ", grid needs " + std::to_string(grid.nu()) + "x" + std::to_string(grid.nv()));
    }
    if (maxval <= 0 || maxval > 65535) throw InputError("PGM: bad maxval");
    HoleMask mask(grid);
    for (std::size_t j = 0; j < grid.nv(); ++j)
        for (std::size_t i = 0; i < grid.nu(); ++i) {
            long v = pgm_int(in);
            if (v == 0) continue;
            if (v != maxval) throw InputError("PGM: mask values must be 0 or maxval");
            mask.set(i, j, true);
        }
    return mask;
}

void write_mask_pgm(std::ostream& out, const HoleMask& mask) {
    const ParamGrid& g = mask.grid();
    out << "P2\n" << g.nu() << ' ' << g.nv() << "\n255\n";
    for (std::size_t j = 0; j < g.nv(); ++j) {
        for (std::size_t i = 0; i < g.nu(); ++i) out << (i ? " " : "") << (mask.occluded(i, j) ? 255 : 0);
        out << '\n';
    }
}

HoleMask load_mask(const std::string& path, const ParamGrid& grid) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_mask_pgm(in, grid);
}

void save_mask(const std::string& path, const HoleMask& mask) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    write_mask_pgm(out, mask);
}

}  // namespace lh
