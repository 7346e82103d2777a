#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

#include "lh/grid.hpp"

namespace lh {

// Binary grid-field format ("LHF1"):
//   magic "LHF1" | u64 n | u64 m | f64 k | u8 kind | payload
// kind 0 = scalar, 1 = complex (re, im), 2 = vec3 (x, y, z). The payload is
// little-endian f64, row-major with i fastest.
enum class FieldKind : std::uint8_t { scalar = 0, complex = 1, vec3 = 2 };

using AnyField = std::variant<ScalarField, ComplexField, Vec3Field>;

void write_field(std::ostream& out, const ScalarField& f);
void write_field(std::ostream& out, const ComplexField& f);
void write_field(std::ostream& out, const Vec3Field& f);
AnyField read_field(std::istream& in);

// Path-based wrappers; "-" means stdin/stdout.
void save_field(const std::string& path, const AnyField& f);
AnyField load_field(const std::string& path);
ScalarField load_scalar_field(const std::string& path);
ComplexField load_complex_field(const std::string& path);
Vec3Field load_vec3_field(const std::string& path);

FieldKind kind_of(const AnyField& f);

// CSV with header i,j,u,v followed by value / re,im / x,y,z columns. Floats
// are printed with 17 significant digits.
void write_field_csv(std::ostream& out, const ScalarField& f);
void write_field_csv(std::ostream& out, const ComplexField& f);
void write_field_csv(std::ostream& out, const Vec3Field& f);

// ASCII PGM (P2) masks: width n+1, height m+1, row r holds v-index j = r;
// 0 = known, maxval = occluded.
HoleMask read_mask_pgm(std::istream& in, const ParamGrid& grid);
void write_mask_pgm(std::ostream& out, const HoleMask& mask);
HoleMask load_mask(const std::string& path, const ParamGrid& grid);
void save_mask(const std::string& path, const HoleMask& mask);

// Little-endian primitives shared with other binary formats.
namespace binary {
void write_u64(std::ostream& out, std::uint64_t x);
void write_f64(std::ostream& out, double x);
void write_u8(std::ostream& out, std::uint8_t x);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::uint8_t read_u8(std::istream& in);
void write_magic(std::ostream& out, const char (&magic)[5]);
void expect_magic(std::istream& in, const char (&magic)[5]);
}  // namespace binary

}  // namespace lh
