#include <gtest/gtest.h>

#include <sstream>

#include "lh/field_io.hpp"

using namespace lh;

namespace {

template <class T>
std::string bytes_of(const Field<T>& f) {
    std::ostringstream out;
    write_field(out, f);
    return out.str();
}

}  // namespace

TEST(FieldIo, ScalarRoundTrip) {
    ParamGrid g(9, 1.3);
    auto f = ScalarField::sample(g, [](double u, double v) { return std::sin(u * 7.1) / (v + 0.3); });
    std::istringstream in(bytes_of(f));
    auto back = std::get<ScalarField>(read_field(in));
    EXPECT_TRUE(back.grid() == g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back[i], f[i]);
}

TEST(FieldIo, ComplexAndVectorRoundTrip) {
    ParamGrid g(8, 1.0);
    auto c = ComplexField::sample(g, [](double u, double v) { return Complex(u / 3.0, -v * 1e-300); });
    auto p = Vec3Field::sample(g, [](double u, double v) { return Vec3(u, v, u * v / 7.0); });
    std::istringstream ci(bytes_of(c)), pi(bytes_of(p));
    EXPECT_EQ(bytes_of(std::get<ComplexField>(read_field(ci))), bytes_of(c));
    EXPECT_EQ(bytes_of(std::get<Vec3Field>(read_field(pi))), bytes_of(p));
}

TEST(FieldIo, HeaderLayout) {
    ParamGrid g(8, 1.0);
    std::string b = bytes_of(ScalarField(g));
    EXPECT_EQ(b.substr(0, 4), "LHF1");
    EXPECT_EQ(b.size(), 4u + 8 + 8 + 8 + 1 + 8 * g.size());
    EXPECT_EQ(static_cast<unsigned char>(b[4]), 8u);  // little-endian n
}

TEST(FieldIo, RejectsCorruptInput) {
    ParamGrid g(8, 1.0);
    std::string b = bytes_of(ScalarField(g));
    std::istringstream cut(b.substr(0, b.size() - 3));
    EXPECT_THROW(read_field(cut), InputError);
    std::string bad_kind = b;
    bad_kind[28] = 9;
    std::istringstream k(bad_kind);
    EXPECT_THROW(read_field(k), InputError);
    std::istringstream magic("LHF2" + b.substr(4));
    EXPECT_THROW(read_field(magic), InputError);
    auto nan = ScalarField(g);
    nan[5] = std::nan("");
    std::istringstream n(bytes_of(nan));
    EXPECT_THROW(read_field(n), InputError);
}

TEST(FieldIo, WrongKindRejected) {
    auto dir = ::testing::TempDir();
    save_field(dir + "/s.lhf", ScalarField(ParamGrid(8, 1.0)));
    EXPECT_THROW(load_vec3_field(dir + "/s.lhf"), InputError);
    EXPECT_NO_THROW(load_scalar_field(dir + "/s.lhf"));
    EXPECT_THROW(load_scalar_field(dir + "/missing.lhf"), InputError);
}

TEST(FieldCsv, FixedFormat) {
    ParamGrid g(8, 1.0);
    ScalarField f(g);
    f(1, 0) = 0.1;
    std::ostringstream out;
    write_field_csv(out, f);
    std::istringstream lines(out.str());
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    EXPECT_EQ(header, "i,j,u,v,value");
    EXPECT_EQ(first, "0,0,0,0,0");
    EXPECT_EQ(second, "1,0,0.125,0,0.10000000000000001");
}

TEST(MaskPgm, RoundTripAndValidation) {
    ParamGrid g(10, 1.0);
    auto m = HoleMask::rectangle(g, 0.3, 0.4, 0.6, 0.7);
    std::stringstream buf;
    write_mask_pgm(buf, m);
    auto back = read_mask_pgm(buf, g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.occluded(i), m.occluded(i));

    std::istringstream wrong_size("P2\n3 3\n255\n0 0 0 0 0 0 0 0 0\n");
    EXPECT_THROW(read_mask_pgm(wrong_size, g), InputError);
    std::istringstream binary("P5\n11 11\n255\n");
    EXPECT_THROW(read_mask_pgm(binary, g), InputError);
}

TEST(MaskPgm, CommentsAndMaxval) {
    ParamGrid g(8, 1.0);
    std::ostringstream text;
    text << "P2\n# made by hand\n9 9\n7\n";
    for (std::size_t j = 0; j < 9; ++j) {
        for (std::size_t i = 0; i < 9; ++i) text << ((i == 4 && j == 4) ? 7 : 0) << ' ';
        text << '\n';
    }
    std::istringstream in(text.str());
    auto m = read_mask_pgm(in, g);
    EXPECT_EQ(m.count(), 1u);
    EXPECT_TRUE(m.occluded(4, 4));
}
