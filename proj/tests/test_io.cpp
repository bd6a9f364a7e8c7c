#include <cstring>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "holo/error.hpp"
#include "holo/io.hpp"

using namespace holo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  auto p = fs::temp_directory_path() / "holo_test_io" / name;
  fs::remove_all(p);
  return p;
}

Hologram ramp(std::size_t h, std::size_t w) {
  Hologram out{RealGrid(h, w), 3e-6, HologramKind::hybrid};
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out.values(r, c) = double(r * w + c) + 0.25;
  return out;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("header layout") {
  const auto bytes = encode_hologram(ramp(3, 5), PixelType::u16);
  REQUIRE(bytes.size() == kHoloHeaderSize + 15 * 2);
  CHECK(std::memcmp(bytes.data(), "HOLO1", 5) == 0);
  CHECK(bytes[5] == 5);  // width, little-endian
  CHECK(bytes[6] == 0);
  CHECK(bytes[9] == 3);  // height
  double pitch;
  std::memcpy(&pitch, bytes.data() + 13, 8);
  CHECK(pitch == 3e-6);
  CHECK(bytes[21] == 2);
  CHECK(bytes[22] == 1);
  // pixel (0, 1) = 1.25 -> 1
  CHECK(bytes[kHoloHeaderSize + 2] == 1);
  CHECK(bytes[kHoloHeaderSize + 3] == 0);
}

TEST_CASE("f32 round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e3, 1e5);
  Hologram h{RealGrid(17, 9), 12e-6, HologramKind::weighted_target};
  for (auto& v : h.values) v = u(rng);
  const Hologram back = decode_hologram(encode_hologram(h));
  CHECK(back.pitch == h.pitch);
  CHECK(back.kind == h.kind);
  REQUIRE(back.values.height() == 17);
  REQUIRE(back.values.width() == 9);
  for (std::size_t i = 0; i < h.values.size(); ++i)
    CHECK(back.values.values()[i] == double(float(h.values.values()[i])));
  // Encoding is a fixed point after one float rounding.
  CHECK(encode_hologram(back) == encode_hologram(h));
}

TEST_CASE("u16 rounding and saturation") {
  Hologram h{RealGrid(1, 7), 3e-6, HologramKind::noisy_counts};
  const double in[] = {-5.0, 0.4, 0.5, 2.5, 1234.49, 65534.6, 1e9};
  const double want[] = {0, 0, 1, 3, 1234, 65535, 65535};
  for (std::size_t i = 0; i < 7; ++i) h.values(0, i) = in[i];
  const Hologram back = decode_hologram(encode_hologram(h, PixelType::u16));
  for (std::size_t i = 0; i < 7; ++i) CHECK(back.values(0, i) == want[i]);
}

TEST_CASE("malformed files are rejected") {
  const auto good = encode_hologram(ramp(2, 2));
  CHECK_NOTHROW(decode_hologram(good));
  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_hologram(bad), IoError);
  bad = good;
  bad[21] = 9;
  CHECK_THROWS_AS(decode_hologram(bad), IoError);
  bad = good;
  bad[22] = 2;
  CHECK_THROWS_AS(decode_hologram(bad), IoError);
  bad = good;
  bad.pop_back();
  CHECK_THROWS_AS(decode_hologram(bad), IoError);
  bad = good;
  bad.push_back(0);
  CHECK_THROWS_AS(decode_hologram(bad), IoError);
  CHECK_THROWS_AS(decode_hologram(std::span(good).first(10)), IoError);
  bad = good;
  const double negative = -1.0;
  std::memcpy(bad.data() + 13, &negative, 8);
  CHECK_THROWS_AS(decode_hologram(bad), IoError);
}

TEST_CASE("file round trip and missing file") {
  const auto dir = scratch("files");
  const Hologram h = ramp(4, 6);
  write_hologram(dir / "nested" / "a.holo", h);
  CHECK(read_hologram(dir / "nested" / "a.holo").values == h.values);
  CHECK_THROWS_AS(read_hologram(dir / "missing.holo"), IoError);
}

TEST_CASE("label CSV") {
  const std::vector<Particle> ps{{1.23456789e-3, -2e-6, 0.1999999, 6e-6}, {0, 0, 5e-3, 100e-6}};
  const std::string text = encode_labels(ps);
  CHECK(text.rfind("x_um,y_um,z_mm,d_um\n", 0) == 0);
  CHECK(text.find("1234.57,-2,200,6\n") != std::string::npos);
  CHECK(text.find("0,0,5,100\n") != std::string::npos);
  const auto back = decode_labels(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].x == doctest::Approx(ps[0].x).epsilon(1e-6));
  CHECK(back[0].z == doctest::Approx(ps[0].z).epsilon(1e-6));
  CHECK(back[1].d == doctest::Approx(100e-6));
  CHECK(decode_labels(encode_labels({})).empty());
  CHECK(decode_labels("").empty());
  CHECK(decode_labels(" \n").empty());
  CHECK_THROWS_AS(decode_labels("a,b,c,d\n1,2,3,4\n"), IoError);
  CHECK_THROWS_AS(decode_labels("x_um,y_um,z_mm,d_um\n1,2,3\n"), IoError);
  CHECK_THROWS_AS(decode_labels("x_um,y_um,z_mm,d_um\n1,2,x,4\n"), IoError);
}

TEST_CASE("detection CSV") {
  const std::vector<Detection> ds{{3e-6, 4e-6, 50e-3, 20e-6, 0.75}};
  const std::string text = encode_detections(ds);
  CHECK(text == "x_um,y_um,z_mm,d_um,score\n3,4,50,20,0.75\n");
  const auto back = decode_detections(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].score == 0.75);
  CHECK(back[0].z == doctest::Approx(50e-3));
  const auto dir = scratch("csv");
  write_detections(dir / "d.csv", ds);
  CHECK(read_detections(dir / "d.csv").size() == 1);
  CHECK_THROWS_AS(read_labels(dir / "none.csv"), IoError);
}

}  // TEST_SUITE
