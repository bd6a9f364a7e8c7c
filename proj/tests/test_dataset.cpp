#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "holo/dataset.hpp"
#include "holo/error.hpp"
#include "holo/io.hpp"
#include "holo/parallel.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace holo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "holo_test_dataset" / name;
  fs::remove_all(p);
  return p;
}

// Small synthetic_II geometry that runs in well under a second per sample.
DatasetSpec small_ii(std::uint64_t seed) {
  DatasetSpec s = DatasetSpec::defaults(DatasetKind::synthetic_II);
  s.strict_geometry = false;
  s.native.sensor_w = s.native.sensor_h = 256;
  s.volume.lateral_w = s.volume.lateral_h = s.native.sensor_width();
  s.volume.count = 6;
  s.downsample_k = 2;
  s.crop_sizes = {32, 64};
  s.n_holograms = 4;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("expected count of the reference volume") {
  const VolumeSpec v;
  CHECK(v.volume_cm3() == doctest::Approx(1.2288 * 1.2288 * 19.5));
  CHECK(v.expected_count() == doctest::Approx(2061.1).epsilon(1e-4));
  VolumeSpec zero;
  zero.density_per_cm3 = 0.0;
  CHECK(sample_particles(zero, 1).empty());
  VolumeSpec fixed;
  fixed.count = 17;
  CHECK(sample_particles(fixed, 1).size() == 17);
}

TEST_CASE("sampled particles lie in the box") {
  VolumeSpec v;
  v.lateral_w = 1e-3;
  v.lateral_h = 2e-3;
  v.z_min = 10e-3;
  v.z_max = 20e-3;
  v.density_per_cm3 = 50'000;
  const auto ps = sample_particles(v, 3);
  CHECK(ps.size() > 900);
  for (const auto& p : ps) {
    CHECK(p.x >= -0.5e-3);
    CHECK(p.x < 0.5e-3);
    CHECK(p.y >= -1e-3);
    CHECK(p.y < 1e-3);
    CHECK(p.z >= 10e-3);
    CHECK(p.z < 20e-3);
    CHECK(p.d >= v.d_min);
    CHECK(p.d <= v.d_max);
  }
  CHECK(sample_particles(v, 3) == ps);
  CHECK_FALSE(sample_particles(v, 4) == ps);
  v.z_max = v.z_min;
  CHECK_THROWS_AS(v.validate(), ConfigError);
}

TEST_CASE("kind names") {
  CHECK(parse_dataset_kind("II") == DatasetKind::synthetic_II);
  CHECK(parse_dataset_kind(to_string(DatasetKind::hybrid_III)) == DatasetKind::hybrid_III);
  CHECK_THROWS_AS(parse_dataset_kind("IV"), ConfigError);
}

TEST_CASE("strict geometry") {
  CHECK_NOTHROW(DatasetSpec::defaults(DatasetKind::toy_I).validate());
  CHECK_NOTHROW(DatasetSpec::defaults(DatasetKind::synthetic_II).validate());
  auto s = DatasetSpec::defaults(DatasetKind::toy_I);
  s.native.sensor_w = 256;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.strict_geometry = false;
  CHECK_NOTHROW(s.validate());
  s = DatasetSpec::defaults(DatasetKind::synthetic_II);
  s.volume.z_max = 150e-3;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = DatasetSpec::defaults(DatasetKind::synthetic_II);
  s.downsample_k = 3;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = DatasetSpec::defaults(DatasetKind::synthetic_II);
  s.crop_sizes = {2048};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("toy particles") {
  OpticalConfig cfg;
  const auto ps = toy_particles(cfg, 11);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].d == 6e-6);
  CHECK(ps[1].d == 100e-6);
  for (const auto& p : ps) {
    CHECK(p.z == 200e-3);
    CHECK(std::abs(p.x) <= 0.4 * cfg.sensor_width());
    CHECK(std::abs(p.y) <= 0.4 * cfg.sensor_width());
  }
}

TEST_CASE("crop keeps labels inside its footprint") {
  Hologram h{RealGrid(20, 20), 2e-6, HologramKind::hybrid};
  for (std::size_t r = 0; r < 20; ++r)
    for (std::size_t c = 0; c < 20; ++c) h.values(r, c) = double(100 * r + c);
  const GridFrame fr = h.frame();
  // Crop rows/cols [5, 13). Footprint in pixel coordinates is [4.5, 12.5).
  const std::vector<Particle> labels{
      {fr.x_of_col(4.5), fr.y_of_row(4.5), 1e-2, 1e-5},     // on the low edge: kept
      {fr.x_of_col(12.5), fr.y_of_row(8.0), 1e-2, 1e-5},    // on the high edge: dropped
      {fr.x_of_col(8.0), fr.y_of_row(12.49), 1e-2, 1e-5},   // kept
      {fr.x_of_col(4.49), fr.y_of_row(8.0), 1e-2, 1e-5},    // dropped
  };
  const Sample s = crop_sample(h, labels, {5, 5}, 8);
  CHECK(s.hologram.values.width() == 8);
  CHECK(s.hologram.values(0, 0) == 505.0);
  CHECK(s.hologram.values(7, 7) == 1212.0);
  REQUIRE(s.labels.size() == 2);
  const GridFrame cf = s.hologram.frame();
  CHECK(cf.col_of_x(s.labels[0].x) == doctest::Approx(-0.5));
  CHECK(cf.row_of_y(s.labels[0].y) == doctest::Approx(-0.5));
  CHECK(cf.col_of_x(s.labels[1].x) == doctest::Approx(3.0));
  CHECK(cf.row_of_y(s.labels[1].y) == doctest::Approx(7.49));
  CHECK(s.labels[1].z == 1e-2);
  CHECK_THROWS_AS(crop_sample(h, labels, {13, 0}, 8), ConfigError);
  CHECK_THROWS_AS(crop_sample(h, labels, {0, 0}, 0), ConfigError);
}

TEST_CASE("toy dataset layout") {
  auto spec = DatasetSpec::defaults(DatasetKind::toy_I);
  spec.n_holograms = 10;
  spec.seed = 42;
  spec.emit_targets = false;
  const auto dir = scratch("toy");
  const Manifest m = generate_dataset(spec, dir);
  REQUIRE(m.samples.size() == 10);
  for (const auto& rec : m.samples) {
    CHECK(rec.n_labels == 2);
    CHECK(rec.size == 512);
    const auto base = dir / rec.split / rec.id;
    const Hologram h = read_hologram(base.string() + ".holo");
    CHECK(h.values.width() == 512);
    CHECK(h.kind == HologramKind::noisy_counts);
    CHECK(read_labels(base.string() + ".csv").size() == 2);
  }
  const auto manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
  CHECK(manifest["samples"].size() == 10);
  CHECK(manifest["spec"]["kind"] == "toy_I");
}

TEST_CASE("generation is deterministic and thread independent") {
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  set_thread_count(1);
  generate_dataset(small_ii(7), a);
  set_thread_count(3);
  generate_dataset(small_ii(7), b);
  set_thread_count(0);
  auto other = small_ii(8);
  generate_dataset(other, c);
  const auto ta = oracle::tree_bytes(a);
  CHECK(ta.size() == 4 * 2 * 3 + 1);
  CHECK(ta == oracle::tree_bytes(b));
  CHECK_FALSE(ta == oracle::tree_bytes(c));
}

TEST_CASE("split is decided per parent hologram") {
  auto spec = small_ii(3);
  spec.n_holograms = 40;
  spec.val_fraction = 0.3;
  spec.emit_targets = false;
  spec.apply_noise = false;
  spec.native.sensor_w = spec.native.sensor_h = 64;
  spec.volume.lateral_w = spec.volume.lateral_h = spec.native.sensor_width();
  spec.volume.count = 1;
  spec.crop_sizes = {8, 16};
  const Manifest m = generate_dataset(spec, scratch("split"));
  std::map<std::size_t, std::set<std::string>> by_parent;
  std::size_t val = 0;
  for (const auto& r : m.samples) by_parent[r.parent].insert(r.split);
  for (const auto& [parent, splits] : by_parent) {
    CHECK(splits.size() == 1);
    val += splits.count("val");
  }
  CHECK(by_parent.size() == 40);
  CHECK(val > 2);
  CHECK(val < 25);
}

TEST_CASE("hybrid samples on a synthetic background") {
  auto spec = small_ii(5);
  spec.kind = DatasetKind::hybrid_III;
  spec.n_holograms = 2;
  const auto dir = scratch("hybrid");
  const Manifest m = generate_dataset(spec, dir);
  REQUIRE(m.samples.size() == 4);
  const auto& r = m.samples.front();
  const Hologram h = read_hologram(dir / r.split / (r.id + ".holo"));
  CHECK(h.kind == HologramKind::hybrid);
  CHECK(h.mean() == doctest::Approx(spec.noise.photon_budget).epsilon(0.15));
  CHECK(fs::exists(dir / r.split / (r.id + ".target.holo")));
}

TEST_CASE("native 4096 px sensor downsampled and cropped to 384 px") {
  auto spec = DatasetSpec::defaults(DatasetKind::synthetic_II);
  spec.strict_geometry = false;
  spec.n_holograms = 1;
  spec.volume.count = 3;
  spec.crop_sizes = {384};
  spec.emit_targets = false;
  spec.seed = 1;
  const auto dir = scratch("big");
  const Manifest m = generate_dataset(spec, dir);
  REQUIRE(m.samples.size() == 1);
  const auto& r = m.samples[0];
  CHECK(r.n_parent_particles == 3);
  CHECK(r.size == 384);
  CHECK(r.origin.row + 384 <= 1024);
  CHECK(r.origin.col + 384 <= 1024);
  const Hologram h = read_hologram(dir / r.split / (r.id + ".holo"));
  CHECK(h.values.width() == 384);
  CHECK(h.values.height() == 384);
  CHECK(h.pitch == doctest::Approx(12e-6));
  const auto labels = read_labels(dir / r.split / (r.id + ".csv"));
  CHECK(labels.size() == r.n_labels);
  for (const auto& p : labels) {
    CHECK(std::abs(p.x) <= 192 * 12e-6 + 1e-9);
    CHECK(std::abs(p.y) <= 192 * 12e-6 + 1e-9);
  }
}

}  // TEST_SUITE
