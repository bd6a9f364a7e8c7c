#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "holo/io.hpp"
#include "holo/noise.hpp"
#include "holo/optics.hpp"
#include "holo/types.hpp"

namespace holo {

/// Box of particles centered laterally on the optical axis:
/// x in [-w/2, w/2), y in [-h/2, h/2), z in [z_min, z_max), d in [d_min, d_max].
struct VolumeSpec {
  double lateral_w = 12.288e-3;
  double lateral_h = 12.288e-3;
  double z_min = 5e-3;
  double z_max = 200e-3;
  /// Particles per cm^3; the count is Poisson(density * volume). Ignored
  /// when count is set.
  double density_per_cm3 = 70.0;
  std::optional<std::size_t> count;
  double d_min = 6e-6;
  double d_max = 100e-6;

  double volume_cm3() const { return lateral_w * lateral_h * (z_max - z_min) * 1e6; }
  double expected_count() const {
    return count ? double(*count) : density_per_cm3 * volume_cm3();
  }
  void validate() const;
};

std::vector<Particle> sample_particles(const VolumeSpec& spec, std::uint64_t seed);

enum class DatasetKind { toy_I, synthetic_II, hybrid_III };

std::string_view to_string(DatasetKind kind);
/// Accepts toy_I, synthetic_II, hybrid_III (also I, II, III).
DatasetKind parse_dataset_kind(std::string_view text);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::toy_I;
  std::size_t n_holograms = 10;
  /// Native sensor geometry at which holograms are synthesized.
  OpticalConfig native;
  std::size_t downsample_k = 1;
  /// Square crop sizes taken from every downsampled hologram, one crop per
  /// size. Empty means the full frame is emitted as the only sample.
  std::vector<std::size_t> crop_sizes;
  std::uint64_t seed = 0;
  VolumeSpec volume;
  /// Photon budget and read noise; the seed field is replaced per sample.
  NoiseSpec noise;
  bool apply_noise = true;
  WeightedTargetSpec weighted;
  bool emit_targets = true;
  /// Fraction of parent holograms assigned to the val split.
  double val_fraction = 0.1;
  /// Particle-free recordings for hybrid_III; empty selects the synthetic
  /// structured background.
  std::vector<std::filesystem::path> backgrounds;
  BackgroundSpec background;
  PixelType dtype = PixelType::f32;
  /// Enforce the reference geometry of each kind (toy_I: 512 px, II/III:
  /// 4096 px native and 195 mm depth). Off allows reduced test geometries.
  bool strict_geometry = true;

  /// Toy: 512 px @ 3 um, no crops. II/III: 4096 px @ 3 um, k = 4, crops
  /// {128, 256, 384}, volume over the full sensor and z in [5, 200] mm.
  static DatasetSpec defaults(DatasetKind kind);
  void validate() const;
};

/// Toy scene: a 6 um and a 100 um particle at z = 200 mm, lateral positions
/// uniform in the central 80% of the frame.
std::vector<Particle> toy_particles(const OpticalConfig& cfg, std::uint64_t seed);

struct CropOrigin {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const CropOrigin&, const CropOrigin&) = default;
};

struct Sample {
  Hologram hologram;
  std::vector<Particle> labels;
  CropOrigin origin;
};

/// size x size pixel crop starting at origin. A label is kept when its
/// center projects into the half-open pixel footprint of the crop; kept
/// labels are re-expressed in the crop's centered frame. Throws ConfigError
/// if the crop leaves the hologram.
Sample crop_sample(const Hologram& h, std::span<const Particle> labels, CropOrigin origin,
                   std::size_t size);

struct SampleRecord {
  std::string id;
  std::string split;
  std::size_t parent = 0;
  std::uint64_t seed = 0;
  CropOrigin origin;
  std::size_t size = 0;
  std::size_t n_labels = 0;
  std::size_t n_parent_particles = 0;
};

struct Manifest {
  std::vector<SampleRecord> samples;
};

/// Writes <out>/<split>/<id>.holo, <id>.csv and (with targets) <id>.target.holo
/// for every sample, plus <out>/manifest.json. Output bytes depend only on
/// the spec.
Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir);

/// Per-parent seed.
std::uint64_t sample_seed(std::uint64_t dataset_seed, std::size_t index);

}  // namespace holo
