#include "holo/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "holo/error.hpp"
#include "holo/log.hpp"
#include "holo/rng.hpp"
#include "json.hpp"

namespace holo {
namespace {

constexpr std::uint64_t kParticleStream = 0x50415254;  // "PART"
constexpr std::uint64_t kNoiseStream = 0x4e4f4953;     // "NOIS"
constexpr std::uint64_t kBackgroundStream = 0x424b47;  // "BKG"
constexpr std::uint64_t kCropStream = 0x43524f50;      // "CROP"
constexpr std::uint64_t kSplitStream = 0x53504c54;     // "SPLT"

double unit_interval(std::uint64_t key) {
  return double(mix64(key) >> 11) * 0x1.0p-53;
}

std::string sample_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

}  // namespace

void VolumeSpec::validate() const {
  if (!(lateral_w > 0.0 && lateral_h > 0.0)) throw ConfigError("volume: lateral size must be > 0");
  if (!(z_min > 0.0 && z_min < z_max)) throw ConfigError("volume: need 0 < z_min < z_max");
  if (!(d_min > 0.0 && d_min <= d_max)) throw ConfigError("volume: need 0 < d_min <= d_max");
  if (!count && !(density_per_cm3 >= 0.0)) throw ConfigError("volume: density must be >= 0");
}

std::vector<Particle> sample_particles(const VolumeSpec& spec, std::uint64_t seed) {
  spec.validate();
  CounterRng rng(seed);
  std::size_t n = 0;
  if (spec.count) {
    n = *spec.count;
  } else if (spec.expected_count() > 0.0) {
    n = std::size_t(std::poisson_distribution<long long>(spec.expected_count())(rng));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Particle> out(n);
  for (auto& p : out) {
    p.x = (unit(rng) - 0.5) * spec.lateral_w;
    p.y = (unit(rng) - 0.5) * spec.lateral_h;
    p.z = spec.z_min + unit(rng) * (spec.z_max - spec.z_min);
    p.d = spec.d_min + unit(rng) * (spec.d_max - spec.d_min);
  }
  return out;
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::toy_I: return "toy_I";
    case DatasetKind::synthetic_II: return "synthetic_II";
    case DatasetKind::hybrid_III: return "hybrid_III";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(std::string_view text) {
  if (text == "toy_I" || text == "I") return DatasetKind::toy_I;
  if (text == "synthetic_II" || text == "II") return DatasetKind::synthetic_II;
  if (text == "hybrid_III" || text == "III") return DatasetKind::hybrid_III;
  throw ConfigError("unknown dataset kind '" + std::string(text) + "'");
}

DatasetSpec DatasetSpec::defaults(DatasetKind kind) {
  DatasetSpec s;
  s.kind = kind;
  if (kind == DatasetKind::toy_I) return s;
  s.native.sensor_w = s.native.sensor_h = 4096;
  s.downsample_k = 4;
  s.crop_sizes = {128, 256, 384};
  s.volume.lateral_w = s.volume.lateral_h = s.native.sensor_width();
  return s;
}

void DatasetSpec::validate() const {
  native.validate();
  noise.validate();
  weighted.validate();
  if (kind != DatasetKind::toy_I) volume.validate();
  if (downsample_k == 0 || native.sensor_w % downsample_k || native.sensor_h % downsample_k)
    throw ConfigError("dataset: downsample_k must divide the sensor size");
  const std::size_t w = native.sensor_w / downsample_k;
  const std::size_t h = native.sensor_h / downsample_k;
  for (std::size_t c : crop_sizes)
    if (c == 0 || c > w || c > h) throw ConfigError("dataset: crop size out of range");
  if (!(val_fraction >= 0.0 && val_fraction <= 1.0))
    throw ConfigError("dataset: val_fraction must lie in [0, 1]");
  if (!backgrounds.empty() && kind != DatasetKind::hybrid_III)
    throw ConfigError("dataset: backgrounds only apply to hybrid_III");
  if (!strict_geometry) return;
  if (kind == DatasetKind::toy_I) {
    if (native.sensor_w != 512 || native.sensor_h != 512)
      throw ConfigError("dataset: toy_I requires a 512 x 512 sensor");
  } else {
    if (native.sensor_w != 4096 || native.sensor_h != 4096)
      throw ConfigError("dataset: synthetic_II/hybrid_III require a 4096 x 4096 native sensor");
    if (std::abs((volume.z_max - volume.z_min) - 195e-3) > 1e-9)
      throw ConfigError("dataset: synthetic_II/hybrid_III require a 195 mm sample depth");
  }
}

std::vector<Particle> toy_particles(const OpticalConfig& cfg, std::uint64_t seed) {
  CounterRng rng(seed);
  std::uniform_real_distribution<double> span(-0.4, 0.4);
  std::vector<Particle> out;
  for (double d : {6e-6, 100e-6}) {
    Particle p;
    p.x = span(rng) * double(cfg.sensor_w) * cfg.pixel_pitch;
    p.y = span(rng) * double(cfg.sensor_h) * cfg.pixel_pitch;
    p.z = 200e-3;
    p.d = d;
    out.push_back(p);
  }
  return out;
}

Sample crop_sample(const Hologram& h, std::span<const Particle> labels, CropOrigin origin,
                   std::size_t size) {
  if (size == 0 || origin.row + size > h.values.height() || origin.col + size > h.values.width())
    throw ConfigError("crop: out of bounds");
  Sample s;
  s.origin = origin;
  s.hologram = {RealGrid(size, size), h.pitch, h.kind};
  for (std::size_t r = 0; r < size; ++r) {
    auto src = h.values.row(origin.row + r).subspan(origin.col, size);
    std::copy(src.begin(), src.end(), s.hologram.values.row(r).begin());
  }

  const GridFrame parent = h.frame();
  const double center_x = parent.x_of_col(double(origin.col) + 0.5 * (double(size) - 1.0));
  const double center_y = parent.y_of_row(double(origin.row) + 0.5 * (double(size) - 1.0));
  // Pixel l covers [l - 0.5, l + 0.5) in column coordinates.
  const double lo_c = double(origin.col) - 0.5;
  const double lo_r = double(origin.row) - 0.5;
  for (const auto& p : labels) {
    const double c = parent.col_of_x(p.x);
    const double r = parent.row_of_y(p.y);
    if (c < lo_c || c >= lo_c + double(size) || r < lo_r || r >= lo_r + double(size)) continue;
    Particle q = p;
    q.x = p.x - center_x;
    q.y = p.y - center_y;
    s.labels.push_back(q);
  }
  return s;
}

std::uint64_t sample_seed(std::uint64_t dataset_seed, std::size_t index) {
  return hash_combine(dataset_seed, index);
}

Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  using nlohmann::json;

  std::vector<Hologram> backgrounds;
  for (const auto& path : spec.backgrounds) {
    Hologram bg = read_hologram(path);
    if (bg.values.width() != spec.native.sensor_w || bg.values.height() != spec.native.sensor_h)
      throw ConfigError("dataset: background " + path.string() + " does not match the sensor");
    backgrounds.push_back(std::move(bg));
  }
  if (spec.kind == DatasetKind::hybrid_III && backgrounds.empty())
    log_warning("hybrid_III: no backgrounds given, using the synthetic structured background");

  Manifest manifest;
  json samples = json::array();
  for (std::size_t index = 0; index < spec.n_holograms; ++index) {
    const std::uint64_t seed = sample_seed(spec.seed, index);
    const std::string split =
        unit_interval(hash_combine(seed, kSplitStream)) < spec.val_fraction ? "val" : "train";

    const std::vector<Particle> particles =
        spec.kind == DatasetKind::toy_I
            ? toy_particles(spec.native, hash_combine(seed, kParticleStream))
            : sample_particles(spec.volume, hash_combine(seed, kParticleStream));

    Hologram holo = hologram_intensity(particles, spec.native);
    if (spec.apply_noise) {
      NoiseSpec noise = spec.noise;
      noise.seed = hash_combine(seed, kNoiseStream);
      holo = apply_sensor_noise(holo, noise, spec.native.reference_amplitude);
    }
    if (spec.kind == DatasetKind::hybrid_III) {
      Hologram empty;
      if (backgrounds.empty()) {
        NoiseSpec bg_noise = spec.noise;
        bg_noise.seed = hash_combine(seed, kBackgroundStream);
        empty = structured_background(spec.native.sensor_h, spec.native.sensor_w,
                                      spec.native.pixel_pitch, bg_noise, spec.background);
      } else {
        empty = backgrounds[mix64(hash_combine(seed, kBackgroundStream)) % backgrounds.size()];
        empty.pitch = spec.native.pixel_pitch;
      }
      if (!spec.apply_noise) {
        // Bring the clean intensity to the background's count scale.
        const double scale = spec.noise.photon_budget /
                             (spec.native.reference_amplitude * spec.native.reference_amplitude);
        for (auto& v : holo.values) v *= scale;
      }
      const Hologram plane = uniform_hologram(spec.native.sensor_h, spec.native.sensor_w,
                                              spec.native.pixel_pitch, empty.mean(),
                                              HologramKind::noisy_counts);
      holo = make_hybrid(holo, empty, plane);
    }
    holo = block_downsample(holo, spec.downsample_k);

    std::optional<Hologram> target;
    if (spec.emit_targets)
      target = block_downsample(weighted_hologram_target(particles, spec.native, spec.weighted),
                                spec.downsample_k);

    struct Job {
      std::string id;
      CropOrigin origin;
      std::size_t size;
    };
    std::vector<Job> jobs;
    const std::string parent_id = sample_name(index);
    if (spec.crop_sizes.empty()) {
      if (holo.values.width() != holo.values.height())
        throw ConfigError("dataset: full-frame samples require a square sensor");
      jobs.push_back({parent_id, {0, 0}, holo.values.width()});
    } else {
      for (std::size_t ci = 0; ci < spec.crop_sizes.size(); ++ci) {
        const std::size_t size = spec.crop_sizes[ci];
        CounterRng rng(hash_combine(seed, kCropStream, ci));
        std::uniform_int_distribution<std::size_t> row(0, holo.values.height() - size);
        std::uniform_int_distribution<std::size_t> col(0, holo.values.width() - size);
        const std::size_t r = row(rng);
        const std::size_t c = col(rng);
        jobs.push_back({parent_id + "_c" + std::to_string(size), {r, c}, size});
      }
    }

    for (const auto& job : jobs) {
      const Sample s = crop_sample(holo, particles, job.origin, job.size);
      const auto base = out_dir / split / job.id;
      write_hologram(base.string() + ".holo", s.hologram, spec.dtype);
      write_labels(base.string() + ".csv", s.labels);
      if (target) {
        const Sample t = crop_sample(*target, {}, job.origin, job.size);
        write_hologram(base.string() + ".target.holo", t.hologram, PixelType::f32);
      }
      SampleRecord rec{job.id, split, index, seed, job.origin, job.size, s.labels.size(),
                       particles.size()};
      samples.push_back({{"id", rec.id},
                         {"split", rec.split},
                         {"parent", rec.parent},
                         {"seed", rec.seed},
                         {"origin_row", rec.origin.row},
                         {"origin_col", rec.origin.col},
                         {"size", rec.size},
                         {"n_labels", rec.n_labels},
                         {"n_parent_particles", rec.n_parent_particles},
                         {"pitch_m", s.hologram.pitch},
                         {"hologram", split + "/" + job.id + ".holo"},
                         {"labels", split + "/" + job.id + ".csv"},
                         {"target", target ? json(split + "/" + job.id + ".target.holo")
                                           : json(nullptr)}});
      manifest.samples.push_back(std::move(rec));
    }
  }

  json echo = {
      {"kind", std::string(to_string(spec.kind))},
      {"n_holograms", spec.n_holograms},
      {"seed", spec.seed},
      {"wavelength_m", spec.native.wavelength},
      {"pixel_pitch_m", spec.native.pixel_pitch},
      {"sensor_w", spec.native.sensor_w},
      {"sensor_h", spec.native.sensor_h},
      {"reference_amplitude", spec.native.reference_amplitude},
      {"downsample_k", spec.downsample_k},
      {"crop_sizes", spec.crop_sizes},
      {"photon_budget", spec.noise.photon_budget},
      {"read_sigma", spec.noise.resolved_read_sigma()},
      {"apply_noise", spec.apply_noise},
      {"d_w_m", spec.weighted.d_w},
      {"lambda_w_m", spec.weighted.resolved_lambda(spec.native)},
      {"emit_targets", spec.emit_targets},
      {"val_fraction", spec.val_fraction},
      {"dtype", spec.dtype == PixelType::f32 ? "f32" : "u16"},
      {"background", spec.kind != DatasetKind::hybrid_III ? "none"
                     : spec.backgrounds.empty()           ? "synthetic_structured"
                                                          : "files"},
  };
  if (spec.kind != DatasetKind::toy_I) {
    echo["volume"] = {{"lateral_w_m", spec.volume.lateral_w},
                      {"lateral_h_m", spec.volume.lateral_h},
                      {"z_min_m", spec.volume.z_min},
                      {"z_max_m", spec.volume.z_max},
                      {"density_per_cm3", spec.volume.density_per_cm3},
                      {"count", spec.volume.count ? json(*spec.volume.count) : json(nullptr)},
                      {"d_min_m", spec.volume.d_min},
                      {"d_max_m", spec.volume.d_max}};
  }
  if (!spec.backgrounds.empty()) {
    json files = json::array();
    for (const auto& p : spec.backgrounds) files.push_back(p.filename().string());
    echo["background_files"] = files;
  }
  const json doc = {{"format", "holo-dataset/1"}, {"spec", echo}, {"samples", samples}};
  write_text(out_dir / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

}  // namespace holo
