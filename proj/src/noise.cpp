#include "holo/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "holo/error.hpp"
#include "holo/parallel.hpp"
#include "holo/rng.hpp"

namespace holo {
namespace {

// Stream tags keep draws for different purposes uncorrelated under one seed.
constexpr std::uint64_t kShotNoiseStream = 0x53484f54;   // "SHOT"
constexpr std::uint64_t kFixedPatternStream = 0x46504e;  // "FPN"
constexpr std::uint64_t kGainStream = 0x4741494e;        // "GAIN"

double sample_counts(double mean, double sigma, std::uint64_t key) {
  CounterRng rng(key);
  double counts = 0.0;
  if (mean > 0.0) counts = double(std::poisson_distribution<long long>(mean)(rng));
  if (sigma > 0.0) counts += std::normal_distribution<double>(0.0, sigma)(rng);
  return std::max(0.0, counts);
}

void require_same_shape(const Hologram& a, const Hologram& b, const char* what) {
  if (!a.values.same_shape(b.values)) throw ConfigError(std::string(what) + ": shape mismatch");
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(photon_budget > 0.0) || !std::isfinite(photon_budget))
    throw ConfigError("noise: photon_budget must be > 0");
  if (read_sigma && !(*read_sigma >= 0.0)) throw ConfigError("noise: read_sigma must be >= 0");
}

Hologram apply_sensor_noise(const Hologram& h, const NoiseSpec& spec, double reference_amplitude) {
  spec.validate();
  if (h.kind != HologramKind::clean_intensity)
    throw ConfigError("noise: input must be a clean intensity hologram");
  if (!(reference_amplitude > 0.0)) throw ConfigError("noise: reference amplitude must be > 0");

  const double scale = spec.photon_budget / (reference_amplitude * reference_amplitude);
  const double sigma = spec.resolved_read_sigma();
  const std::uint64_t stream = hash_combine(spec.seed, kShotNoiseStream);

  Hologram out{RealGrid(h.values.height(), h.values.width()), h.pitch, HologramKind::noisy_counts};
  parallel_for(h.values.height(), [&](std::size_t row) {
    auto src = h.values.row(row);
    auto dst = out.values.row(row);
    for (std::size_t col = 0; col < src.size(); ++col)
      dst[col] = sample_counts(scale * src[col], sigma, hash_combine(stream, row, col));
  });
  return out;
}

Hologram make_hybrid(const Hologram& synth, const Hologram& empty, const Hologram& plane) {
  require_same_shape(synth, empty, "hybrid");
  require_same_shape(synth, plane, "hybrid");
  Hologram out{RealGrid(synth.values.height(), synth.values.width()), synth.pitch,
               HologramKind::hybrid};
  auto s = synth.values.values();
  auto e = empty.values.values();
  auto p = plane.values.values();
  auto o = out.values.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::max(0.0, s[i] + e[i] - p[i]);
  return out;
}

Hologram block_downsample(const Hologram& h, std::size_t k) {
  const std::size_t rows = h.values.height();
  const std::size_t cols = h.values.width();
  if (k == 0 || rows % k != 0 || cols % k != 0)
    throw ConfigError("downsample: factor " + std::to_string(k) + " does not divide " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  Hologram out{RealGrid(rows / k, cols / k), h.pitch * double(k), h.kind};
  const double inv = 1.0 / double(k * k);
  parallel_for(rows / k, [&](std::size_t orow) {
    auto dst = out.values.row(orow);
    for (std::size_t ocol = 0; ocol < dst.size(); ++ocol) {
      double sum = 0.0;
      for (std::size_t r = orow * k; r < (orow + 1) * k; ++r) {
        auto src = h.values.row(r);
        for (std::size_t c = ocol * k; c < (ocol + 1) * k; ++c) sum += src[c];
      }
      dst[ocol] = sum * inv;
    }
  });
  return out;
}

Hologram uniform_hologram(std::size_t height, std::size_t width, double pitch, double level,
                          HologramKind kind) {
  return {RealGrid(height, width, level), pitch, kind};
}

Hologram structured_background(std::size_t height, std::size_t width, double pitch,
                               const NoiseSpec& noise, const BackgroundSpec& spec) {
  noise.validate();
  using std::numbers::pi;

  struct Mode {
    double fx, fy, phase, amplitude;
  };
  CounterRng rng(hash_combine(noise.seed, kGainStream));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Mode> modes(spec.gain_modes);
  for (auto& m : modes) {
    m.fx = (2.0 * unit(rng) - 1.0) * spec.max_cycles / double(width);
    m.fy = (2.0 * unit(rng) - 1.0) * spec.max_cycles / double(height);
    m.phase = 2.0 * pi * unit(rng);
    m.amplitude = spec.gain_amplitude * unit(rng) / std::sqrt(double(std::max<std::size_t>(1, spec.gain_modes)));
  }

  const double sigma = noise.resolved_read_sigma();
  const std::uint64_t fpn_stream = hash_combine(noise.seed, kFixedPatternStream);
  const std::uint64_t shot_stream = hash_combine(noise.seed, kShotNoiseStream);
  Hologram out{RealGrid(height, width), pitch, HologramKind::noisy_counts};
  parallel_for(height, [&](std::size_t row) {
    auto dst = out.values.row(row);
    for (std::size_t col = 0; col < width; ++col) {
      double gain = 1.0;
      for (const auto& m : modes)
        gain += m.amplitude * std::cos(2.0 * pi * (m.fx * double(col) + m.fy * double(row)) + m.phase);
      CounterRng pixel(hash_combine(fpn_stream, row, col));
      gain *= 1.0 + spec.fixed_pattern_sigma * std::normal_distribution<double>(0.0, 1.0)(pixel);
      dst[col] = sample_counts(noise.photon_budget * std::max(0.0, gain), sigma,
                               hash_combine(shot_stream, row, col));
    }
  });
  return out;
}

}  // namespace holo
