#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "holo/types.hpp"

namespace holo {

struct NoiseSpec {
  /// Expected photons per pixel at plane-wave level.
  double photon_budget = 10'000.0;
  /// Gaussian read-noise standard deviation in counts; unset means 1% of
  /// the photon budget.
  std::optional<double> read_sigma;
  std::uint64_t seed = 0;

  double resolved_read_sigma() const { return read_sigma.value_or(0.01 * photon_budget); }
  void validate() const;
};

/// Per pixel: Poisson(N0 * I / A^2) + Normal(0, sigma_R), clamped at 0,
/// where A is the reference amplitude the intensity was formed with. Each
/// pixel draws from its own generator keyed on (seed, row, col), so the
/// output does not depend on thread count. Requires a clean_intensity input.
Hologram apply_sensor_noise(const Hologram& h, const NoiseSpec& spec,
                            double reference_amplitude = 1.0);

/// max(0, synth + empty - plane), elementwise. Throws ConfigError on shape
/// mismatch.
Hologram make_hybrid(const Hologram& synth, const Hologram& empty, const Hologram& plane);

/// Mean of each k x k block; the pitch grows by k. k must divide both
/// dimensions.
Hologram block_downsample(const Hologram& h, std::size_t k);

/// Constant grid at the given level (plane-wave-only reference).
Hologram uniform_hologram(std::size_t height, std::size_t width, double pitch, double level,
                          HologramKind kind);

/// Parameters of the substitute particle-free background used when no
/// recorded empty holograms are supplied.
struct BackgroundSpec {
  /// Peak relative amplitude of the smooth illumination gain.
  double gain_amplitude = 0.08;
  std::size_t gain_modes = 6;
  /// Highest spatial frequency of the gain field, in cycles per frame.
  double max_cycles = 3.0;
  /// Relative per-pixel fixed-pattern gain spread.
  double fixed_pattern_sigma = 0.01;
};

/// Synthetic "empty" hologram in photon counts: a low-frequency
/// multiplicative gain field times fixed-pattern pixel gain, at the photon
/// budget of `noise`, with shot and read noise applied.
Hologram structured_background(std::size_t height, std::size_t width, double pitch,
                               const NoiseSpec& noise, const BackgroundSpec& spec = {});

}  // namespace holo
