#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "holo/grid.hpp"

namespace holo {

using Complex = std::complex<double>;
using RealGrid = Grid2D<double>;
using ComplexGrid = Grid2D<Complex>;

/// Centered sampling frame of a pixel grid. Pixel (k, l) sits at
/// ((l - (W-1)/2) * pitch, (k - (H-1)/2) * pitch); all lateral positions in
/// the library are expressed in this frame, in meters.
struct GridFrame {
  std::size_t width = 0;
  std::size_t height = 0;
  double pitch = 0.0;

  double x_of_col(double col) const { return (col - 0.5 * (double(width) - 1.0)) * pitch; }
  double y_of_row(double row) const { return (row - 0.5 * (double(height) - 1.0)) * pitch; }
  double col_of_x(double x) const { return x / pitch + 0.5 * (double(width) - 1.0); }
  double row_of_y(double y) const { return y / pitch + 0.5 * (double(height) - 1.0); }
};

struct OpticalConfig {
  double wavelength = 355e-9;
  double pixel_pitch = 3e-6;
  std::size_t sensor_w = 512;
  std::size_t sensor_h = 512;
  double reference_amplitude = 1.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  GridFrame frame() const { return {sensor_w, sensor_h, pixel_pitch}; }
  double sensor_width() const { return double(sensor_w) * pixel_pitch; }
};

/// Spherical scatterer; positions and diameter in meters.
struct Particle {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double d = 0.0;

  double radius() const { return 0.5 * d; }
  /// z >= 4 r^2 / wavelength.
  bool far_field_valid(double wavelength) const;

  friend bool operator==(const Particle&, const Particle&) = default;
};

struct ComplexField {
  ComplexGrid values;
  double pitch = 0.0;

  GridFrame frame() const { return {values.width(), values.height(), pitch}; }
};

enum class HologramKind : std::uint8_t {
  clean_intensity = 0,
  noisy_counts = 1,
  hybrid = 2,
  weighted_target = 3,
  /// Centered power spectrum written by the spectrum tool; not a hologram.
  power_spectrum = 4,
};

std::string_view to_string(HologramKind kind);

struct Hologram {
  RealGrid values;
  double pitch = 0.0;
  HologramKind kind = HologramKind::clean_intensity;

  GridFrame frame() const { return {values.width(), values.height(), pitch}; }
  double mean() const;
};

/// A detected particle. Lateral coordinates share the centered frame of the
/// hologram it came from; score lies in [0, 1].
struct Detection {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double d = 0.0;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

}  // namespace holo
