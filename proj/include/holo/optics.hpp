#pragma once

#include <optional>
#include <span>
#include <vector>

#include "holo/types.hpp"

namespace holo {

/// Far-field (Fraunhofer) diffracted field of an opaque disk of the given
/// radius at lateral distance rho on a plane z downstream:
///
///   phi_o(rho) = -r / (2 i rho) * J1(2 pi r rho / (lambda z)) * exp(i pi rho^2 / (lambda z))
///
/// The sign is that of the field scattered by an opaque obstacle, so in-focus
/// reconstructions are dark. For rho < 1e-12 m the removable singularity is
/// replaced by its limit -pi r^2 / (2 i lambda z).
Complex fraunhofer_field(double rho, double radius, double z, double wavelength);

/// Object field of one particle sampled at every pixel center of the sensor.
/// Throws NumericalError for z <= 0, negative diameter, or non-finite output.
ComplexField object_field(const Particle& p, const OpticalConfig& cfg);

/// Adds the object field of p onto field (same sampling as object_field).
void accumulate_object_field(const Particle& p, const OpticalConfig& cfg, ComplexGrid& field);

/// Elementwise sum. Throws ConfigError on an empty list or mismatched
/// shape/pitch.
ComplexField superpose(std::span<const ComplexField> fields);

/// I = |phi_R + sum_j phi_o^j|^2 with phi_R the zero-phase plane wave of
/// amplitude cfg.reference_amplitude. Particles outside the far-field regime
/// are evaluated anyway and reported through the log.
Hologram hologram_intensity(std::span<const Particle> particles, const OpticalConfig& cfg);

std::size_t count_far_field_violations(std::span<const Particle> particles, double wavelength);

struct WeightedTargetSpec {
  double d_w = 100e-6;
  /// Unset means wavelength / 8 of the optical configuration.
  std::optional<double> lambda_w;

  double resolved_lambda(const OpticalConfig& cfg) const {
    return lambda_w.value_or(cfg.wavelength / 8.0);
  }
  void validate() const;
};

/// Particles with d replaced by spec.d_w, positions untouched.
std::vector<Particle> weighted_particles(std::span<const Particle> particles,
                                         const WeightedTargetSpec& spec);
/// cfg with the wavelength replaced by the weighted-target wavelength.
OpticalConfig weighted_config(const OpticalConfig& cfg, const WeightedTargetSpec& spec);

/// Intensity hologram re-synthesized with every diameter set to d_w and the
/// wavelength set to lambda_w. Depends on particle (x, y, z) only. Far-field
/// violations are only logged at info level here.
Hologram weighted_hologram_target(std::span<const Particle> particles, const OpticalConfig& cfg,
                                  const WeightedTargetSpec& spec = {});

/// Rayleigh-limited depth D_det * d / (2.44 lambda).
double z_limit(double sensor_width, double d, double wavelength);

/// |DFT(values - mean)|^2, shifted so zero frequency sits at (H/2, W/2).
RealGrid power_spectrum(const Hologram& h);

struct RadialProfile {
  std::vector<double> frequency;  // cycles per meter, bin centers
  std::vector<double> power;      // mean power per bin
};

/// Azimuthal average of a centered spectrum in rings one frequency-step
/// wide (the coarser of the two axes' steps).
RadialProfile radial_average(const RealGrid& centered_spectrum, double pitch);

}  // namespace holo
