#pragma once

#include <cstddef>
#include <vector>

#include "holo/types.hpp"

namespace holo {

struct PropagationOptions {
  /// Embed the input in a 2x grid filled with its mean before filtering, to
  /// suppress wrap-around of the circular convolution.
  bool pad_to_double = false;
};

/// Angular-spectrum transfer function
///   G(k) = exp(2 pi i dz / lambda * sqrt(1 - lambda^2 |k|^2))
/// sampled in FFT order; evanescent modes (lambda^2 |k|^2 > 1) are zero.
struct PropagationKernel {
  ComplexGrid transfer;
  double dz = 0.0;
  double pitch = 0.0;
  double wavelength = 0.0;
};

PropagationKernel make_propagation_kernel(std::size_t height, std::size_t width, double pitch,
                                          double wavelength, double dz);

/// IFFT(G_dz * FFT(field)). dz may be negative.
ComplexField propagate(const ComplexField& field, double dz, const OpticalConfig& cfg,
                       const PropagationOptions& options = {});
/// Holograms enter as real fields (amplitude = values, zero phase).
ComplexField propagate(const Hologram& h, double dz, const OpticalConfig& cfg,
                       const PropagationOptions& options = {});

struct ReconSlice {
  double z = 0.0;
  Grid2D<float> amplitude;
};

struct ReconVolume {
  std::vector<ReconSlice> slices;
  double pitch = 0.0;
  std::size_t width = 0;
  std::size_t height = 0;
  HologramKind source_kind = HologramKind::clean_intensity;

  GridFrame frame() const { return {width, height, pitch}; }
};

/// Depths z_from, z_from + z_step, ... up to z_to (inclusive within 1e-9 of
/// a step). Throws ConfigError for z_from > z_to or z_step <= 0.
std::vector<double> slice_depths(double z_from, double z_to, double z_step);

/// One amplitude slice |propagate(h, z)| per depth. The hologram spectrum is
/// computed once; slices are independent and are spread over the worker
/// threads.
ReconVolume reconstruct_volume(const Hologram& h, double z_from, double z_to, double z_step,
                               const OpticalConfig& cfg, const PropagationOptions& options = {});

enum class EdgeFilter { none, gradient_magnitude };

struct CandidateParams {
  /// Voxels darker than this fraction of their slice's median amplitude are
  /// candidates.
  double amplitude_threshold = 0.65;
  EdgeFilter edge_filter = EdgeFilter::none;
  /// Minimum candidate area in the focus slice, px^2.
  double min_area = 2.0;
  double z_step = 100e-6;
  /// Footprint used to pick the focus slice, relative to the half-depth
  /// equivalent radius.
  double focus_footprint_scale = 1.1;
  /// With the gradient_magnitude filter: minimum mean Sobel gradient of the
  /// normalized amplitude along the candidate outline, per px.
  double edge_min_gradient = 0.05;

  void validate() const;
};

/// Thresholds every slice against its median amplitude, groups dark voxels
/// into 6-connected components across (x, y, slice), and reports one
/// detection per component:
///  - the focus slice is the one minimizing the mean normalized amplitude
///    over a disk footprint around the component (iterated to a fixed point,
///    seeded by the slice of largest integrated darkness);
///  - (x, y) is the centroid of the component in that slice;
///  - d is the equivalent-area diameter of the half-depth region
///    (amplitude below (1 + min) / 2 of background) around it;
///  - score is 1 - min normalized amplitude, clamped to [0, 1].
/// Results are sorted by descending score.
std::vector<Detection> extract_candidates(const ReconVolume& volume, const CandidateParams& params);

/// reconstruct_volume over [z_from, z_to] at params.z_step followed by
/// extract_candidates.
std::vector<Detection> detect_particles(const Hologram& h, double z_from, double z_to,
                                        const OpticalConfig& cfg, const CandidateParams& params,
                                        const PropagationOptions& options = {});

}  // namespace holo
