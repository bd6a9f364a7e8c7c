#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "holo/types.hpp"

namespace holo {

struct MatchSpec {
  /// Side of the square acceptance window in px (odd).
  std::size_t xy_window = 7;
  double z_tol = 10e-3;

  /// Chebyshev radius in px, (xy_window - 1) / 2.
  std::size_t radius_px() const { return (xy_window - 1) / 2; }
  void validate() const;
};

struct MatchPair {
  std::size_t gt = 0;
  std::size_t det = 0;
  /// det - gt
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double dd = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> fp;  // detection indices
  std::vector<std::size_t> fn;  // ground-truth indices
  double pitch = 0.0;

  std::size_t tp() const { return pairs.size(); }
};

/// Greedy one-to-one matching by ascending lateral distance. A pair is
/// admissible when the Chebyshev distance is within radius_px pixels and
/// |dz| <= z_tol. Ties are broken by detection content, then gt index, so
/// the resulting counts do not depend on detection order.
MatchResult match_detections(std::span<const Detection> dets, std::span<const Particle> gts,
                             const MatchSpec& spec, double pitch);

/// Detections and ground truth of one hologram.
struct EvalSample {
  std::vector<Detection> dets;
  std::vector<Particle> gts;
  /// Probed volume in cm^3, used for density binning.
  double volume_cm3 = 0.0;
};

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  /// 0/0 is 1.
  double precision() const;
  double recall() const;
  double f1() const;
};

struct PRCurve {
  std::vector<double> thresholds;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<Counts> counts;
  double peak_f1 = 0.0;
};

/// For each threshold, only detections with score >= threshold are
/// matched; counts are summed over samples. Thresholds must be ascending.
PRCurve pr_curve(std::span<const EvalSample> samples, const MatchSpec& spec, double pitch,
                 std::span<const double> thresholds);
PRCurve pr_curve(std::span<const Detection> dets, std::span<const Particle> gts,
                 const MatchSpec& spec, double pitch, std::span<const double> thresholds);

enum class BinBy { z, d, density };

struct BinMetrics {
  double lo = 0.0;
  double hi = 0.0;
  Counts counts;
  /// Unset for bins that received nothing.
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

/// Bins [edges[i], edges[i+1]) with the last bin closed. Each gt, with its
/// matched detection, goes to the bin of the gt's value; an unmatched
/// detection goes to the bin of its own value (z, d) or of its sample
/// (density, particles per cm^3). Values outside the edges are ignored.
std::vector<BinMetrics> binned_metrics(std::span<const EvalSample> samples, BinBy by,
                                       std::span<const double> edges, const MatchSpec& spec,
                                       double pitch, double threshold = 0.0);

struct RobustStats {
  double median = 0.0;
  double iqr = 0.0;
};

struct ErrorStats {
  RobustStats z;
  RobustStats d;
};

/// Linear-interpolation (type 7) quantile of unsorted values.
double quantile(std::vector<double> values, double q);

/// Median and interquartile range of |dz| and |dd|. Throws ConfigError on
/// empty input.
ErrorStats error_stats(std::span<const MatchPair> pairs);

}  // namespace holo
