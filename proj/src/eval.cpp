#include "holo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "holo/error.hpp"

namespace holo {

void MatchSpec::validate() const {
  if (xy_window == 0 || xy_window % 2 == 0) throw ConfigError("match: xy_window must be odd and >= 1");
  if (!(z_tol >= 0.0)) throw ConfigError("match: z_tol must be >= 0");
}

MatchResult match_detections(std::span<const Detection> dets, std::span<const Particle> gts,
                             const MatchSpec& spec, double pitch) {
  spec.validate();
  if (!(pitch > 0.0)) throw ConfigError("match: pitch must be > 0");
  const double reach = double(spec.radius_px()) * pitch * (1.0 + 1e-9);

  struct Candidate {
    double dist;
    std::size_t det;
    std::size_t gt;
  };
  std::vector<Candidate> cand;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      const double dx = dets[i].x - gts[j].x;
      const double dy = dets[i].y - gts[j].y;
      if (std::max(std::abs(dx), std::abs(dy)) > reach) continue;
      if (std::abs(dets[i].z - gts[j].z) > spec.z_tol) continue;
      cand.push_back({std::hypot(dx, dy), i, j});
    }
  }
  auto key = [&](const Detection& d) { return std::tie(d.x, d.y, d.z, d.d, d.score); };
  std::sort(cand.begin(), cand.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (key(dets[a.det]) != key(dets[b.det])) return key(dets[a.det]) < key(dets[b.det]);
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.det < b.det;
  });

  MatchResult out;
  out.pitch = pitch;
  std::vector<bool> det_used(dets.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  for (const auto& c : cand) {
    if (det_used[c.det] || gt_used[c.gt]) continue;
    det_used[c.det] = gt_used[c.gt] = true;
    const auto& d = dets[c.det];
    const auto& g = gts[c.gt];
    out.pairs.push_back({c.gt, c.det, d.x - g.x, d.y - g.y, d.z - g.z, d.d - g.d});
  }
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (!det_used[i]) out.fp.push_back(i);
  for (std::size_t j = 0; j < gts.size(); ++j)
    if (!gt_used[j]) out.fn.push_back(j);
  return out;
}

double Counts::precision() const {
  return tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp);
}

double Counts::recall() const {
  return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn);
}

double Counts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

namespace {

std::vector<Detection> above(std::span<const Detection> dets, double threshold) {
  std::vector<Detection> out;
  for (const auto& d : dets)
    if (d.score >= threshold) out.push_back(d);
  return out;
}

}  // namespace

PRCurve pr_curve(std::span<const EvalSample> samples, const MatchSpec& spec, double pitch,
                 std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw ConfigError("pr_curve: thresholds must be ascending");
  PRCurve curve;
  for (double t : thresholds) {
    Counts c;
    for (const auto& s : samples) {
      const auto kept = above(s.dets, t);
      const auto m = match_detections(kept, s.gts, spec, pitch);
      c.tp += m.tp();
      c.fp += m.fp.size();
      c.fn += m.fn.size();
    }
    curve.thresholds.push_back(t);
    curve.precision.push_back(c.precision());
    curve.recall.push_back(c.recall());
    curve.counts.push_back(c);
    curve.peak_f1 = std::max(curve.peak_f1, c.f1());
  }
  return curve;
}

PRCurve pr_curve(std::span<const Detection> dets, std::span<const Particle> gts,
                 const MatchSpec& spec, double pitch, std::span<const double> thresholds) {
  const EvalSample s{{dets.begin(), dets.end()}, {gts.begin(), gts.end()}, 0.0};
  return pr_curve(std::span(&s, 1), spec, pitch, thresholds);
}

std::vector<BinMetrics> binned_metrics(std::span<const EvalSample> samples, BinBy by,
                                       std::span<const double> edges, const MatchSpec& spec,
                                       double pitch, double threshold) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
    throw ConfigError("binned_metrics: need at least two ascending edges");
  std::vector<BinMetrics> bins(edges.size() - 1);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    bins[i].lo = edges[i];
    bins[i].hi = edges[i + 1];
  }
  auto bin_of = [&](double v) -> BinMetrics* {
    if (v < edges.front() || v > edges.back()) return nullptr;
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t i = std::size_t(it - edges.begin());
    i = i == 0 ? 0 : i - 1;
    return &bins[std::min(i, bins.size() - 1)];
  };

  for (const auto& s : samples) {
    const auto kept = above(s.dets, threshold);
    const auto m = match_detections(kept, s.gts, spec, pitch);
    const double density = s.volume_cm3 > 0.0 ? double(s.gts.size()) / s.volume_cm3 : 0.0;
    auto gt_value = [&](std::size_t j) {
      switch (by) {
        case BinBy::z: return s.gts[j].z;
        case BinBy::d: return s.gts[j].d;
        case BinBy::density: return density;
      }
      return 0.0;
    };
    auto det_value = [&](std::size_t i) {
      switch (by) {
        case BinBy::z: return kept[i].z;
        case BinBy::d: return kept[i].d;
        case BinBy::density: return density;
      }
      return 0.0;
    };
    for (const auto& p : m.pairs)
      if (auto* b = bin_of(gt_value(p.gt))) ++b->counts.tp;
    for (std::size_t j : m.fn)
      if (auto* b = bin_of(gt_value(j))) ++b->counts.fn;
    for (std::size_t i : m.fp)
      if (auto* b = bin_of(det_value(i))) ++b->counts.fp;
  }
  for (auto& b : bins) {
    if (b.counts.tp + b.counts.fp + b.counts.fn == 0) continue;
    b.precision = b.counts.precision();
    b.recall = b.counts.recall();
    b.f1 = b.counts.f1();
  }
  return bins;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double h = (double(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - double(lo)) * (values[hi] - values[lo]);
}

ErrorStats error_stats(std::span<const MatchPair> pairs) {
  if (pairs.empty()) throw ConfigError("error_stats: no matched pairs");
  std::vector<double> z;
  std::vector<double> d;
  for (const auto& p : pairs) {
    z.push_back(std::abs(p.dz));
    d.push_back(std::abs(p.dd));
  }
  auto robust = [](const std::vector<double>& v) {
    return RobustStats{quantile(v, 0.5), quantile(v, 0.75) - quantile(v, 0.25)};
  };
  return {robust(z), robust(d)};
}

}  // namespace holo
