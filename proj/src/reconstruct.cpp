#include "holo/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>

#include "holo/error.hpp"
#include "holo/fft.hpp"
#include "holo/parallel.hpp"

namespace holo {
namespace {

constexpr double kEvanescent = std::numeric_limits<double>::quiet_NaN();

// Phase accumulated per meter of propagation for every sampled mode, NaN
// for evanescent modes.
std::vector<double> phase_rates(std::size_t height, std::size_t width, double pitch,
                                double wavelength) {
  using std::numbers::pi;
  std::vector<double> rate(height * width);
  const double l2 = wavelength * wavelength;
  for (std::size_t r = 0; r < height; ++r) {
    const double fy = fft_frequency(r, height, pitch);
    for (std::size_t c = 0; c < width; ++c) {
      const double fx = fft_frequency(c, width, pitch);
      const double arg = 1.0 - l2 * (fx * fx + fy * fy);
      rate[r * width + c] = arg >= 0.0 ? 2.0 * pi / wavelength * std::sqrt(arg) : kEvanescent;
    }
  }
  return rate;
}

struct Padding {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t height = 0;
  std::size_t width = 0;
};

ComplexGrid embed(const ComplexGrid& in, bool pad, Padding& layout) {
  layout.height = in.height();
  layout.width = in.width();
  if (!pad) return in;
  Complex mean{0.0, 0.0};
  for (const auto& v : in) mean += v;
  mean /= double(in.size());
  ComplexGrid out(2 * in.height(), 2 * in.width(), mean);
  layout.row0 = in.height() / 2;
  layout.col0 = in.width() / 2;
  for (std::size_t r = 0; r < in.height(); ++r) {
    auto src = in.row(r);
    std::copy(src.begin(), src.end(), out.row(r + layout.row0).begin() + long(layout.col0));
  }
  return out;
}

// Holds the spectrum of one input so any number of depths can be evaluated
// at the cost of one inverse transform each.
class SpectrumPropagator {
 public:
  SpectrumPropagator(const ComplexGrid& input, double pitch, double wavelength, bool pad)
      : spectrum_(embed(input, pad, layout_)) {
    Fft2d fft(spectrum_.height(), spectrum_.width());
    fft.forward(spectrum_);
    rate_ = phase_rates(spectrum_.height(), spectrum_.width(), pitch, wavelength);
  }

  std::size_t work_height() const { return spectrum_.height(); }
  std::size_t work_width() const { return spectrum_.width(); }
  const Padding& layout() const { return layout_; }

  // work receives the propagated field on the (possibly padded) work grid.
  void field_at(double dz, Fft2d& fft, ComplexGrid& work) const {
    auto src = spectrum_.values();
    auto dst = work.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const double rate = rate_[i];
      dst[i] = std::isnan(rate) ? Complex{0.0, 0.0} : src[i] * std::polar(1.0, dz * rate);
    }
    fft.inverse(work);
  }

 private:
  Padding layout_;
  ComplexGrid spectrum_;
  std::vector<double> rate_;
};

ComplexGrid as_complex(const RealGrid& values) {
  ComplexGrid out(values.height(), values.width());
  auto src = values.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = {src[i], 0.0};
  return out;
}

ComplexField propagate_grid(const ComplexGrid& input, double pitch, double dz,
                            const OpticalConfig& cfg, const PropagationOptions& options) {
  cfg.validate();
  if (input.empty()) throw ConfigError("propagate: empty input");
  SpectrumPropagator prop(input, pitch, cfg.wavelength, options.pad_to_double);
  Fft2d fft(prop.work_height(), prop.work_width());
  ComplexGrid work(prop.work_height(), prop.work_width());
  prop.field_at(dz, fft, work);
  if (!options.pad_to_double) return {std::move(work), pitch};
  const Padding& p = prop.layout();
  ComplexGrid out(p.height, p.width);
  for (std::size_t r = 0; r < p.height; ++r) {
    auto src = work.row(r + p.row0).subspan(p.col0, p.width);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return {std::move(out), pitch};
}

}  // namespace

PropagationKernel make_propagation_kernel(std::size_t height, std::size_t width, double pitch,
                                          double wavelength, double dz) {
  PropagationKernel k{ComplexGrid(height, width), dz, pitch, wavelength};
  const auto rate = phase_rates(height, width, pitch, wavelength);
  auto dst = k.transfer.values();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = std::isnan(rate[i]) ? Complex{0.0, 0.0} : std::polar(1.0, dz * rate[i]);
  return k;
}

ComplexField propagate(const ComplexField& field, double dz, const OpticalConfig& cfg,
                       const PropagationOptions& options) {
  return propagate_grid(field.values, field.pitch, dz, cfg, options);
}

ComplexField propagate(const Hologram& h, double dz, const OpticalConfig& cfg,
                       const PropagationOptions& options) {
  return propagate_grid(as_complex(h.values), h.pitch, dz, cfg, options);
}

std::vector<double> slice_depths(double z_from, double z_to, double z_step) {
  if (!(z_step > 0.0) || !std::isfinite(z_step)) throw ConfigError("reconstruct: z_step must be > 0");
  if (!(z_from <= z_to)) throw ConfigError("reconstruct: empty depth range");
  const auto count = static_cast<std::size_t>(std::floor((z_to - z_from) / z_step + 1e-9)) + 1;
  std::vector<double> z(count);
  for (std::size_t i = 0; i < count; ++i) z[i] = z_from + double(i) * z_step;
  return z;
}

ReconVolume reconstruct_volume(const Hologram& h, double z_from, double z_to, double z_step,
                               const OpticalConfig& cfg, const PropagationOptions& options) {
  cfg.validate();
  const auto depths = slice_depths(z_from, z_to, z_step);
  const SpectrumPropagator prop(as_complex(h.values), h.pitch, cfg.wavelength,
                                options.pad_to_double);
  const Padding& layout = prop.layout();

  ReconVolume vol;
  vol.pitch = h.pitch;
  vol.width = h.values.width();
  vol.height = h.values.height();
  vol.source_kind = h.kind;
  vol.slices.resize(depths.size());

  // Strided assignment of slices to workers, each with its own FFT plan.
  const std::size_t workers = std::max<std::size_t>(1, std::min(thread_count(), depths.size()));
  parallel_for(workers, [&](std::size_t w) {
    Fft2d fft(prop.work_height(), prop.work_width());
    ComplexGrid work(prop.work_height(), prop.work_width());
    for (std::size_t i = w; i < depths.size(); i += workers) {
      prop.field_at(depths[i], fft, work);
      Grid2D<float> amp(layout.height, layout.width);
      for (std::size_t r = 0; r < layout.height; ++r) {
        auto src = work.row(r + layout.row0).subspan(layout.col0, layout.width);
        auto dst = amp.row(r);
        for (std::size_t c = 0; c < layout.width; ++c) dst[c] = float(std::abs(src[c]));
      }
      vol.slices[i] = {depths[i], std::move(amp)};
    }
  });
  return vol;
}

void CandidateParams::validate() const {
  if (!(amplitude_threshold > 0.0 && amplitude_threshold < 1.0))
    throw ConfigError("candidates: amplitude_threshold must lie in (0, 1)");
  if (!(z_step > 0.0)) throw ConfigError("candidates: z_step must be > 0");
  if (!(min_area >= 0.0)) throw ConfigError("candidates: min_area must be >= 0");
  if (!(focus_footprint_scale > 0.0))
    throw ConfigError("candidates: focus_footprint_scale must be > 0");
}

namespace {

struct SliceView {
  const Grid2D<float>* amplitude;
  double background;

  double normalized(std::size_t pixel) const {
    return background > 0.0 ? amplitude->values()[pixel] / background : 1.0;
  }
};

double median_of(const Grid2D<float>& grid) {
  std::vector<float> tmp(grid.begin(), grid.end());
  const auto mid = tmp.begin() + long(tmp.size() / 2);
  std::nth_element(tmp.begin(), mid, tmp.end());
  double m = *mid;
  if (tmp.size() % 2 == 0) {
    const double lower = *std::max_element(tmp.begin(), mid);
    m = 0.5 * (m + lower);
  }
  return m;
}

struct FocusMeasure {
  double col = 0.0;
  double row = 0.0;
  double min_normalized = 1.0;
  std::vector<std::size_t> half_depth_region;
};

// Centroid, minimum, and the 4-connected half-depth region grown from the
// component's pixels in one slice.
FocusMeasure measure_slice(const SliceView& slice, std::span<const std::size_t> pixels,
                           std::size_t width, std::size_t height) {
  FocusMeasure m;
  double sum_r = 0.0;
  double sum_c = 0.0;
  for (std::size_t p : pixels) {
    sum_r += double(p / width);
    sum_c += double(p % width);
    m.min_normalized = std::min(m.min_normalized, slice.normalized(p));
  }
  m.row = sum_r / double(pixels.size());
  m.col = sum_c / double(pixels.size());

  const double level = 0.5 * (1.0 + m.min_normalized);
  std::vector<std::uint8_t> seen(width * height, 0);
  std::vector<std::size_t> stack;
  for (std::size_t p : pixels) {
    if (slice.normalized(p) < level && !seen[p]) {
      seen[p] = 1;
      stack.push_back(p);
    }
  }
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    m.half_depth_region.push_back(p);
    const std::size_t r = p / width;
    const std::size_t c = p % width;
    auto visit = [&](std::size_t q) {
      if (!seen[q] && slice.normalized(q) < level) {
        seen[q] = 1;
        stack.push_back(q);
      }
    };
    if (r > 0) visit(p - width);
    if (r + 1 < height) visit(p + width);
    if (c > 0) visit(p - 1);
    if (c + 1 < width) visit(p + 1);
  }
  std::sort(m.half_depth_region.begin(), m.half_depth_region.end());
  return m;
}

double disk_mean(const SliceView& slice, double row, double col, double radius, std::size_t width,
                 std::size_t height) {
  const auto r0 = static_cast<long>(std::floor(row - radius));
  const auto r1 = static_cast<long>(std::ceil(row + radius));
  const auto c0 = static_cast<long>(std::floor(col - radius));
  const auto c1 = static_cast<long>(std::ceil(col + radius));
  double sum = 0.0;
  std::size_t n = 0;
  for (long r = std::max(0L, r0); r <= std::min(long(height) - 1, r1); ++r) {
    for (long c = std::max(0L, c0); c <= std::min(long(width) - 1, c1); ++c) {
      const double dr = double(r) - row;
      const double dc = double(c) - col;
      if (dr * dr + dc * dc > radius * radius) continue;
      sum += slice.normalized(std::size_t(r) * width + std::size_t(c));
      ++n;
    }
  }
  return n ? sum / double(n) : 1.0;
}

double outline_gradient(const SliceView& slice, std::span<const std::size_t> region,
                        std::size_t width, std::size_t height) {
  if (region.empty()) return 0.0;
  std::vector<std::uint8_t> inside(width * height, 0);
  for (std::size_t p : region) inside[p] = 1;
  auto at = [&](long r, long c) {
    r = std::clamp(r, 0L, long(height) - 1);
    c = std::clamp(c, 0L, long(width) - 1);
    return slice.normalized(std::size_t(r) * width + std::size_t(c));
  };
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p : region) {
    const long r = long(p / width);
    const long c = long(p % width);
    const bool boundary = r == 0 || c == 0 || r + 1 == long(height) || c + 1 == long(width) ||
                          !inside[p - width] || !inside[p + width] || !inside[p - 1] ||
                          !inside[p + 1];
    if (!boundary) continue;
    const double gx = (at(r - 1, c + 1) + 2 * at(r, c + 1) + at(r + 1, c + 1)) -
                      (at(r - 1, c - 1) + 2 * at(r, c - 1) + at(r + 1, c - 1));
    const double gy = (at(r + 1, c - 1) + 2 * at(r + 1, c) + at(r + 1, c + 1)) -
                      (at(r - 1, c - 1) + 2 * at(r - 1, c) + at(r - 1, c + 1));
    sum += std::hypot(gx, gy) / 8.0;
    ++n;
  }
  return n ? sum / double(n) : 0.0;
}

}  // namespace

std::vector<Detection> extract_candidates(const ReconVolume& volume, const CandidateParams& params) {
  params.validate();
  if (volume.slices.empty()) throw ConfigError("candidates: empty volume");
  const std::size_t width = volume.width;
  const std::size_t height = volume.height;
  const std::size_t plane = width * height;
  const std::size_t depth = volume.slices.size();
  const double thr = params.amplitude_threshold;

  std::vector<SliceView> slices(depth);
  for (std::size_t s = 0; s < depth; ++s) {
    const auto& amp = volume.slices[s].amplitude;
    if (amp.width() != width || amp.height() != height)
      throw ConfigError("candidates: slice shape mismatch");
    slices[s] = {&amp, 0.0};
  }
  parallel_for(depth, [&](std::size_t s) { slices[s].background = median_of(*slices[s].amplitude); });

  // 0: background, 1: unvisited candidate, 2: assigned to a component.
  std::vector<std::uint8_t> state(depth * plane, 0);
  parallel_for(depth, [&](std::size_t s) {
    for (std::size_t p = 0; p < plane; ++p)
      state[s * plane + p] = slices[s].normalized(p) < thr ? 1 : 0;
  });

  const GridFrame frame = volume.frame();
  std::vector<Detection> detections;
  std::vector<std::size_t> component;
  std::vector<std::size_t> queue;
  for (std::size_t seed = 0; seed < state.size(); ++seed) {
    if (state[seed] != 1) continue;
    component.clear();
    queue.assign(1, seed);
    state[seed] = 2;
    while (!queue.empty()) {
      const std::size_t v = queue.back();
      queue.pop_back();
      component.push_back(v);
      const std::size_t s = v / plane;
      const std::size_t p = v % plane;
      const std::size_t r = p / width;
      const std::size_t c = p % width;
      auto visit = [&](std::size_t q) {
        if (state[q] == 1) {
          state[q] = 2;
          queue.push_back(q);
        }
      };
      if (c > 0) visit(v - 1);
      if (c + 1 < width) visit(v + 1);
      if (r > 0) visit(v - width);
      if (r + 1 < height) visit(v + width);
      if (s > 0) visit(v - plane);
      if (s + 1 < depth) visit(v + plane);
    }
    std::sort(component.begin(), component.end());

    // Pixels of the component per slice (sorted voxel ids are slice-major).
    std::vector<std::span<const std::size_t>> per_slice(depth);
    std::vector<std::size_t> pixel_ids(component.size());
    std::vector<double> darkness(depth, 0.0);
    for (std::size_t i = 0; i < component.size(); ++i) {
      const std::size_t s = component[i] / plane;
      pixel_ids[i] = component[i] % plane;
      darkness[s] += thr - slices[s].normalized(pixel_ids[i]);
    }
    for (std::size_t i = 0; i < component.size();) {
      const std::size_t s = component[i] / plane;
      std::size_t j = i;
      while (j < component.size() && component[j] / plane == s) ++j;
      per_slice[s] = std::span<const std::size_t>(pixel_ids).subspan(i, j - i);
      i = j;
    }

    std::size_t focus = std::size_t(std::max_element(darkness.begin(), darkness.end()) - darkness.begin());
    std::set<std::size_t> tried;
    FocusMeasure m = measure_slice(slices[focus], per_slice[focus], width, height);
    for (int iter = 0; iter < 16; ++iter) {
      tried.insert(focus);
      const double radius = std::max(
          1.0, params.focus_footprint_scale *
                   std::sqrt(double(m.half_depth_region.size()) / std::numbers::pi));
      std::size_t best = focus;
      double best_mean = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < depth; ++s) {
        if (per_slice[s].empty()) continue;
        const double mean = disk_mean(slices[s], m.row, m.col, radius, width, height);
        if (mean < best_mean) {
          best_mean = mean;
          best = s;
        }
      }
      if (best == focus || tried.count(best)) break;
      focus = best;
      m = measure_slice(slices[focus], per_slice[focus], width, height);
    }

    if (double(per_slice[focus].size()) < params.min_area) continue;
    if (params.edge_filter == EdgeFilter::gradient_magnitude &&
        outline_gradient(slices[focus], m.half_depth_region, width, height) <
            params.edge_min_gradient)
      continue;

    Detection det;
    det.x = frame.x_of_col(m.col);
    det.y = frame.y_of_row(m.row);
    det.z = volume.slices[focus].z;
    det.d = 2.0 * std::sqrt(double(m.half_depth_region.size()) / std::numbers::pi) * volume.pitch;
    det.score = std::clamp(1.0 - m.min_normalized, 0.0, 1.0);
    detections.push_back(det);
  }

  std::stable_sort(detections.begin(), detections.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  return detections;
}

std::vector<Detection> detect_particles(const Hologram& h, double z_from, double z_to,
                                        const OpticalConfig& cfg, const CandidateParams& params,
                                        const PropagationOptions& options) {
  params.validate();
  const auto volume = reconstruct_volume(h, z_from, z_to, params.z_step, cfg, options);
  return extract_candidates(volume, params);
}

}  // namespace holo
