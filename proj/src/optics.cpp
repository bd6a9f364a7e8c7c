#include "holo/optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "holo/error.hpp"
#include "holo/fft.hpp"
#include "holo/log.hpp"
#include "holo/parallel.hpp"

namespace holo {

void OpticalConfig::validate() const {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw ConfigError("optics: wavelength must be > 0");
  if (!(pixel_pitch > 0.0) || !std::isfinite(pixel_pitch))
    throw ConfigError("optics: pixel_pitch must be > 0");
  if (sensor_w < 2 || sensor_h < 2) throw ConfigError("optics: sensor must be at least 2x2 px");
  if (!(reference_amplitude > 0.0) || !std::isfinite(reference_amplitude))
    throw ConfigError("optics: reference_amplitude must be > 0");
}

bool Particle::far_field_valid(double wavelength) const {
  const double r = radius();
  return z >= 4.0 * r * r / wavelength;
}

std::string_view to_string(HologramKind kind) {
  switch (kind) {
    case HologramKind::clean_intensity: return "clean_intensity";
    case HologramKind::noisy_counts: return "noisy_counts";
    case HologramKind::hybrid: return "hybrid";
    case HologramKind::weighted_target: return "weighted_target";
    case HologramKind::power_spectrum: return "power_spectrum";
  }
  return "unknown";
}

double Hologram::mean() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / double(values.size());
}

Complex fraunhofer_field(double rho, double radius, double z, double wavelength) {
  using std::numbers::pi;
  if (radius == 0.0) return {0.0, 0.0};
  const double lz = wavelength * z;
  if (rho < 1e-12) {
    // J1(x) ~ x/2 as x -> 0.
    return {0.0, pi * radius * radius / (2.0 * lz)};
  }
  const double envelope = radius / (2.0 * rho) * ::j1(2.0 * pi * radius * rho / lz);
  const double phase = pi * rho * rho / lz;
  // -1/(2i) == i/2
  return Complex{0.0, envelope} * Complex{std::cos(phase), std::sin(phase)};
}

namespace {

void check_particle(const Particle& p) {
  if (!(p.z > 0.0) || !std::isfinite(p.z))
    throw NumericalError("object_field: particle depth must be > 0");
  if (!(p.d >= 0.0) || !std::isfinite(p.d))
    throw NumericalError("object_field: particle diameter must be >= 0");
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    throw NumericalError("object_field: particle position must be finite");
}

// Adds one row of a particle's field. Lateral offsets are formed in pixel
// units first so whole-pixel shifts of the particle reproduce exactly.
void accumulate_row(const Particle& p, const OpticalConfig& cfg, std::size_t row,
                    std::span<Complex> out) {
  const GridFrame frame = cfg.frame();
  const double pitch = cfg.pixel_pitch;
  const double pcol = frame.col_of_x(p.x);
  const double prow = frame.row_of_y(p.y);
  const double dy = (double(row) - prow) * pitch;
  const double r = p.radius();
  for (std::size_t col = 0; col < out.size(); ++col) {
    const double dx = (double(col) - pcol) * pitch;
    out[col] += fraunhofer_field(std::hypot(dx, dy), r, p.z, cfg.wavelength);
  }
}

void require_finite(const ComplexGrid& field) {
  for (const auto& v : field) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("object_field: non-finite field value (invalid geometry)");
  }
}

}  // namespace

void accumulate_object_field(const Particle& p, const OpticalConfig& cfg, ComplexGrid& field) {
  cfg.validate();
  check_particle(p);
  if (field.height() != cfg.sensor_h || field.width() != cfg.sensor_w)
    throw ConfigError("object_field: target grid does not match sensor shape");
  parallel_for(cfg.sensor_h, [&](std::size_t row) { accumulate_row(p, cfg, row, field.row(row)); });
}

ComplexField object_field(const Particle& p, const OpticalConfig& cfg) {
  ComplexField out{ComplexGrid(cfg.sensor_h, cfg.sensor_w), cfg.pixel_pitch};
  accumulate_object_field(p, cfg, out.values);
  require_finite(out.values);
  return out;
}

ComplexField superpose(std::span<const ComplexField> fields) {
  if (fields.empty()) throw ConfigError("superpose: no fields given");
  ComplexField out = fields.front();
  for (const auto& f : fields.subspan(1)) {
    if (!f.values.same_shape(out.values) || f.pitch != out.pitch)
      throw ConfigError("superpose: fields differ in shape or pitch");
    auto dst = out.values.values();
    auto src = f.values.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

std::size_t count_far_field_violations(std::span<const Particle> particles, double wavelength) {
  std::size_t n = 0;
  for (const auto& p : particles) n += p.far_field_valid(wavelength) ? 0 : 1;
  return n;
}

namespace {

Hologram intensity(std::span<const Particle> particles, const OpticalConfig& cfg, bool warn) {
  cfg.validate();
  for (const auto& p : particles) check_particle(p);
  if (const auto bad = count_far_field_violations(particles, cfg.wavelength); bad > 0) {
    std::ostringstream msg;
    msg << bad << " of " << particles.size()
        << " particles violate the far-field condition z >= 4 r^2 / lambda";
    warn ? log_warning(msg.str()) : log_info(msg.str());
  }

  Hologram h{RealGrid(cfg.sensor_h, cfg.sensor_w), cfg.pixel_pitch, HologramKind::clean_intensity};
  const double ref = cfg.reference_amplitude;
  parallel_for(cfg.sensor_h, [&](std::size_t row) {
    std::vector<Complex> acc(cfg.sensor_w, Complex{ref, 0.0});
    for (const auto& p : particles) accumulate_row(p, cfg, row, acc);
    auto out = h.values.row(row);
    for (std::size_t col = 0; col < acc.size(); ++col) out[col] = std::norm(acc[col]);
  });
  for (double v : h.values) {
    if (!std::isfinite(v)) throw NumericalError("hologram_intensity: non-finite intensity");
  }
  return h;
}

}  // namespace

Hologram hologram_intensity(std::span<const Particle> particles, const OpticalConfig& cfg) {
  return intensity(particles, cfg, true);
}

void WeightedTargetSpec::validate() const {
  if (!(d_w > 0.0)) throw ConfigError("weighted: d_w must be > 0");
  if (lambda_w && !(*lambda_w > 0.0)) throw ConfigError("weighted: lambda_w must be > 0");
}

std::vector<Particle> weighted_particles(std::span<const Particle> particles,
                                         const WeightedTargetSpec& spec) {
  std::vector<Particle> out(particles.begin(), particles.end());
  for (auto& p : out) p.d = spec.d_w;
  return out;
}

OpticalConfig weighted_config(const OpticalConfig& cfg, const WeightedTargetSpec& spec) {
  OpticalConfig out = cfg;
  out.wavelength = spec.resolved_lambda(cfg);
  return out;
}

Hologram weighted_hologram_target(std::span<const Particle> particles, const OpticalConfig& cfg,
                                  const WeightedTargetSpec& spec) {
  spec.validate();
  const auto wp = weighted_particles(particles, spec);
  // With the default d_w and lambda_w nearly every target is outside the
  // far-field regime, so this is not worth a warning.
  Hologram h = intensity(wp, weighted_config(cfg, spec), false);
  h.kind = HologramKind::weighted_target;
  return h;
}

double z_limit(double sensor_width, double d, double wavelength) {
  if (!(sensor_width > 0.0) || !(d > 0.0) || !(wavelength > 0.0))
    throw ConfigError("z_limit: inputs must be > 0");
  return sensor_width * d / (2.44 * wavelength);
}

RealGrid power_spectrum(const Hologram& h) {
  const double mean = h.mean();
  ComplexGrid work(h.values.height(), h.values.width());
  auto src = h.values.values();
  auto dst = work.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] - mean;
  Fft2d fft(work.height(), work.width());
  fft.forward(work);
  RealGrid power(work.height(), work.width());
  for (std::size_t i = 0; i < dst.size(); ++i) power.values()[i] = std::norm(dst[i]);
  return fft_shift(power);
}

RadialProfile radial_average(const RealGrid& spectrum, double pitch) {
  const std::size_t h = spectrum.height();
  const std::size_t w = spectrum.width();
  const double dfx = 1.0 / (double(w) * pitch);
  const double dfy = 1.0 / (double(h) * pitch);
  const double step = std::max(dfx, dfy);
  const double fmax = std::hypot(dfx * double(w / 2 + 1), dfy * double(h / 2 + 1));
  const auto bins = static_cast<std::size_t>(fmax / step) + 2;
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t r = 0; r < h; ++r) {
    const double fy = (double(r) - double(h / 2)) * dfy;
    for (std::size_t c = 0; c < w; ++c) {
      const double fx = (double(c) - double(w / 2)) * dfx;
      const auto bin = static_cast<std::size_t>(std::floor(std::hypot(fx, fy) / step + 0.5));
      sum[bin] += spectrum(r, c);
      ++count[bin];
    }
  }
  RadialProfile profile;
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    profile.frequency.push_back(double(b) * step);
    profile.power.push_back(sum[b] / double(count[b]));
  }
  return profile;
}

}  // namespace holo
