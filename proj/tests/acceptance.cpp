// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "holo/dataset.hpp"
#include "holo/eval.hpp"
#include "holo/noise.hpp"
#include "holo/optics.hpp"
#include "holo/reconstruct.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace holo;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Two-particle scene beyond the small particle's resolution limit.
Outcome rayleigh_toy() {
  OpticalConfig cfg;  // 512 x 512 @ 3 um, 355 nm
  const Particle small{300e-6, -240e-6, 200e-3, 6e-6};
  const Particle large{-150e-6, 90e-6, 200e-3, 100e-6};
  const std::vector<Particle> scene{small, large};
  const Hologram h = hologram_intensity(scene, cfg);
  const ReconVolume vol = reconstruct_volume(h, 195e-3, 205e-3, 100e-6, cfg);
  const auto dets = extract_candidates(vol, CandidateParams{});

  const double px = cfg.pixel_pitch;
  bool found_large = false;
  bool found_small = false;
  double best_dxy = INFINITY, best_dz = INFINITY;
  for (const auto& d : dets) {
    const double dxy = std::hypot(d.x - large.x, d.y - large.y);
    if (dxy <= 2.0 * px && std::abs(d.z - large.z) <= 0.5e-3) found_large = true;
    if (dxy < best_dxy) {
      best_dxy = dxy;
      best_dz = std::abs(d.z - large.z);
    }
    if (std::max(std::abs(d.x - small.x), std::abs(d.y - small.y)) <= 3.0 * px) found_small = true;
  }
  const double zl = z_limit(cfg.sensor_width(), small.d, cfg.wavelength);
  const bool zl_ok = std::abs(zl - 11e-3) <= 0.1 * 11e-3;
  return {found_large && !found_small && zl_ok,
          format("%zu detections; large particle nearest |dxy|=%.2f px |dz|=%.2f mm; small "
                 "found=%s; z_limit=%.2f mm",
                 dets.size(), best_dxy / px, best_dz * 1e3, found_small ? "yes" : "no", zl * 1e3)};
}

Outcome propagation_unitarity() {
  OpticalConfig cfg;
  cfg.sensor_w = cfg.sensor_h = 256;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> dz(-200e-3, 200e-3);
  double worst_rms = 0.0, worst_energy = 0.0;
  for (int t = 0; t < 100; ++t) {
    ComplexField f{ComplexGrid(256, 256), cfg.pixel_pitch};
    for (auto& v : f.values) v = {g(rng), g(rng)};
    const double step = dz(rng);
    const ComplexField fwd = propagate(f, step, cfg);
    const ComplexField back = propagate(fwd, -step, cfg);
    double err = 0.0, e0 = 0.0, e1 = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      err += std::norm(back.values.values()[i] - f.values.values()[i]);
      e0 += std::norm(f.values.values()[i]);
      e1 += std::norm(fwd.values.values()[i]);
    }
    worst_rms = std::max(worst_rms, std::sqrt(err / double(f.values.size())));
    worst_energy = std::max(worst_energy, std::abs(e1 - e0) / e0);
  }
  return {worst_rms <= 1e-10 && worst_energy <= 1e-9,
          format("worst round-trip RMS %.2e, worst energy drift %.2e", worst_rms, worst_energy)};
}

Outcome center_value() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double r = 2e-6 + u(rng) * 48e-6;
    const double lambda = 300e-9 + u(rng) * 500e-9;
    const double z_far = 10.0 * 4.0 * r * r / lambda;
    const double z = std::max(z_far, 5e-3) + u(rng) * 300e-3;
    OpticalConfig cfg;
    cfg.wavelength = lambda;
    cfg.sensor_w = cfg.sensor_h = 65;
    const ComplexField f = object_field({0.0, 0.0, z, 2.0 * r}, cfg);
    const double got = std::abs(f.values(32, 32));
    const double want = oracle::center_magnitude(r, z, lambda);
    worst = std::max(worst, std::abs(got - want) / want);
  }
  return {worst <= 1e-9, format("worst relative error %.2e over 20 triples", worst)};
}

Outcome noise_moments() {
  const std::size_t n = 1024;
  const Hologram flat = uniform_hologram(n, n, 3e-6, 1.0, HologramKind::clean_intensity);
  NoiseSpec spec;
  spec.read_sigma = 0.0;
  spec.seed = 2024;
  const Hologram noisy = apply_sensor_noise(flat, spec);
  double sum = 0.0, sum2 = 0.0;
  for (double v : noisy.values) sum += v;
  const double mean = sum / double(n * n);
  for (double v : noisy.values) sum2 += (v - mean) * (v - mean);
  const double var = sum2 / double(n * n - 1);
  const double n0 = spec.photon_budget;

  OpticalConfig cfg;
  cfg.sensor_w = cfg.sensor_h = 128;
  const Hologram synth = apply_sensor_noise(
      hologram_intensity(std::vector<Particle>{{0, 0, 50e-3, 40e-6}}, cfg), spec);
  NoiseSpec bg = spec;
  bg.seed = 99;
  const Hologram empty = structured_background(128, 128, cfg.pixel_pitch, bg);
  const Hologram hybrid = make_hybrid(synth, empty, empty);
  const bool identity = hybrid.values.values().size() == synth.values.values().size() &&
                        std::equal(hybrid.values.begin(), hybrid.values.end(), synth.values.begin());
  const bool ok = std::abs(mean - n0) / n0 <= 0.02 && std::abs(var - n0) / n0 <= 0.02 &&
                  std::abs(var / mean - 1.0) <= 0.02 && identity;
  return {ok, format("mean %.1f, variance %.1f (N0 %.0f, var/mean %.4f); hybrid identity %s", mean,
                     var, n0, var / mean, identity ? "exact" : "broken")};
}

Outcome matching_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_real_distribution<double> pos(0.0, 12.0);
  std::normal_distribution<double> jitter(0.0, 2.0);
  std::uniform_real_distribution<double> zpos(0.0, 200e-3);
  std::normal_distribution<double> zjit(0.0, 6e-3);
  std::bernoulli_distribution clutter(0.3);
  const double pitch = 10e-6;
  const MatchSpec spec;
  int equal = 0, exceed = 0, conservation_fail = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<Particle> gts(std::size_t(count(rng)));
    for (auto& g : gts) g = {pos(rng) * pitch, pos(rng) * pitch, zpos(rng), 20e-6};
    std::vector<Detection> dets(std::size_t(count(rng)));
    for (auto& d : dets) {
      if (!gts.empty() && !clutter(rng)) {
        const auto& g = gts[std::uniform_int_distribution<std::size_t>(0, gts.size() - 1)(rng)];
        d = {g.x + jitter(rng) * pitch, g.y + jitter(rng) * pitch, g.z + zjit(rng), g.d, 0.5};
      } else {
        d = {pos(rng) * pitch, pos(rng) * pitch, zpos(rng), 20e-6, 0.5};
      }
    }
    const auto m = match_detections(dets, gts, spec, pitch);
    std::vector<std::vector<bool>> adm(dets.size(), std::vector<bool>(gts.size()));
    for (std::size_t i = 0; i < dets.size(); ++i)
      for (std::size_t j = 0; j < gts.size(); ++j)
        adm[i][j] = std::max(std::abs(dets[i].x - gts[j].x), std::abs(dets[i].y - gts[j].y)) <=
                        3.0 * pitch * (1 + 1e-12) &&
                    std::abs(dets[i].z - gts[j].z) <= spec.z_tol;
    const int opt = oracle::optimal_matching(adm, dets.size(), gts.size());
    const int tp = int(m.tp());
    if (tp == opt) ++equal;
    if (tp > opt) ++exceed;
    if (m.tp() + m.fp.size() != dets.size() || m.tp() + m.fn.size() != gts.size())
      ++conservation_fail;
  }
  const double rate = double(equal) / trials;
  return {exceed == 0 && rate >= 0.95 && conservation_fail == 0,
          format("greedy == optimal in %.1f%%, greedy > optimal %d times, conservation failures %d",
                 100.0 * rate, exceed, conservation_fail)};
}

Outcome dataset_determinism_density() {
  const fs::path root = fs::temp_directory_path() / "holo_acceptance_dataset";
  fs::remove_all(root);
  DatasetSpec toy = DatasetSpec::defaults(DatasetKind::toy_I);
  toy.seed = 7;
  toy.n_holograms = 10;
  generate_dataset(toy, root / "a");
  generate_dataset(toy, root / "b");
  const auto a = oracle::tree_bytes(root / "a");
  const auto b = oracle::tree_bytes(root / "b");

  DatasetSpec syn = DatasetSpec::defaults(DatasetKind::synthetic_II);
  syn.strict_geometry = false;
  syn.native.sensor_w = syn.native.sensor_h = 256;
  syn.crop_sizes = {16, 32};
  syn.volume.lateral_w = syn.volume.lateral_h = syn.native.sensor_width();
  syn.volume.z_min = 20e-3;
  syn.volume.z_max = 60e-3;
  syn.volume.density_per_cm3 = 70.0 * 40.0;  // a handful per reduced volume
  syn.n_holograms = 4;
  syn.seed = 3;
  generate_dataset(syn, root / "c");
  generate_dataset(syn, root / "d");
  const auto c = oracle::tree_bytes(root / "c");
  const auto d = oracle::tree_bytes(root / "d");
  fs::remove_all(root);
  const bool identical = !a.empty() && a == b && !c.empty() && c == d;

  VolumeSpec vol;  // 12.288 mm x 12.288 mm x 195 mm at 70 / cm^3
  const double expected = 70.0 * (1.2288 * 1.2288 * 19.5);
  double total = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) total += double(sample_particles(vol, s).size());
  const double mean = total / 100.0;
  const bool density_ok = std::abs(mean - expected) / expected <= 0.05;
  return {identical && density_ok,
          format("%zu + %zu files byte-identical on regeneration: %s; mean count %.1f vs %.1f "
                 "expected",
                 a.size(), c.size(), identical ? "yes" : "no", mean, expected)};
}

Outcome complexity_scaling() {
  OpticalConfig cfg;
  cfg.sensor_w = cfg.sensor_h = 1024;
  const Hologram h = hologram_intensity(std::vector<Particle>{{0, 0, 50e-3, 50e-6}}, cfg);
  const std::vector<std::size_t> ls{8, 16, 32, 64};
  std::vector<double> lx, ly;
  std::string times;
  const double step = 100e-6;
  for (std::size_t l : ls) {
    double best = INFINITY;
    for (int rep = 0; rep < 2; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto vol = reconstruct_volume(h, 50e-3, 50e-3 + double(l - 1) * step, step, cfg);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      if (vol.slices.size() != l) return {false, "unexpected slice count"};
    }
    lx.push_back(std::log(double(l)));
    ly.push_back(std::log(best));
    times += format(" L=%zu:%.3fs", l, best);
  }
  const double k = oracle::slope(lx, ly);
  return {std::abs(k - 1.0) <= 0.1, format("fitted exponent %.3f;%s", k, times.c_str())};
}

// First local minimum of v along increasing radius, starting at index 1.
std::size_t first_local_min(const std::vector<double>& v) {
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] <= v[i - 1] && v[i] < v[i + 1]) return i;
  return v.size();
}

Outcome weighted_localization() {
  OpticalConfig cfg;
  cfg.sensor_w = cfg.sensor_h = 513;  // center pixel sits on the axis
  const std::size_t c = 256;
  const Particle p{0.0, 0.0, 100e-3, 100e-6};
  const WeightedTargetSpec spec;
  const double lambda_w = spec.resolved_lambda(cfg);
  const double j1z = oracle::first_j1_zero();
  const double want_w = j1z * lambda_w * p.z / (std::numbers::pi * spec.d_w);
  const double want_n = j1z * cfg.wavelength * p.z / (std::numbers::pi * p.d);

  // First zero ring of the diffracted envelope, for the weighted scatterer
  // and for the native one, read along the center row.
  const OpticalConfig wcfg = weighted_config(cfg, spec);
  const ComplexField fw = object_field(weighted_particles(std::vector<Particle>{p}, spec)[0], wcfg);
  const ComplexField fn = object_field(p, cfg);
  std::vector<double> wt, nt;
  for (std::size_t col = c; col < cfg.sensor_w; ++col) {
    wt.push_back(std::abs(fw.values(c, col)));
    nt.push_back(std::abs(fn.values(c, col)));
  }
  const double got_w = double(first_local_min(wt)) * cfg.pixel_pitch;
  const double got_n = double(first_local_min(nt)) * cfg.pixel_pitch;

  // The target must be the intensity formed by exactly that weighted field.
  const Hologram target = weighted_hologram_target(std::vector<Particle>{p}, cfg, spec);
  double target_dev = 0.0;
  for (std::size_t col = c; col < cfg.sensor_w; ++col)
    target_dev = std::max(target_dev, std::abs(target.values(c, col) -
                                               std::norm(1.0 + fw.values(c, col))));

  const double px = cfg.pixel_pitch;
  const bool ok = std::abs(got_w - want_w) <= px && std::abs(got_n - want_n) <= px &&
                  target_dev < 1e-12;
  return {ok, format("weighted first minimum %.1f um (expected %.1f), native %.1f um (expected "
                     "%.1f); target vs |1 + field|^2 max deviation %.1e",
                     got_w * 1e6, want_w * 1e6, got_n * 1e6, want_n * 1e6, target_dev)};
}

}  // namespace

int main() {
  report("rayleigh_toy_scene", rayleigh_toy);
  report("propagation_unitarity", propagation_unitarity);
  report("analytic_center_value", center_value);
  report("noise_moments_and_hybrid_identity", noise_moments);
  report("greedy_matching_vs_optimal", matching_oracle);
  report("dataset_determinism_and_density", dataset_determinism_density);
  report("reconstruction_scaling_in_slices", complexity_scaling);
  report("weighted_target_localization", weighted_localization);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
