#include "holo/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "holo/config.hpp"
#include "holo/dataset.hpp"
#include "holo/error.hpp"
#include "holo/eval.hpp"
#include "holo/io.hpp"
#include "holo/log.hpp"
#include "holo/noise.hpp"
#include "holo/optics.hpp"
#include "holo/parallel.hpp"
#include "holo/reconstruct.hpp"
#include "holo/units.hpp"
#include "json.hpp"

namespace holo {
namespace {

namespace fs = std::filesystem;

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::numerical: return "numerical";
  }
  return "config";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::numerical: return 4;
  }
  return 2;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

PixelType parse_dtype(const std::string& text) {
  if (text == "f32") return PixelType::f32;
  if (text == "u16") return PixelType::u16;
  throw ConfigError("--dtype must be f32 or u16");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// Particle positions and sizes of a hologram the optics section describes;
// the hologram's own shape and pitch take precedence.
OpticalConfig optics_for(const RunConfig& cfg, const Hologram& h) {
  OpticalConfig o = cfg.optics();
  o.sensor_w = h.values.width();
  o.sensor_h = h.values.height();
  o.pixel_pitch = h.pitch;
  o.validate();
  return o;
}

struct EvalInputs {
  std::vector<std::string> ids;
  std::vector<EvalSample> samples;
};

EvalInputs load_eval_inputs(const fs::path& gt, const fs::path& det, double volume_cm3) {
  EvalInputs in;
  if (!fs::exists(gt)) throw IoError("not found: " + gt.string());
  if (!fs::exists(det)) throw IoError("not found: " + det.string());
  if (!fs::is_directory(gt)) {
    in.ids.push_back(gt.stem().string());
    in.samples.push_back({read_detections(det), read_labels(gt), volume_cm3});
    return in;
  }
  if (!fs::is_directory(det)) throw ConfigError("--det must be a directory when --gt is one");
  std::vector<fs::path> labels;
  for (const auto& entry : fs::directory_iterator(gt)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && entry.path().extension() == ".csv" &&
        name.find(".det.csv") == std::string::npos)
      labels.push_back(entry.path());
  }
  std::sort(labels.begin(), labels.end());
  for (const auto& label : labels) {
    const std::string id = label.stem().string();
    fs::path match = det / (id + ".det.csv");
    if (!fs::exists(match)) match = det / (id + ".csv");
    if (!fs::exists(match)) throw IoError("no detections for sample " + id + " in " + det.string());
    in.ids.push_back(id);
    in.samples.push_back({read_detections(match), read_labels(label), volume_cm3});
  }
  if (in.samples.empty()) throw IoError("no label files in " + gt.string());
  return in;
}

void write_bins(const fs::path& path, const std::vector<BinMetrics>& bins, double unit_scale) {
  std::string text = "lo,hi,tp,fp,fn,precision,recall,f1\n";
  for (const auto& b : bins) {
    text += fmt(b.lo * unit_scale) + ',' + fmt(b.hi * unit_scale) + ',' +
            std::to_string(b.counts.tp) + ',' + std::to_string(b.counts.fp) + ',' +
            std::to_string(b.counts.fn) + ',' + opt_fmt(b.precision) + ',' + opt_fmt(b.recall) +
            ',' + opt_fmt(b.f1) + '\n';
  }
  write_text(path, text);
}

int run_evaluate(const RunConfig& cfg, const fs::path& gt, const fs::path& det,
                 const fs::path& out_dir, const std::string& pitch_text, std::ostream& out) {
  const EvalSettings es = cfg.eval();
  const double pitch = !pitch_text.empty() ? parse_length(pitch_text)
                       : es.pitch         ? *es.pitch
                                          : cfg.optics().pixel_pitch;
  const EvalInputs in = load_eval_inputs(gt, det, es.sample_volume_cm3);

  const PRCurve curve = pr_curve(in.samples, es.match, pitch, es.thresholds);
  std::string pr = "threshold,precision,recall,f1,tp,fp,fn\n";
  std::size_t best = 0;
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    const Counts& c = curve.counts[i];
    pr += fmt(curve.thresholds[i]) + ',' + fmt(curve.precision[i]) + ',' + fmt(curve.recall[i]) +
          ',' + fmt(c.f1()) + ',' + std::to_string(c.tp) + ',' + std::to_string(c.fp) + ',' +
          std::to_string(c.fn) + '\n';
    if (c.f1() > curve.counts[best].f1()) best = i;
  }
  write_text(out_dir / "pr.csv", pr);

  // Binned metrics and error statistics at the peak-F1 threshold.
  const double op = curve.thresholds.empty() ? 0.0 : curve.thresholds[best];
  write_bins(out_dir / "bins_z.csv", binned_metrics(in.samples, BinBy::z, es.z_edges, es.match, pitch, op), 1e3);
  write_bins(out_dir / "bins_d.csv", binned_metrics(in.samples, BinBy::d, es.d_edges, es.match, pitch, op), 1e6);
  write_bins(out_dir / "bins_density.csv",
             binned_metrics(in.samples, BinBy::density, es.density_edges, es.match, pitch, op), 1.0);

  using nlohmann::json;
  std::vector<MatchPair> pairs;
  Counts total;
  bool zero_over_zero = false;
  for (const auto& s : in.samples) {
    std::vector<Detection> kept;
    for (const auto& d : s.dets)
      if (d.score >= op) kept.push_back(d);
    const auto m = match_detections(kept, s.gts, es.match, pitch);
    pairs.insert(pairs.end(), m.pairs.begin(), m.pairs.end());
    total.tp += m.tp();
    total.fp += m.fp.size();
    total.fn += m.fn.size();
  }
  for (const auto& c : curve.counts) zero_over_zero |= c.tp + c.fp == 0;
  json report = {
      {"samples", in.samples.size()},
      {"pitch_m", pitch},
      {"xy_window_px", es.match.xy_window},
      {"z_tol_m", es.match.z_tol},
      {"peak_f1", curve.peak_f1},
      {"operating_threshold", op},
      {"tp", total.tp},
      {"fp", total.fp},
      {"fn", total.fn},
      {"precision", total.precision()},
      {"recall", total.recall()},
      {"f1", total.f1()},
      {"precision_zero_over_zero_is_one", zero_over_zero},
  };
  if (!pairs.empty()) {
    const ErrorStats st = error_stats(pairs);
    report["abs_error"] = {{"z_median_m", st.z.median},
                           {"z_iqr_m", st.z.iqr},
                           {"d_median_m", st.d.median},
                           {"d_iqr_m", st.d.iqr}};
  } else {
    report["abs_error"] = nullptr;
  }
  write_text(out_dir / "report.json", report.dump(2) + "\n");
  out << "peak_f1 " << fmt(curve.peak_f1) << " at threshold " << fmt(op) << " over "
      << in.samples.size() << " samples\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Digital in-line holography toolkit: synthesis, reconstruction, datasets, evaluation",
               "holo"};
  app.require_subcommand(1);
  app.fallthrough();
  const std::string keys = "Config keys ([section] key = value; lengths need nm/um/mm/m):\n" +
                           describe_config_keys();
  app.footer(keys);

  std::string config_path;
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  bool quiet = false;
  bool verbose = false;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--seed", seed, "seed for every random draw")->capture_default_str();
  app.add_option("--set", overrides, "override a config key, section.key=value (repeatable)");
  app.add_flag("-q,--quiet", quiet, "suppress warnings");
  app.add_flag("-v,--verbose", verbose, "informational log output");

  std::string in_path, out_path, particles_path, dtype = "f32";
  auto add_sub = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->footer(keys);
    return sub;
  };

  auto* simulate = add_sub("simulate", "clean intensity hologram of a particle CSV");
  simulate->add_option("--particles", particles_path, "labels CSV (x_um,y_um,z_mm,d_um)")->required();
  simulate->add_option("--out", out_path, "output HOLO1 file")->required();
  simulate->add_option("--dtype", dtype, "f32 or u16")->capture_default_str();

  auto* weighted = add_sub("weighted", "weighted-hologram target of a particle CSV");
  weighted->add_option("--particles", particles_path, "labels CSV")->required();
  weighted->add_option("--out", out_path, "output HOLO1 file")->required();

  auto* noise = add_sub("noise", "apply shot and read noise to a clean hologram");
  noise->add_option("--in", in_path, "clean_intensity HOLO1 file")->required();
  noise->add_option("--out", out_path, "output HOLO1 file")->required();
  noise->add_option("--dtype", dtype, "f32 or u16")->capture_default_str();

  std::string empty_path, plane_path;
  auto* hybrid = add_sub("hybrid", "synth + empty - plane, clamped at 0");
  hybrid->add_option("--synth", in_path, "synthetic hologram (counts)")->required();
  hybrid->add_option("--empty", empty_path, "particle-free hologram (counts)")->required();
  hybrid->add_option("--plane", plane_path,
                     "plane-wave reference hologram; default uniform at the empty mean");
  hybrid->add_option("--out", out_path, "output HOLO1 file")->required();
  hybrid->add_option("--dtype", dtype, "f32 or u16")->capture_default_str();

  std::size_t factor = 1;
  auto* downsample = add_sub("downsample", "k x k block average");
  downsample->add_option("--in", in_path, "input HOLO1 file")->required();
  downsample->add_option("--out", out_path, "output HOLO1 file")->required();
  downsample->add_option("--k", factor, "block size, px")->required();
  downsample->add_option("--dtype", dtype, "f32 or u16")->capture_default_str();

  std::string kind_text;
  std::size_t n_holograms = 0;
  auto* gen = add_sub("gen-dataset", "generate dataset I, II or III");
  gen->add_option("--kind", kind_text, "toy_I, synthetic_II or hybrid_III");
  gen->add_option("--n", n_holograms, "parent holograms");
  gen->add_option("--out", out_path, "output directory")->required();

  std::string z_from, z_to, z_step, dump_dir;
  auto* recon = add_sub("reconstruct", "amplitude slices over a depth range");
  recon->add_option("--in", in_path, "input HOLO1 file")->required();
  recon->add_option("--z-from", z_from, "first depth (length)");
  recon->add_option("--z-to", z_to, "last depth (length)");
  recon->add_option("--z-step", z_step, "slice spacing (length)");
  recon->add_option("--dump", dump_dir, "write every slice as HOLO1 into this directory");
  recon->add_option("--out", out_path, "per-slice statistics CSV (default stdout)");

  auto* detect = add_sub("detect", "reconstruct and extract dark-spot candidates");
  detect->add_option("--in", in_path, "input HOLO1 file")->required();
  detect->add_option("--z-from", z_from, "first depth (length)");
  detect->add_option("--z-to", z_to, "last depth (length)");
  detect->add_option("--z-step", z_step, "slice spacing (length)");
  detect->add_option("--out", out_path, "detections CSV")->required();

  std::string gt_path, det_path, pitch_text;
  auto* evaluate = add_sub("evaluate", "match detections to labels; PR curve, binned metrics");
  evaluate->add_option("--gt", gt_path, "labels CSV or directory of <id>.csv")->required();
  evaluate->add_option("--det", det_path, "detections CSV or directory of <id>[.det].csv")->required();
  evaluate->add_option("--out-dir", out_path, "report directory")->required();
  evaluate->add_option("--pitch", pitch_text, "evaluation grid pitch (length)");

  std::size_t sensor_px = 0;
  std::string d_text, lambda_text;
  auto* zlimit = add_sub("zlimit", "Rayleigh-limited depth D*d/(2.44*lambda)");
  zlimit->add_option("--sensor-px", sensor_px, "sensor width, px (default optics.sensor_w)");
  zlimit->add_option("--pitch", pitch_text, "pixel pitch (length, default optics.pixel_pitch)");
  zlimit->add_option("--d", d_text, "particle diameter (length)")->required();
  zlimit->add_option("--lambda", lambda_text, "wavelength (length, default optics.wavelength)");

  std::string radial_path;
  auto* spectrum = add_sub("spectrum", "centered power spectrum of a hologram");
  spectrum->add_option("--in", in_path, "input HOLO1 file")->required();
  spectrum->add_option("--out", out_path, "spectrum grid (HOLO1, kind power_spectrum)");
  spectrum->add_option("--radial", radial_path, "radially averaged spectrum CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "holo: error[config]: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    set_log_level(quiet ? LogLevel::quiet : verbose ? LogLevel::info : LogLevel::warn);
    set_thread_count(threads);
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      const auto dot = o.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError("--set expects section.key=value, got '" + o + "'");
      cfg.set(o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1));
    }

    if (simulate->parsed() || weighted->parsed()) {
      const OpticalConfig optics = cfg.optics();
      const auto particles = read_labels(particles_path);
      const Hologram h = simulate->parsed()
                             ? hologram_intensity(particles, optics)
                             : weighted_hologram_target(particles, optics, cfg.weighted());
      write_hologram(out_path, h, simulate->parsed() ? parse_dtype(dtype) : PixelType::f32);
      out << "wrote " << out_path << " (" << h.values.width() << "x" << h.values.height() << ", "
          << to_string(h.kind) << ", " << particles.size() << " particles)\n";
    } else if (noise->parsed()) {
      const Hologram h = read_hologram(in_path);
      const OpticalConfig optics = optics_for(cfg, h);
      write_hologram(out_path, apply_sensor_noise(h, cfg.noise(seed), optics.reference_amplitude),
                     parse_dtype(dtype));
      out << "wrote " << out_path << "\n";
    } else if (hybrid->parsed()) {
      const Hologram synth = read_hologram(in_path);
      const Hologram empty = read_hologram(empty_path);
      const Hologram plane = plane_path.empty()
                                 ? uniform_hologram(empty.values.height(), empty.values.width(),
                                                    empty.pitch, empty.mean(),
                                                    HologramKind::noisy_counts)
                                 : read_hologram(plane_path);
      write_hologram(out_path, make_hybrid(synth, empty, plane), parse_dtype(dtype));
      out << "wrote " << out_path << "\n";
    } else if (downsample->parsed()) {
      write_hologram(out_path, block_downsample(read_hologram(in_path), factor), parse_dtype(dtype));
      out << "wrote " << out_path << "\n";
    } else if (gen->parsed()) {
      if (!kind_text.empty()) cfg.set("dataset", "kind", kind_text);
      if (n_holograms) cfg.set("dataset", "n_holograms", std::to_string(n_holograms));
      const Manifest m = generate_dataset(cfg.dataset(seed), out_path);
      out << "wrote " << m.samples.size() << " samples to " << out_path << "\n";
    } else if (recon->parsed() || detect->parsed()) {
      ReconSettings rs = cfg.recon();
      if (!z_from.empty()) rs.z_from = parse_length(z_from);
      if (!z_to.empty()) rs.z_to = parse_length(z_to);
      if (!z_step.empty()) rs.candidates.z_step = parse_length(z_step);
      rs.candidates.validate();
      const Hologram h = read_hologram(in_path);
      const OpticalConfig optics = optics_for(cfg, h);
      if (detect->parsed()) {
        const auto dets = detect_particles(h, rs.z_from, rs.z_to, optics, rs.candidates, rs.propagation);
        write_detections(out_path, dets);
        out << "wrote " << dets.size() << " detections to " << out_path << "\n";
      } else {
        const ReconVolume vol = reconstruct_volume(h, rs.z_from, rs.z_to, rs.candidates.z_step,
                                                   optics, rs.propagation);
        std::string stats = "z_mm,min,mean,max\n";
        for (std::size_t i = 0; i < vol.slices.size(); ++i) {
          const auto& s = vol.slices[i];
          const auto [lo, hi] = std::minmax_element(s.amplitude.begin(), s.amplitude.end());
          double sum = 0.0;
          for (float v : s.amplitude) sum += v;
          stats += fmt(s.z * 1e3) + ',' + fmt(*lo) + ',' + fmt(sum / double(s.amplitude.size())) +
                   ',' + fmt(*hi) + '\n';
          if (!dump_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof name, "slice_%05zu.holo", i);
            RealGrid g(s.amplitude.height(), s.amplitude.width());
            std::copy(s.amplitude.begin(), s.amplitude.end(), g.begin());
            write_grid(fs::path(dump_dir) / name, g, vol.pitch, h.kind);
          }
        }
        if (out_path.empty())
          out << stats;
        else
          write_text(out_path, stats);
      }
    } else if (evaluate->parsed()) {
      return run_evaluate(cfg, gt_path, det_path, out_path, pitch_text, out);
    } else if (zlimit->parsed()) {
      const OpticalConfig optics = cfg.optics();
      const double pitch = pitch_text.empty() ? optics.pixel_pitch : parse_length(pitch_text);
      const double lambda = lambda_text.empty() ? optics.wavelength : parse_length(lambda_text);
      const std::size_t px = sensor_px ? sensor_px : optics.sensor_w;
      const double d = parse_length(d_text);
      if (!(pitch > 0.0 && lambda > 0.0 && d > 0.0))
        throw ConfigError("zlimit inputs must be > 0");
      out << format_mm(z_limit(double(px) * pitch, d, lambda)) << "\n";
    } else if (spectrum->parsed()) {
      if (out_path.empty() && radial_path.empty())
        throw ConfigError("spectrum needs --out and/or --radial");
      const Hologram h = read_hologram(in_path);
      const RealGrid ps = power_spectrum(h);
      if (!out_path.empty()) write_grid(out_path, ps, h.pitch, HologramKind::power_spectrum);
      if (!radial_path.empty()) {
        const RadialProfile prof = radial_average(ps, h.pitch);
        std::string text = "frequency_per_mm,power\n";
        for (std::size_t i = 0; i < prof.frequency.size(); ++i)
          text += fmt(prof.frequency[i] * 1e-3) + ',' + fmt(prof.power[i]) + '\n';
        write_text(radial_path, text);
      }
    }
    return 0;
  } catch (const Error& e) {
    err << "holo: error[" << kind_name(e.kind()) << "]: " << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "holo: error[io]: " << one_line(e.what()) << "\n";
    return 3;
  } catch (const std::bad_alloc&) {
    err << "holo: error[numerical]: out of memory\n";
    return 4;
  } catch (const std::exception& e) {
    err << "holo: error[numerical]: " << one_line(e.what()) << "\n";
    return 4;
  }
}

}  // namespace holo
