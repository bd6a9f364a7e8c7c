#include "holo/config.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "holo/error.hpp"
#include "holo/io.hpp"
#include "holo/units.hpp"

namespace holo {
namespace {

using enum ValueKind;

constexpr KeyInfo kKeys[] = {
    {"optics", "wavelength", length, "length", "355nm", "illumination wavelength"},
    {"optics", "pixel_pitch", length, "length", "3um", "sensor pixel pitch"},
    {"optics", "sensor_w", count, "px", "512", "sensor width"},
    {"optics", "sensor_h", count, "px", "512", "sensor height"},
    {"optics", "reference_amplitude", real, "-", "1", "plane-wave amplitude"},

    {"noise", "photon_budget", real, "photons", "10000", "expected photons per pixel at plane-wave level"},
    {"noise", "read_sigma", real, "counts", "0.01*photon_budget", "Gaussian read noise sigma"},

    {"weighted", "d_w", length, "length", "100um", "diameter assigned to every particle"},
    {"weighted", "lambda_w", length, "length", "wavelength/8", "target wavelength"},

    {"dataset", "kind", word, "toy_I|synthetic_II|hybrid_III", "toy_I", "dataset family"},
    {"dataset", "n_holograms", count, "count", "10", "parent holograms to generate"},
    {"dataset", "downsample_k", count, "px", "1 (II/III: 4)", "block-average factor"},
    {"dataset", "crop_sizes", count_list, "px list", "none (II/III: 128,256,384)", "square crop sizes"},
    {"dataset", "lateral_w", length, "length", "sensor width", "particle box width"},
    {"dataset", "lateral_h", length, "length", "sensor height", "particle box height"},
    {"dataset", "z_min", length, "length", "5mm", "nearest particle depth"},
    {"dataset", "z_max", length, "length", "200mm", "farthest particle depth"},
    {"dataset", "density", real, "1/cm^3", "70", "particle number density"},
    {"dataset", "count", count, "count", "unset", "fixed particle count (overrides density)"},
    {"dataset", "d_min", length, "length", "6um", "smallest diameter"},
    {"dataset", "d_max", length, "length", "100um", "largest diameter"},
    {"dataset", "val_fraction", real, "fraction", "0.1", "share of parents in the val split"},
    {"dataset", "apply_noise", boolean, "bool", "true", "apply sensor noise"},
    {"dataset", "emit_targets", boolean, "bool", "true", "write weighted targets"},
    {"dataset", "dtype", word, "f32|u16", "f32", "hologram pixel storage"},
    {"dataset", "backgrounds", path_list, "path list", "none", "empty holograms for hybrid_III"},
    {"dataset", "strict_geometry", boolean, "bool", "true", "enforce reference sensor sizes"},
    {"dataset", "background_gain_amplitude", real, "fraction", "0.08", "synthetic background gain ripple"},
    {"dataset", "background_gain_modes", count, "count", "6", "synthetic background gain modes"},
    {"dataset", "background_max_cycles", real, "cycles/frame", "3", "synthetic background gain frequency"},
    {"dataset", "background_fixed_pattern", real, "fraction", "0.01", "synthetic background pixel gain spread"},

    {"recon", "z_from", length, "length", "5mm", "first reconstruction depth"},
    {"recon", "z_to", length, "length", "200mm", "last reconstruction depth"},
    {"recon", "z_step", length, "length", "100um", "slice spacing"},
    {"recon", "amplitude_threshold", real, "fraction", "0.65", "dark-voxel threshold relative to slice median"},
    {"recon", "min_area", real, "px^2", "2", "minimum in-focus candidate area"},
    {"recon", "edge_filter", word, "none|gradient_magnitude", "none", "candidate edge filter"},
    {"recon", "edge_min_gradient", real, "1/px", "0.05", "minimum outline gradient (gradient_magnitude)"},
    {"recon", "focus_footprint_scale", real, "-", "1.1", "focus footprint radius factor"},
    {"recon", "pad", boolean, "bool", "false", "pad to 2x before propagation"},

    {"eval", "xy_window", count, "px", "7", "lateral acceptance window (odd)"},
    {"eval", "z_tol", length, "length", "10mm", "depth tolerance"},
    {"eval", "pitch", length, "length", "optics.pixel_pitch", "pitch of the evaluation grid"},
    {"eval", "thresholds", real_list, "score list", "0,0.05,...,1", "PR-curve score thresholds"},
    {"eval", "z_edges", length_list, "length list", "0mm,25mm,...,200mm", "depth bin edges"},
    {"eval", "d_edges", length_list, "length list", "0um,10um,...,100um", "diameter bin edges"},
    {"eval", "density_edges", real_list, "1/cm^3 list", "0,20,...,200", "density bin edges"},
    {"eval", "sample_volume", real, "cm^3", "0", "probed volume per sample, for density bins"},
};

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  text = trim(text);
  if (text.empty() || text == "none") return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void check_value(const KeyInfo& info, std::string_view value) {
  switch (info.kind) {
    case length: parse_length(value); break;
    case real: parse_real(value); break;
    case count: parse_count(value); break;
    case boolean: parse_bool(value); break;
    case word:
      if (trim(value).empty()) throw ConfigError("empty value");
      break;
    case length_list:
      for (auto v : split_list(value)) parse_length(v);
      break;
    case real_list:
      for (auto v : split_list(value)) parse_real(v);
      break;
    case count_list:
      for (auto v : split_list(value)) parse_count(v);
      break;
    case path_list: break;
  }
  if (info.section == "dataset" && info.key == "kind") parse_dataset_kind(trim(value));
  if (info.section == "dataset" && info.key == "dtype" && trim(value) != "f32" && trim(value) != "u16")
    throw ConfigError("dtype must be f32 or u16");
  if (info.section == "recon" && info.key == "edge_filter" && trim(value) != "none" &&
      trim(value) != "gradient_magnitude")
    throw ConfigError("edge_filter must be none or gradient_magnitude");
}

const KeyInfo* find_key(std::string_view section, std::string_view key) {
  for (const auto& k : kKeys)
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

std::vector<double> linspace_edges(double lo, double step, std::size_t n) {
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = lo + double(i) * step;
  return out;
}

}  // namespace

std::span<const KeyInfo> config_keys() { return kKeys; }

std::string describe_config_keys() {
  std::string out;
  char buf[256];
  for (const auto& k : kKeys) {
    const std::string name = std::string(k.section) + "." + std::string(k.key);
    std::snprintf(buf, sizeof buf, "  %-34s %-26.*s default %-.*s: %.*s\n", name.c_str(),
                  int(k.unit.size()), k.unit.data(), int(k.default_text.size()),
                  k.default_text.data(), int(k.help.size()), k.help.data());
    out += buf;
  }
  return out;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      const bool known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                     [&](const KeyInfo& k) { return k.section == section; });
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of a section");
    try {
      cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  return parse(read_text(path));
}

void RunConfig::set(std::string_view section, std::string_view key, std::string_view value) {
  const KeyInfo* info = find_key(section, key);
  if (!info)
    throw ConfigError("unknown key '" + std::string(section) + "." + std::string(key) + "'");
  try {
    check_value(*info, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(section) + "." + std::string(key) + ": " + e.what());
  }
  values_[{std::string(section), std::string(key)}] = std::string(trim(value));
}

std::optional<std::string> RunConfig::get(std::string_view section, std::string_view key) const {
  auto it = values_.find({std::string(section), std::string(key)});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

bool RunConfig::has(std::string_view section, std::string_view key) const {
  return get(section, key).has_value();
}

OpticalConfig RunConfig::optics(OpticalConfig base) const {
  if (auto v = get("optics", "wavelength")) base.wavelength = parse_length(*v);
  if (auto v = get("optics", "pixel_pitch")) base.pixel_pitch = parse_length(*v);
  if (auto v = get("optics", "sensor_w")) base.sensor_w = parse_count(*v);
  if (auto v = get("optics", "sensor_h")) base.sensor_h = parse_count(*v);
  if (auto v = get("optics", "reference_amplitude")) base.reference_amplitude = parse_real(*v);
  base.validate();
  return base;
}

NoiseSpec RunConfig::noise(std::uint64_t seed) const {
  NoiseSpec n;
  n.seed = seed;
  if (auto v = get("noise", "photon_budget")) n.photon_budget = parse_real(*v);
  if (auto v = get("noise", "read_sigma")) n.read_sigma = parse_real(*v);
  n.validate();
  return n;
}

WeightedTargetSpec RunConfig::weighted() const {
  WeightedTargetSpec w;
  if (auto v = get("weighted", "d_w")) w.d_w = parse_length(*v);
  if (auto v = get("weighted", "lambda_w")) w.lambda_w = parse_length(*v);
  w.validate();
  return w;
}

DatasetSpec RunConfig::dataset(std::uint64_t seed) const {
  const auto kind = parse_dataset_kind(get("dataset", "kind").value_or("toy_I"));
  DatasetSpec s = DatasetSpec::defaults(kind);
  s.seed = seed;
  s.native = optics(s.native);
  s.noise = noise(seed);
  s.weighted = weighted();
  // The particle box follows the sensor unless set explicitly.
  s.volume.lateral_w = s.native.sensor_width();
  s.volume.lateral_h = double(s.native.sensor_h) * s.native.pixel_pitch;
  if (auto v = get("dataset", "n_holograms")) s.n_holograms = parse_count(*v);
  if (auto v = get("dataset", "downsample_k")) s.downsample_k = parse_count(*v);
  if (auto v = get("dataset", "crop_sizes")) {
    s.crop_sizes.clear();
    for (auto item : split_list(*v)) s.crop_sizes.push_back(parse_count(item));
  }
  if (auto v = get("dataset", "lateral_w")) s.volume.lateral_w = parse_length(*v);
  if (auto v = get("dataset", "lateral_h")) s.volume.lateral_h = parse_length(*v);
  if (auto v = get("dataset", "z_min")) s.volume.z_min = parse_length(*v);
  if (auto v = get("dataset", "z_max")) s.volume.z_max = parse_length(*v);
  if (auto v = get("dataset", "density")) s.volume.density_per_cm3 = parse_real(*v);
  if (auto v = get("dataset", "count")) s.volume.count = parse_count(*v);
  if (auto v = get("dataset", "d_min")) s.volume.d_min = parse_length(*v);
  if (auto v = get("dataset", "d_max")) s.volume.d_max = parse_length(*v);
  if (auto v = get("dataset", "val_fraction")) s.val_fraction = parse_real(*v);
  if (auto v = get("dataset", "apply_noise")) s.apply_noise = parse_bool(*v);
  if (auto v = get("dataset", "emit_targets")) s.emit_targets = parse_bool(*v);
  if (auto v = get("dataset", "dtype")) s.dtype = *v == "u16" ? PixelType::u16 : PixelType::f32;
  if (auto v = get("dataset", "backgrounds"))
    for (auto item : split_list(*v)) s.backgrounds.emplace_back(std::string(item));
  if (auto v = get("dataset", "strict_geometry")) s.strict_geometry = parse_bool(*v);
  if (auto v = get("dataset", "background_gain_amplitude")) s.background.gain_amplitude = parse_real(*v);
  if (auto v = get("dataset", "background_gain_modes")) s.background.gain_modes = parse_count(*v);
  if (auto v = get("dataset", "background_max_cycles")) s.background.max_cycles = parse_real(*v);
  if (auto v = get("dataset", "background_fixed_pattern"))
    s.background.fixed_pattern_sigma = parse_real(*v);
  s.validate();
  return s;
}

ReconSettings RunConfig::recon() const {
  ReconSettings r;
  if (auto v = get("recon", "z_from")) r.z_from = parse_length(*v);
  if (auto v = get("recon", "z_to")) r.z_to = parse_length(*v);
  auto& c = r.candidates;
  if (auto v = get("recon", "z_step")) c.z_step = parse_length(*v);
  if (auto v = get("recon", "amplitude_threshold")) c.amplitude_threshold = parse_real(*v);
  if (auto v = get("recon", "min_area")) c.min_area = parse_real(*v);
  if (auto v = get("recon", "edge_filter"))
    c.edge_filter = *v == "gradient_magnitude" ? EdgeFilter::gradient_magnitude : EdgeFilter::none;
  if (auto v = get("recon", "edge_min_gradient")) c.edge_min_gradient = parse_real(*v);
  if (auto v = get("recon", "focus_footprint_scale")) c.focus_footprint_scale = parse_real(*v);
  if (auto v = get("recon", "pad")) r.propagation.pad_to_double = parse_bool(*v);
  c.validate();
  return r;
}

EvalSettings RunConfig::eval() const {
  EvalSettings e;
  e.thresholds = linspace_edges(0.0, 0.05, 20);
  e.z_edges = linspace_edges(0.0, 25e-3, 8);
  e.d_edges = linspace_edges(0.0, 10e-6, 10);
  e.density_edges = linspace_edges(0.0, 20.0, 10);
  if (auto v = get("eval", "xy_window")) e.match.xy_window = parse_count(*v);
  if (auto v = get("eval", "z_tol")) e.match.z_tol = parse_length(*v);
  if (auto v = get("eval", "pitch")) e.pitch = parse_length(*v);
  auto reals = [](const std::string& text, auto parse) {
    std::vector<double> out;
    for (auto item : split_list(text)) out.push_back(parse(item));
    return out;
  };
  if (auto v = get("eval", "thresholds")) e.thresholds = reals(*v, parse_real);
  if (auto v = get("eval", "z_edges")) e.z_edges = reals(*v, parse_length);
  if (auto v = get("eval", "d_edges")) e.d_edges = reals(*v, parse_length);
  if (auto v = get("eval", "density_edges")) e.density_edges = reals(*v, parse_real);
  if (auto v = get("eval", "sample_volume")) e.sample_volume_cm3 = parse_real(*v);
  e.match.validate();
  if (!std::is_sorted(e.thresholds.begin(), e.thresholds.end()))
    throw ConfigError("eval.thresholds must be ascending");
  return e;
}

}  // namespace holo
