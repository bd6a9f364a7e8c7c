#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "holo/dataset.hpp"
#include "holo/eval.hpp"
#include "holo/noise.hpp"
#include "holo/optics.hpp"
#include "holo/reconstruct.hpp"

namespace holo {

enum class ValueKind { length, real, count, boolean, word, length_list, real_list, count_list, path_list };

struct KeyInfo {
  std::string_view section;
  std::string_view key;
  ValueKind kind;
  std::string_view unit;
  std::string_view default_text;
  std::string_view help;
};

/// Every accepted key.
std::span<const KeyInfo> config_keys();
/// One line per key: "section.key  unit  (default)  help".
std::string describe_config_keys();

struct ReconSettings {
  double z_from = 5e-3;
  double z_to = 200e-3;
  CandidateParams candidates;
  PropagationOptions propagation;
};

struct EvalSettings {
  MatchSpec match;
  /// Pixel pitch of the evaluation grid; unset means the optics pitch.
  std::optional<double> pitch;
  std::vector<double> thresholds;
  std::vector<double> z_edges;
  std::vector<double> d_edges;
  std::vector<double> density_edges;  // particles per cm^3
  double sample_volume_cm3 = 0.0;
};

/// Flat INI configuration: "[section]" headers, "key = value" lines, '#' or
/// ';' comments. Unknown sections or keys and malformed values are rejected
/// with ConfigError when set.
class RunConfig {
 public:
  static RunConfig parse(std::string_view text);
  static RunConfig from_file(const std::filesystem::path& path);

  void set(std::string_view section, std::string_view key, std::string_view value);
  std::optional<std::string> get(std::string_view section, std::string_view key) const;
  bool has(std::string_view section, std::string_view key) const;

  /// Optics keys applied over base.
  OpticalConfig optics(OpticalConfig base = {}) const;
  NoiseSpec noise(std::uint64_t seed) const;
  WeightedTargetSpec weighted() const;
  /// Kind defaults, then every set dataset/optics/noise/weighted key.
  DatasetSpec dataset(std::uint64_t seed) const;
  ReconSettings recon() const;
  EvalSettings eval() const;

 private:
  std::map<std::pair<std::string, std::string>, std::string> values_;
};

}  // namespace holo
