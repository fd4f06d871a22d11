#pragma once

// Experiment configuration for `jive generate` and `jive simulate`.
// One flat JSON object; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hjive/model.hpp"
#include "hjive/weighting.hpp"

namespace hjive {

enum class Method { HeteroJive, Ajive, StackSvd };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);

enum class WeightSourceKind { Oracle, DataDriven, Equal, Fixed };

struct WeightSource {
  WeightSourceKind kind = WeightSourceKind::DataDriven;
  std::vector<double> fixed;  // only for Fixed
};

struct NoiseSpec {
  double lo = 0.1;
  double hi = 0.1;
  bool fixed() const noexcept { return lo == hi; }
};

struct ExperimentConfig {
  Index n = 20;
  Index d = 20;
  Index r = 2;
  Index r_k = 2;
  std::vector<Index> K_grid;
  LoadingScheme scheme = LoadingScheme::Random;
  SubspaceConstruction construction = SubspaceConstruction::Mixed;
  double s = 1.0;
  double gamma = 1.0;
  double theta = 0.5;
  NoiseSpec noise;
  Index replicates = 100;
  std::uint64_t seed = 0;
  std::vector<Method> methods{Method::HeteroJive, Method::Ajive, Method::StackSvd};
  WeightSource weight_source;
  IterationOptions iteration;
  bool refresh_each_iter = false;

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (sorted keys, every field present).
std::string canonical_config(const ExperimentConfig& config);

/// FNV-1a of the canonical form, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Applies JIVE_SEED when it is set. Malformed values are InvalidInput.
void apply_seed_override(ExperimentConfig& config);

/// Synthesis parameters for K views. Noise levels are drawn from `rng` when
/// the noise spec is a range.
SynthesisSpec synthesis_spec(const ExperimentConfig& config, Index K, Rng& rng);

}  // namespace hjive
