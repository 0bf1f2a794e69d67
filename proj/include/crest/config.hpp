#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crest/gram.hpp"

namespace crest {

enum class Scenario {
  SweepRandomLayers,
  GdDecision,
  ModifiedGd,
  TrainLinBP,
  Diagnose,
};

/// Flat key = value configuration for one experiment run. Every field has
/// a usable default; parsers reject unknown keys.
struct ExperimentConfig {
  Scenario scenario = Scenario::Diagnose;

  // Dataset source: a CSV path, or (when empty) the synthetic generator.
  std::string data_csv;
  int num_classes = 0;  // CSV class-count override; 0 = max label + 1
  int synth_classes = 10;
  int synth_dim = 100;
  int synth_per_class = 450;
  double synth_spread = 0.5;
  double test_fraction = 1.0 / 3.0;

  std::uint64_t seed = 1;
  std::vector<Eigen::Index> layer_widths;  // empty = no pre-decision layers
  int sweep_layers = 6;      // sweep scenario: evaluate 0..sweep_layers
  double init_scale = 0.0;   // uniform half-width; 0 = 1/sqrt(fan_in)
  double alpha = 0.0;        // 0 = scenario default (gd: log sweep;
                             // modified-gd: 0.5)
  double beta = 1e-3;
  double sigma = 1.0;
  std::int64_t iterations = 100;
  std::int64_t refresh_interval = 1;
  RidgePolicy ridge_policy = RidgePolicy::auto_ridge();
  bool exact_spectrum = true;  // diagnose: also compute eigen-extremes
  std::string out_dir = "out";
};

/// Parse a config file: one `key = value` per line, `#` comments, blank
/// lines ignored. Unknown keys or unparsable values raise ConfigError
/// naming the key.
ExperimentConfig parse_config_file(const std::string &path);

/// Apply a single `key = value` assignment to an existing config.
void apply_config_entry(ExperimentConfig &cfg, const std::string &key,
                        const std::string &value);

Scenario scenario_from_name(const std::string &name);
const char *scenario_name(Scenario s);

}  // namespace crest
