#include "crest/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crest/errors.hpp"

namespace crest {

namespace {

std::string trim(const std::string &s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string &key, const std::string &value) {
  char *end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value +
                      "'");
  }
  return v;
}

long long parse_int(const std::string &key, const std::string &value) {
  char *end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value +
                      "'");
  }
  return v;
}

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value +
                    "'");
}

std::vector<Eigen::Index> parse_width_list(const std::string &key,
                                           const std::string &value) {
  std::vector<Eigen::Index> widths;
  if (trim(value).empty()) {
    return widths;
  }
  std::stringstream ss(value);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const long long w = parse_int(key, trim(field));
    if (w < 1) {
      throw ConfigError("key '" + key + "': widths must be positive");
    }
    widths.push_back(static_cast<Eigen::Index>(w));
  }
  return widths;
}

RidgePolicy parse_ridge(const std::string &key, const std::string &value) {
  if (value == "auto") return RidgePolicy::auto_ridge();
  if (value == "none") return RidgePolicy::none();
  const double eps = parse_double(key, value);
  if (eps < 0.0) {
    throw ConfigError("key '" + key + "': ridge epsilon must be >= 0");
  }
  return RidgePolicy::fixed(eps);
}

}  // namespace

Scenario scenario_from_name(const std::string &name) {
  if (name == "sweep" || name == "sweep-random-layers") {
    return Scenario::SweepRandomLayers;
  }
  if (name == "gd" || name == "gd-decision") return Scenario::GdDecision;
  if (name == "modified-gd") return Scenario::ModifiedGd;
  if (name == "train" || name == "train-linbp") return Scenario::TrainLinBP;
  if (name == "diagnose") return Scenario::Diagnose;
  throw ConfigError("unknown scenario '" + name + "'");
}

const char *scenario_name(Scenario s) {
  switch (s) {
    case Scenario::SweepRandomLayers:
      return "sweep-random-layers";
    case Scenario::GdDecision:
      return "gd-decision";
    case Scenario::ModifiedGd:
      return "modified-gd";
    case Scenario::TrainLinBP:
      return "train-linbp";
    case Scenario::Diagnose:
      return "diagnose";
  }
  return "?";
}

void apply_config_entry(ExperimentConfig &cfg, const std::string &key,
                        const std::string &value) {
  if (key == "scenario") {
    cfg.scenario = scenario_from_name(value);
  } else if (key == "data_csv") {
    cfg.data_csv = value;
  } else if (key == "num_classes") {
    cfg.num_classes = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_classes") {
    cfg.synth_classes = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_dim") {
    cfg.synth_dim = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_per_class") {
    cfg.synth_per_class = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_spread") {
    cfg.synth_spread = parse_double(key, value);
  } else if (key == "test_fraction") {
    cfg.test_fraction = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "layer_widths") {
    cfg.layer_widths = parse_width_list(key, value);
  } else if (key == "sweep_layers") {
    cfg.sweep_layers = static_cast<int>(parse_int(key, value));
  } else if (key == "init_scale") {
    cfg.init_scale = parse_double(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "beta") {
    cfg.beta = parse_double(key, value);
  } else if (key == "sigma") {
    cfg.sigma = parse_double(key, value);
  } else if (key == "iterations") {
    cfg.iterations = parse_int(key, value);
  } else if (key == "refresh_interval") {
    cfg.refresh_interval = parse_int(key, value);
  } else if (key == "ridge_policy") {
    cfg.ridge_policy = parse_ridge(key, value);
  } else if (key == "exact_spectrum") {
    cfg.exact_spectrum = parse_bool(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)),
                       trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace crest
