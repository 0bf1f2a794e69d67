// crest — closed-form decision weights, Gram-spectrum learnability
// diagnostics, and linearized-backpropagation training experiments.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "crest/errors.hpp"
#include "crest/experiment.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalAbort = 3;

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Neural-classifier decision-layer experiments"};
  app.require_subcommand(1);

  struct SubSpec {
    const char *name;
    const char *help;
  };
  const SubSpec specs[] = {
      {"sweep", "Computed decision weights behind 0..L frozen random layers"},
      {"gd", "Plain gradient descent on the decision layer"},
      {"modified-gd", "Preconditioned gradient descent on the decision layer"},
      {"train", "Linearized-backpropagation training of pre-decision layers"},
      {"diagnose", "Gram-matrix traces, spectrum, and learnability verdict"},
  };

  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  for (const SubSpec &spec : specs) {
    CLI::App *sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", config_path, "Config file (key = value lines)");
    sub->add_option("--seed", seed, "Override the run seed");
    sub->add_option("--out", out_dir, "Override the output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    crest::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = crest::parse_config_file(config_path);
    }
    cfg.scenario = crest::scenario_from_name(app.get_subcommands().front()->get_name());
    if (seed >= 0) {
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (!out_dir.empty()) {
      cfg.out_dir = out_dir;
    }

    const crest::RunResult result = crest::run(cfg);
    std::cout << result.summary;
    for (const std::string &artifact : result.artifacts) {
      std::cout << "artifact: " << artifact << "\n";
    }
    return result.exit_code;
  } catch (const crest::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const crest::DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const crest::IoError &e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const crest::SingularGramError &e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumericalAbort;
  } catch (const crest::DegenerateObjectiveError &e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumericalAbort;
  } catch (const crest::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalAbort;
  }
}
