#pragma once

#include <string>
#include <vector>

#include "crest/config.hpp"

namespace crest {

/// Outcome of one experiment run. exit_code is 0 on success and 3 when a
/// scenario aborted numerically (divergence, singular Gram); invalid
/// configs/datasets throw before a result exists.
struct RunResult {
  int exit_code = 0;
  std::string summary;                 // also written to <out>/summary.txt
  std::vector<std::string> artifacts;  // paths of files written
};

/// Execute the configured scenario deterministically from its seed,
/// writing all artifacts under cfg.out_dir.
RunResult run(const ExperimentConfig &cfg);

}  // namespace crest
