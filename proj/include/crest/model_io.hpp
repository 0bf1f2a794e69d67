#pragma once

#include <string>
#include <utility>

#include "crest/decision.hpp"
#include "crest/network.hpp"

namespace crest {

/// Save a pre-decision stack plus decision weights as a textual model
/// file. The format is `CREST-MODEL v1`, the layer count, then each layer
/// matrix and finally the decision weights, every matrix as a `rows cols`
/// line followed by row-major 17-significant-digit values. Round trips are
/// bit-exact for 64-bit values.
void save_model(const LayerStack &stack, const DecisionWeights &w,
                const std::string &path);

std::pair<LayerStack, DecisionWeights> load_model(const std::string &path);

}  // namespace crest
