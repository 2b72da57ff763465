#pragma once

#include <string>
#include <vector>

#include "liquidrank/simulator.hpp"

namespace liquidrank {

/// Ready-made experiment configurations:
///  - experiment1: consumer marketplace, no consumer/supplier overlap,
///    roulette usage of the reputation system, scam cohort at volume ratio 50.
///  - experiment2-wta / experiment2-roulette: B2B-style market with 90%
///    overlap comparing winner-take-all against roulette-wheel usage.
/// Unknown names raise ConfigError.
MarketConfig preset_market(const std::string& name);

std::vector<std::string> preset_names();

} // namespace liquidrank
