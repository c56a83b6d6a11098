#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alluvial/layout.hpp"
#include "alluvial/types.hpp"

namespace alluvial {

struct GeneratorConfig {
    std::uint64_t seed = 0;
    int min_timesteps = 3;
    int max_timesteps = 6;
    int min_entities_per_column = 2;
    int max_entities_per_column = 5;
    /// Admissible column totals, in flow units.
    std::vector<int> total_flow_options = {30, 50, 80};
    /// Each flow leaving an entity carries this fraction range of the
    /// entity's outgoing total.
    double min_flow_fraction = 0.25;
    double max_flow_fraction = 0.50;
    /// The largest inflow of an entity must exceed the runner-up by this
    /// fraction of the entity's incoming total.
    double dominance_margin = 0.05;
    /// Thinnest ribbon allowed, in pixels, at the reference canvas.
    double min_flow_px = 10.0;
    LayoutConfig layout;
    int max_attempts = 10000;

    /// Throws OutOfRange when a bound is inverted or outside the supported
    /// envelope.
    void validate() const;
};

/// One chart drawn from the constraint family. Deterministic in
/// (config.seed, id). Throws GenerationExhausted with per-constraint
/// rejection counts when max_attempts sampling rounds all fail.
AlluvialDataset generate(const GeneratorConfig& config, const std::string& id = "");

/// count charts with ids chart_000, chart_001, ... Chart i uses seed
/// config.seed + i, so corpus membership is stable under count changes.
/// Throws OutOfRange for count < 1.
std::vector<AlluvialDataset> generate_corpus(const GeneratorConfig& config, int count);

} // namespace alluvial
