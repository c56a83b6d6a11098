#include "alluvial/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "alluvial/rng.hpp"

namespace alluvial {

namespace {

constexpr int kGapTries = 300;
constexpr int kRepairRounds = 64;

struct Limits {
    int k_min;       // fewest flows out of one entity, forced by max fraction
    int k_max;       // most flows, forced by min fraction
    int min_units;   // smallest flow value that still renders thick enough
    double min_frac;
    double max_frac;
    double margin;   // inflow dominance, as a fraction of the inflow total
};

int part_lo(int total, const Limits& lim) {
    return std::max(lim.min_units,
                    static_cast<int>(std::ceil(total * lim.min_frac - 1e-9)));
}

int part_hi(int total, const Limits& lim) {
    return static_cast<int>(std::floor(total * lim.max_frac + 1e-9));
}

/// Can `total` be split into k parts, k_min <= k <= min(k_max, fan ceiling),
/// every part within the fraction band? Parts range over an integer
/// interval, so existence is a pair of bounds checks.
bool splittable(int total, int max_fan, const Limits& lim) {
    const int lo = part_lo(total, lim);
    const int hi = part_hi(total, lim);
    if (lo > hi) return false;
    for (int k = lim.k_min; k <= std::min(lim.k_max, max_fan); ++k)
        if (k * lo <= total && total <= k * hi) return true;
    return false;
}

std::vector<int> valid_fanouts(int total, int max_fan, const Limits& lim) {
    std::vector<int> ks;
    const int lo = part_lo(total, lim);
    const int hi = part_hi(total, lim);
    if (lo > hi) return ks;
    for (int k = lim.k_min; k <= std::min(lim.k_max, max_fan); ++k)
        if (k * lo <= total && total <= k * hi) ks.push_back(k);
    return ks;
}

/// Uniform ordered composition of `total` into k parts in [lo, hi], via the
/// counting table ways[j][s] = compositions of s into j such parts.
std::vector<int> sample_composition(SplitMix64& rng, int total, int k, int lo, int hi) {
    std::vector<std::vector<unsigned long long>> ways(
        static_cast<std::size_t>(k) + 1,
        std::vector<unsigned long long>(static_cast<std::size_t>(total) + 1, 0));
    ways[0][0] = 1;
    for (int j = 1; j <= k; ++j)
        for (int s = 0; s <= total; ++s)
            for (int v = lo; v <= std::min(hi, s); ++v)
                ways[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] +=
                    ways[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(s - v)];

    std::vector<int> parts;
    int remaining = total;
    for (int j = k; j >= 1; --j) {
        unsigned long long r =
            rng.next_below(ways[static_cast<std::size_t>(j)][static_cast<std::size_t>(remaining)]);
        for (int v = lo; v <= std::min(hi, remaining); ++v) {
            const unsigned long long below =
                ways[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(remaining - v)];
            if (r < below) {
                parts.push_back(v);
                remaining -= v;
                break;
            }
            r -= below;
        }
    }
    return parts;
}

/// `total` into n parts, each at least min_each, by exponential sticks with
/// largest-remainder rounding.
std::vector<int> stick_partition(SplitMix64& rng, int total, int n, int min_each) {
    std::vector<int> parts(static_cast<std::size_t>(n), min_each);
    int rest = total - n * min_each;
    if (rest < 0) return {};
    std::vector<double> sticks(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (double& s : sticks) {
        s = rng.next_exp() + 1e-12;
        sum += s;
    }
    std::vector<std::pair<double, int>> remainders(static_cast<std::size_t>(n));
    int assigned = 0;
    for (int i = 0; i < n; ++i) {
        const double share = rest * sticks[static_cast<std::size_t>(i)] / sum;
        const int whole = static_cast<int>(std::floor(share));
        parts[static_cast<std::size_t>(i)] += whole;
        assigned += whole;
        remainders[static_cast<std::size_t>(i)] = {share - whole, i};
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int i = 0; i < rest - assigned; ++i)
        ++parts[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)];
    return parts;
}

/// Nudge column-0 totals until each can be split for the next column.
/// Moves single units between entities; gives up after a bounded number of
/// rounds.
bool repair_totals(std::vector<int>& totals, int floor_each, int next_size, const Limits& lim) {
    auto ok = [&](int v) { return v >= floor_each && splittable(v, next_size, lim); };
    for (int round = 0; round < kRepairRounds; ++round) {
        int bad = -1;
        for (std::size_t i = 0; i < totals.size(); ++i)
            if (!ok(totals[i])) {
                bad = static_cast<int>(i);
                break;
            }
        if (bad < 0) return true;
        int donor = -1;
        for (std::size_t j = 0; j < totals.size(); ++j) {
            if (static_cast<int>(j) == bad) continue;
            if (ok(totals[j] - 1) && (donor < 0 || totals[j] > totals[static_cast<std::size_t>(donor)]))
                donor = static_cast<int>(j);
        }
        if (donor >= 0 && ok(totals[static_cast<std::size_t>(bad)] + 1)) {
            --totals[static_cast<std::size_t>(donor)];
            ++totals[static_cast<std::size_t>(bad)];
            continue;
        }
        int sink = -1;
        for (std::size_t j = 0; j < totals.size(); ++j) {
            if (static_cast<int>(j) == bad) continue;
            if (ok(totals[j] + 1) && (sink < 0 || totals[j] < totals[static_cast<std::size_t>(sink)]))
                sink = static_cast<int>(j);
        }
        if (sink >= 0 && totals[static_cast<std::size_t>(bad)] > floor_each &&
            ok(totals[static_cast<std::size_t>(bad)] - 1)) {
            ++totals[static_cast<std::size_t>(sink)];
            --totals[static_cast<std::size_t>(bad)];
            continue;
        }
        return false;
    }
    return false;
}

struct GapResult {
    std::vector<std::vector<std::pair<int, int>>> outgoing; // per source: (target, value)
    std::vector<int> target_totals;
};

/// Wire one adjacent-column gap: split every source total into parts and
/// spread the parts over distinct targets so that every target is covered,
/// the inflow-dominance margin holds, and (for interior columns) every
/// emergent target total can itself be split one gap later.
bool wire_gap(SplitMix64& rng, const std::vector<int>& source_totals, int target_count,
              int next_size, bool targets_interior, int total_flow, const Limits& lim,
              std::map<std::string, int>& failures, GapResult& result) {
    const int sources = static_cast<int>(source_totals.size());

    std::vector<int> fan(static_cast<std::size_t>(sources));
    int fan_sum = 0;
    for (int i = 0; i < sources; ++i) {
        const auto ks = valid_fanouts(source_totals[static_cast<std::size_t>(i)], target_count, lim);
        if (ks.empty()) {
            ++failures["fanout"];
            return false;
        }
        fan[static_cast<std::size_t>(i)] = ks[rng.next_below(ks.size())];
        fan_sum += fan[static_cast<std::size_t>(i)];
    }
    while (fan_sum < target_count) {
        bool grew = false;
        for (int i = 0; i < sources && fan_sum < target_count; ++i) {
            const auto ks = valid_fanouts(source_totals[static_cast<std::size_t>(i)], target_count, lim);
            if (std::find(ks.begin(), ks.end(), fan[static_cast<std::size_t>(i)] + 1) != ks.end()) {
                ++fan[static_cast<std::size_t>(i)];
                ++fan_sum;
                grew = true;
            }
        }
        if (!grew) {
            ++failures["coverage"];
            return false;
        }
    }

    std::vector<int> source_order(static_cast<std::size_t>(sources));
    std::iota(source_order.begin(), source_order.end(), 0);

    for (int attempt = 0; attempt < kGapTries; ++attempt) {
        std::vector<int> caps = stick_partition(rng, total_flow, target_count,
                                                std::max(1, lim.min_units));
        if (caps.empty()) caps.assign(static_cast<std::size_t>(target_count), 1);
        rng.shuffle(source_order);

        GapResult trial;
        trial.outgoing.assign(static_cast<std::size_t>(sources), {});
        trial.target_totals.assign(static_cast<std::size_t>(target_count), 0);
        std::vector<bool> covered(static_cast<std::size_t>(target_count), false);

        for (int i : source_order) {
            const int total = source_totals[static_cast<std::size_t>(i)];
            auto parts = sample_composition(rng, total, fan[static_cast<std::size_t>(i)],
                                            part_lo(total, lim), part_hi(total, lim));
            std::sort(parts.begin(), parts.end(), std::greater<>());
            std::vector<bool> used(static_cast<std::size_t>(target_count), false);
            for (int value : parts) {
                int pick = -1;
                bool pick_uncovered = false;
                for (int tgt = 0; tgt < target_count; ++tgt) {
                    if (used[static_cast<std::size_t>(tgt)]) continue;
                    const bool fresh = !covered[static_cast<std::size_t>(tgt)];
                    const int room = caps[static_cast<std::size_t>(tgt)] -
                                     trial.target_totals[static_cast<std::size_t>(tgt)];
                    if (pick < 0 || (fresh && !pick_uncovered) ||
                        (fresh == pick_uncovered &&
                         room > caps[static_cast<std::size_t>(pick)] -
                                    trial.target_totals[static_cast<std::size_t>(pick)])) {
                        pick = tgt;
                        pick_uncovered = fresh;
                    }
                }
                used[static_cast<std::size_t>(pick)] = true;
                covered[static_cast<std::size_t>(pick)] = true;
                trial.outgoing[static_cast<std::size_t>(i)].emplace_back(pick, value);
                trial.target_totals[static_cast<std::size_t>(pick)] += value;
            }
        }

        if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
            ++failures["coverage"];
            continue;
        }

        bool ok = true;
        std::vector<int> inflows;
        for (int tgt = 0; tgt < target_count && ok; ++tgt) {
            inflows.clear();
            for (int i = 0; i < sources; ++i)
                for (const auto& [to, value] : trial.outgoing[static_cast<std::size_t>(i)])
                    if (to == tgt) inflows.push_back(value);
            if (inflows.size() >= 2) {
                std::sort(inflows.begin(), inflows.end(), std::greater<>());
                const int margin_total = trial.target_totals[static_cast<std::size_t>(tgt)];
                if (inflows[0] - inflows[1] + 1e-9 < lim.margin * margin_total) {
                    ++failures["inflow_margin"];
                    ok = false;
                }
            }
            if (ok && targets_interior &&
                !splittable(trial.target_totals[static_cast<std::size_t>(tgt)], next_size, lim)) {
                ++failures["interior_total"];
                ok = false;
            }
        }
        if (!ok) continue;

        result = std::move(trial);
        return true;
    }
    ++failures["gap_exhausted"];
    return false;
}

int pick_total(const GeneratorConfig& config, int entity_count) {
    std::vector<int> options = config.total_flow_options;
    std::sort(options.begin(), options.end());
    const int bands = static_cast<int>(options.size());
    const int e_min = config.min_timesteps * config.min_entities_per_column;
    const int e_max = config.max_timesteps * config.max_entities_per_column;
    if (e_max <= e_min) return options.front();
    int band = (entity_count - e_min) * bands / (e_max - e_min + 1);
    band = std::clamp(band, 0, bands - 1);
    return options[static_cast<std::size_t>(band)];
}

} // namespace

void GeneratorConfig::validate() const {
    auto bad = [](const std::string& msg) { throw OutOfRange("generator config: " + msg); };
    if (min_timesteps < 2 || max_timesteps < min_timesteps)
        bad("timestep range [" + std::to_string(min_timesteps) + "," +
            std::to_string(max_timesteps) + "] is empty or below 2");
    if (min_entities_per_column < 1 || max_entities_per_column < min_entities_per_column)
        bad("entities-per-column range is empty");
    if (total_flow_options.empty()) bad("no total flow options");
    for (int total : total_flow_options)
        if (total < 1) bad("total flow option " + std::to_string(total) + " is not positive");
    if (!(min_flow_fraction > 0.0) || min_flow_fraction > max_flow_fraction ||
        max_flow_fraction > 1.0)
        bad("flow fraction range is empty or outside (0, 1]");
    if (!(dominance_margin > 0.0)) bad("dominance margin must be positive");
    if (!(min_flow_px > 0.0)) bad("minimum flow thickness must be positive");
    if (max_attempts < 1) bad("max attempts must be at least 1");
}

AlluvialDataset generate(const GeneratorConfig& config, const std::string& id) {
    config.validate();
    std::map<std::string, int> failures;

    for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
        // Three substreams per attempt: chart structure, column totals,
        // inter-column wiring.
        SplitMix64 structure_rng = SplitMix64::stream(config.seed, static_cast<std::uint64_t>(attempt), 0);
        SplitMix64 totals_rng = SplitMix64::stream(config.seed, static_cast<std::uint64_t>(attempt), 1);
        SplitMix64 wiring_rng = SplitMix64::stream(config.seed, static_cast<std::uint64_t>(attempt), 2);

        const int t = structure_rng.next_int(config.min_timesteps, config.max_timesteps);
        std::vector<int> sizes(static_cast<std::size_t>(t));
        for (int& size : sizes)
            size = structure_rng.next_int(config.min_entities_per_column,
                                          config.max_entities_per_column);
        const int total_flow = pick_total(config, std::accumulate(sizes.begin(), sizes.end(), 0));

        Limits lim;
        lim.min_frac = config.min_flow_fraction;
        lim.max_frac = config.max_flow_fraction;
        lim.margin = config.dominance_margin;
        lim.k_min = std::max(1, static_cast<int>(std::ceil(1.0 / config.max_flow_fraction - 1e-9)));
        lim.k_max = static_cast<int>(std::floor(1.0 / config.min_flow_fraction + 1e-9));
        const double scale = value_scale(sizes, total_flow, config.layout);
        lim.min_units = std::max(1, static_cast<int>(std::ceil(config.min_flow_px / scale - 1e-9)));

        const int floor_each = std::max(2 * lim.min_units, lim.k_min * lim.min_units);
        std::vector<int> totals =
            stick_partition(totals_rng, total_flow, sizes[0], std::max(2, floor_each));
        if (totals.empty() || !repair_totals(totals, std::max(2, floor_each), sizes[1], lim)) {
            ++failures["column_totals"];
            continue;
        }

        std::vector<Flow> flows;
        bool chart_ok = true;
        std::vector<int> current = totals;
        for (int c = 0; c + 1 < t && chart_ok; ++c) {
            const bool interior = c + 2 < t;
            const int next_size = interior ? sizes[static_cast<std::size_t>(c + 2)] : 0;
            GapResult gap;
            if (!wire_gap(wiring_rng, current, sizes[static_cast<std::size_t>(c + 1)], next_size,
                          interior, total_flow, lim, failures, gap)) {
                chart_ok = false;
                break;
            }
            for (std::size_t i = 0; i < gap.outgoing.size(); ++i)
                for (const auto& [target, value] : gap.outgoing[i])
                    flows.push_back({{c, static_cast<int>(i)},
                                     {c + 1, target},
                                     static_cast<double>(value)});
            current = gap.target_totals;
        }
        if (!chart_ok) continue;

        return AlluvialDataset(id.empty() ? "chart" : id, std::move(sizes), std::move(flows));
    }

    std::string dominant = "none";
    int dominant_count = 0;
    for (const auto& [name, count] : failures) {
        if (count > dominant_count) {
            dominant = name;
            dominant_count = count;
        }
    }
    throw GenerationExhausted("generation exhausted after " + std::to_string(config.max_attempts) +
                                  " attempts (seed " + std::to_string(config.seed) +
                                  "); most frequent failure: " + dominant + " (" +
                                  std::to_string(dominant_count) + ")",
                              failures);
}

std::vector<AlluvialDataset> generate_corpus(const GeneratorConfig& config, int count) {
    if (count < 1) throw OutOfRange("corpus size must be at least 1");
    std::vector<AlluvialDataset> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        GeneratorConfig chart_config = config;
        chart_config.seed = config.seed + static_cast<std::uint64_t>(i);
        char name[32];
        std::snprintf(name, sizeof(name), "chart_%03d", i);
        try {
            corpus.push_back(generate(chart_config, name));
        } catch (const GenerationExhausted& e) {
            throw GenerationExhausted("chart " + std::string(name) + ": " + e.what(),
                                      e.failure_counts);
        }
    }
    return corpus;
}

} // namespace alluvial
