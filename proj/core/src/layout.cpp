#include "alluvial/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace alluvial {

namespace {

void require_valid(const AlluvialDataset& dataset, const ColumnOrdering& orderings) {
    if (static_cast<int>(orderings.size()) != dataset.column_count())
        throw InvalidOrdering("ordering has " + std::to_string(orderings.size()) +
                              " columns, dataset has " + std::to_string(dataset.column_count()));
    for (std::size_t c = 0; c < orderings.size(); ++c) {
        const auto& order = orderings[c];
        const int size = dataset.columns()[c];
        if (static_cast<int>(order.size()) != size)
            throw InvalidOrdering("ordering for column " + std::to_string(c) + " has " +
                                  std::to_string(order.size()) + " slots, column has " +
                                  std::to_string(size));
        std::vector<bool> seen(static_cast<std::size_t>(size), false);
        for (int slot : order) {
            if (slot < 0 || slot >= size || seen[static_cast<std::size_t>(slot)])
                throw InvalidOrdering("ordering for column " + std::to_string(c) +
                                      " is not a permutation");
            seen[static_cast<std::size_t>(slot)] = true;
        }
    }
}

/// rank[column][slot] = vertical position.
std::vector<std::vector<int>> ranks_of(const ColumnOrdering& orderings) {
    std::vector<std::vector<int>> rank(orderings.size());
    for (std::size_t c = 0; c < orderings.size(); ++c) {
        rank[c].resize(orderings[c].size());
        for (std::size_t pos = 0; pos < orderings[c].size(); ++pos)
            rank[c][static_cast<std::size_t>(orderings[c][pos])] = static_cast<int>(pos);
    }
    return rank;
}

long long merge_count(std::vector<int>& values, std::vector<int>& scratch, std::size_t lo,
                      std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    long long inversions = merge_count(values, scratch, lo, mid) + merge_count(values, scratch, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (values[b] < values[a]) {
            inversions += static_cast<long long>(mid - a);
            scratch[out++] = values[b++];
        } else {
            scratch[out++] = values[a++];
        }
    }
    while (a < mid) scratch[out++] = values[a++];
    while (b < hi) scratch[out++] = values[b++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              values.begin() + static_cast<std::ptrdiff_t>(lo));
    return inversions;
}

long long count_crossings_checked(const AlluvialDataset& dataset,
                                  const std::vector<std::vector<int>>& rank) {
    long long total = 0;
    const auto& flows = dataset.flows();
    std::size_t begin = 0;
    while (begin < flows.size()) {
        const int gap = flows[begin].source.column;
        std::size_t end = begin;
        while (end < flows.size() && flows[end].source.column == gap) ++end;

        std::vector<std::pair<int, int>> endpoints;
        endpoints.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i)
            endpoints.emplace_back(
                rank[static_cast<std::size_t>(gap)][static_cast<std::size_t>(flows[i].source.slot)],
                rank[static_cast<std::size_t>(gap) + 1]
                    [static_cast<std::size_t>(flows[i].target.slot)]);
        // Sorting by (source rank, target rank) makes strict inversions in
        // the target sequence exactly the crossing pairs: equal source ranks
        // arrive pre-sorted and equal target ranks are not strict.
        std::sort(endpoints.begin(), endpoints.end());
        std::vector<int> targets(endpoints.size());
        for (std::size_t i = 0; i < endpoints.size(); ++i) targets[i] = endpoints[i].second;
        std::vector<int> scratch(targets.size());
        total += merge_count(targets, scratch, 0, targets.size());
        begin = end;
    }
    return total;
}

struct Barycenter {
    double value = 0.0;
    bool anchored = false;
};

/// Reorder one column by the weighted mean rank of its neighbors on one
/// side. Entities without neighbors on that side keep their current
/// position. Ties break on current position, so the pass is deterministic.
void relax_column(std::vector<std::vector<int>>& order, std::vector<std::vector<int>>& rank,
                  const AlluvialDataset& dataset, int column, bool from_left) {
    const std::size_t c = static_cast<std::size_t>(column);
    const int size = dataset.columns()[c];
    std::vector<Barycenter> bary(static_cast<std::size_t>(size));
    std::vector<double> weight(static_cast<std::size_t>(size), 0.0);
    for (const Flow& flow : dataset.flows()) {
        if (from_left && flow.target.column == column) {
            auto& b = bary[static_cast<std::size_t>(flow.target.slot)];
            b.value += flow.value *
                       rank[c - 1][static_cast<std::size_t>(flow.source.slot)];
            b.anchored = true;
            weight[static_cast<std::size_t>(flow.target.slot)] += flow.value;
        } else if (!from_left && flow.source.column == column) {
            auto& b = bary[static_cast<std::size_t>(flow.source.slot)];
            b.value += flow.value *
                       rank[c + 1][static_cast<std::size_t>(flow.target.slot)];
            b.anchored = true;
            weight[static_cast<std::size_t>(flow.source.slot)] += flow.value;
        }
    }
    std::vector<std::pair<double, int>> keyed(static_cast<std::size_t>(size));
    for (int pos = 0; pos < size; ++pos) {
        const int slot = order[c][static_cast<std::size_t>(pos)];
        const auto& b = bary[static_cast<std::size_t>(slot)];
        const double key =
            b.anchored ? b.value / weight[static_cast<std::size_t>(slot)] : static_cast<double>(pos);
        keyed[static_cast<std::size_t>(pos)] = {key, slot};
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    for (int pos = 0; pos < size; ++pos) {
        order[c][static_cast<std::size_t>(pos)] = keyed[static_cast<std::size_t>(pos)].second;
        rank[c][static_cast<std::size_t>(keyed[static_cast<std::size_t>(pos)].second)] = pos;
    }
}

} // namespace

ColumnOrdering identity_ordering(const AlluvialDataset& dataset) {
    ColumnOrdering orderings(static_cast<std::size_t>(dataset.column_count()));
    for (std::size_t c = 0; c < orderings.size(); ++c) {
        orderings[c].resize(static_cast<std::size_t>(dataset.columns()[c]));
        std::iota(orderings[c].begin(), orderings[c].end(), 0);
    }
    return orderings;
}

long long count_crossings(const AlluvialDataset& dataset, const ColumnOrdering& orderings) {
    require_valid(dataset, orderings);
    return count_crossings_checked(dataset, ranks_of(orderings));
}

ColumnOrdering order_columns(const AlluvialDataset& dataset, const LayoutConfig& config) {
    ColumnOrdering order = identity_ordering(dataset);
    auto rank = ranks_of(order);
    ColumnOrdering best = order;
    long long best_crossings = count_crossings_checked(dataset, rank);

    const int t = dataset.column_count();
    for (int iteration = 0; iteration < config.relaxation_iterations; ++iteration) {
        for (int c = 1; c < t; ++c) relax_column(order, rank, dataset, c, true);
        long long crossings = count_crossings_checked(dataset, rank);
        if (crossings < best_crossings) {
            best_crossings = crossings;
            best = order;
        }
        for (int c = t - 2; c >= 0; --c) relax_column(order, rank, dataset, c, false);
        crossings = count_crossings_checked(dataset, rank);
        if (crossings < best_crossings) {
            best_crossings = crossings;
            best = order;
        }
    }
    return best;
}

double value_scale(const std::vector<int>& column_sizes, double column_total,
                   const LayoutConfig& config) {
    if (!(column_total > 0.0)) throw LayoutOverflow("column total must be positive");
    double scale = std::numeric_limits<double>::infinity();
    for (int size : column_sizes) {
        const double usable = config.canvas_height_px - 2.0 * config.margin_px -
                              (size - 1) * config.node_padding_px;
        if (usable <= 0.0)
            throw LayoutOverflow("canvas height " + std::to_string(config.canvas_height_px) +
                                 "px cannot fit " + std::to_string(size) + " padded entities");
        scale = std::min(scale, usable / column_total);
    }
    return scale;
}

LayoutGeometry assign_geometry(const AlluvialDataset& dataset, const ColumnOrdering& orderings,
                               const LayoutConfig& config) {
    require_valid(dataset, orderings);
    const int t = dataset.column_count();

    double scale = std::numeric_limits<double>::infinity();
    for (int c = 0; c < t; ++c) {
        const double usable = config.canvas_height_px - 2.0 * config.margin_px -
                              (dataset.columns()[c] - 1) * config.node_padding_px;
        if (usable <= 0.0)
            throw LayoutOverflow("canvas height " + std::to_string(config.canvas_height_px) +
                                 "px cannot fit column " + std::to_string(c));
        const double total = dataset.column_total(c);
        if (total > 0.0) scale = std::min(scale, usable / total);
    }
    if (!std::isfinite(scale)) scale = 0.0;

    const double track = config.canvas_width_px - 2.0 * config.margin_px - config.node_width_px;
    if (track < 0.0) throw LayoutOverflow("canvas width cannot fit a column");

    LayoutGeometry geometry;
    geometry.config = config;
    geometry.orderings = orderings;
    geometry.entity_rects.resize(static_cast<std::size_t>(t));

    const auto rank = ranks_of(orderings);
    for (int c = 0; c < t; ++c) {
        const int size = dataset.columns()[c];
        const double x =
            t == 1 ? config.margin_px + track / 2.0 : config.margin_px + track * c / (t - 1.0);
        double content = (size - 1) * config.node_padding_px;
        for (int s = 0; s < size; ++s) content += dataset.entity_value({c, s}) * scale;
        double y = (config.canvas_height_px - content) / 2.0;

        auto& rects = geometry.entity_rects[static_cast<std::size_t>(c)];
        rects.resize(static_cast<std::size_t>(size));
        for (int pos = 0; pos < size; ++pos) {
            const int slot = orderings[static_cast<std::size_t>(c)][static_cast<std::size_t>(pos)];
            const double height = dataset.entity_value({c, slot}) * scale;
            rects[static_cast<std::size_t>(slot)] = {x, y, config.node_width_px, height};
            y += height + config.node_padding_px;
        }
    }

    // Stack ribbons inside each entity in the vertical order of their
    // opposite endpoints, accumulating offsets from the rect top.
    const auto& flows = dataset.flows();
    geometry.flow_ribbons.resize(flows.size());
    std::vector<std::size_t> index(flows.size());
    std::iota(index.begin(), index.end(), 0);

    auto stack = [&](bool outgoing) {
        std::vector<std::size_t> sorted = index;
        std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
            const EntityRef ea = outgoing ? flows[a].source : flows[a].target;
            const EntityRef eb = outgoing ? flows[b].source : flows[b].target;
            if (ea != eb) return ea < eb;
            const EntityRef oa = outgoing ? flows[a].target : flows[a].source;
            const EntityRef ob = outgoing ? flows[b].target : flows[b].source;
            const int ra = rank[static_cast<std::size_t>(oa.column)][static_cast<std::size_t>(oa.slot)];
            const int rb = rank[static_cast<std::size_t>(ob.column)][static_cast<std::size_t>(ob.slot)];
            if (ra != rb) return ra < rb;
            return oa.slot < ob.slot;
        });
        EntityRef current{-1, -1};
        double offset = 0.0;
        for (std::size_t i : sorted) {
            const EntityRef entity = outgoing ? flows[i].source : flows[i].target;
            if (entity != current) {
                current = entity;
                offset = 0.0;
            }
            Ribbon& ribbon = geometry.flow_ribbons[i];
            ribbon.source = flows[i].source;
            ribbon.target = flows[i].target;
            ribbon.thickness = flows[i].value * scale;
            (outgoing ? ribbon.source_offset : ribbon.target_offset) = offset;
            offset += flows[i].value * scale;
        }
    };
    stack(true);
    stack(false);

    return geometry;
}

} // namespace alluvial
