#pragma once

#include <vector>

#include "alluvial/types.hpp"

namespace alluvial {

struct LayoutConfig {
    double canvas_width_px = 1920.0;
    double canvas_height_px = 1080.0;
    double node_width_px = 20.0;
    double node_padding_px = 12.0;
    int relaxation_iterations = 6;
    double margin_px = 30.0;
};

struct EntityRect {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// Ribbon anchors for one flow. Offsets are measured from the top edge of the
/// respective entity rect; the thickness is the same at both ends.
struct Ribbon {
    EntityRef source;
    EntityRef target;
    double source_offset = 0.0;
    double target_offset = 0.0;
    double thickness = 0.0;
};

struct LayoutGeometry {
    LayoutConfig config;
    /// entity_rects[column][slot]
    std::vector<std::vector<EntityRect>> entity_rects;
    /// Parallel to the dataset's flow list.
    std::vector<Ribbon> flow_ribbons;
    ColumnOrdering orderings;
};

/// Slots in data order for every column.
ColumnOrdering identity_ordering(const AlluvialDataset& dataset);

/// Vertical ordering by iterative barycenter relaxation, sweeping
/// alternately left-to-right and right-to-left. Keeps the best ordering seen
/// (counted by crossings), so the result is never worse than data order.
/// Deterministic: barycenter ties break on the original slot index.
ColumnOrdering order_columns(const AlluvialDataset& dataset, const LayoutConfig& config = {});

/// Ordinal crossing count: pairs of flows in the same column gap whose
/// endpoint vertical orders invert. Pairs sharing an endpoint entity never
/// count; ribbon stacking resolves them. O(f log f) per gap.
long long count_crossings(const AlluvialDataset& dataset, const ColumnOrdering& orderings);

/// Pixel geometry. One value scale is shared by all columns (the tightest
/// column sets it), so ribbon thickness is consistent across the chart.
/// Columns are centered vertically; rects stack in ordering order separated
/// by the node padding.
LayoutGeometry assign_geometry(const AlluvialDataset& dataset, const ColumnOrdering& orderings,
                               const LayoutConfig& config = {});

/// Pixels one unit of flow maps to under this config, for a chart whose
/// columns have the given sizes and a shared column total. This is the scale
/// assign_geometry uses; the generator consults it for the minimum-thickness
/// bound.
double value_scale(const std::vector<int>& column_sizes, double column_total,
                   const LayoutConfig& config = {});

} // namespace alluvial
