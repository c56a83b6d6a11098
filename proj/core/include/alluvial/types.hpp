#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "alluvial/errors.hpp"

namespace alluvial {

/// Position of an entity: which timestep column it sits in and which slot
/// inside that column. Slots are data order, not vertical render order.
struct EntityRef {
    int column = 0;
    int slot = 0;

    auto operator<=>(const EntityRef&) const = default;
};

/// A ribbon between an entity and one in the next column to the right.
struct Flow {
    EntityRef source;
    EntityRef target;
    double value = 0.0;

    bool operator==(const Flow&) const = default;
};

/// Column-grouped flow data, the ground truth behind one chart.
///
/// Construction is the validation point: flows may only step one column to
/// the right, values must be positive, every entity must take part in at
/// least one flow on each side it has, and parallel duplicates between the
/// same entity pair are merged by summing their values. Instances are
/// immutable afterwards, so they are safe to share across threads.
class AlluvialDataset {
public:
    AlluvialDataset(std::string id, std::vector<int> columns, std::vector<Flow> flows);

    const std::string& id() const { return id_; }
    /// Entity count per timestep column.
    const std::vector<int>& columns() const { return columns_; }
    /// Flows in canonical order: (source column, source slot, target slot).
    const std::vector<Flow>& flows() const { return flows_; }

    int column_count() const { return static_cast<int>(columns_.size()); }
    int entity_count() const;

    bool contains(EntityRef ref) const;
    double inflow_total(EntityRef ref) const;
    double outflow_total(EntityRef ref) const;
    /// Throughput used for sizing: max of the two side totals. Equal to
    /// either one under flow conservation.
    double entity_value(EntityRef ref) const;
    /// Sum of entity values in one column.
    double column_total(int column) const;

    bool operator==(const AlluvialDataset&) const = default;

private:
    std::size_t entity_index(EntityRef ref) const;

    std::string id_;
    std::vector<int> columns_;
    std::vector<Flow> flows_;
    std::vector<std::size_t> column_offsets_;
    std::vector<double> inflow_;
    std::vector<double> outflow_;
};

/// The four complexity control factors of a chart.
struct FeatureVector {
    int timesteps = 0;
    int entities = 0;
    int flow_arcs = 0;
    int crossings = 0;

    bool operator==(const FeatureVector&) const = default;
};

enum class WeightLabel { Sa, Acc3, Acc4, Svc, Custom };

std::string_view to_string(WeightLabel label);
WeightLabel weight_label_from_string(std::string_view text);

/// Linear weights over the four features. `Sa` is the unweighted sum; the
/// other published sets are the fitted task-accuracy and perceived-complexity
/// models.
struct ModelWeights {
    double timesteps = 1.0;
    double entities = 1.0;
    double flow_arcs = 1.0;
    double crossings = 1.0;
    WeightLabel label = WeightLabel::Custom;

    bool operator==(const ModelWeights&) const = default;
};

/// The published weight set for a label. Throws OutOfRange for Custom.
ModelWeights published_weights(WeightLabel label);

enum class ComplexityClass { Easy, Medium, Hard };

std::string_view to_string(ComplexityClass cls);
ComplexityClass complexity_class_from_string(std::string_view text);

struct ComplexityReport {
    FeatureVector features;
    double raw_score = 0.0;
    double normalized_score = 0.0;
    ComplexityClass cls = ComplexityClass::Easy;
};

/// Per-column vertical order: orderings[column][rank] = slot.
using ColumnOrdering = std::vector<std::vector<int>>;

} // namespace alluvial
