#include "alluvial/types.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace alluvial {

namespace {

std::string ref_text(EntityRef ref) {
    return "(" + std::to_string(ref.column) + "," + std::to_string(ref.slot) + ")";
}

} // namespace

AlluvialDataset::AlluvialDataset(std::string id, std::vector<int> columns, std::vector<Flow> flows)
    : id_(std::move(id)), columns_(std::move(columns)), flows_(std::move(flows)) {
    if (columns_.size() < 2) throw InvalidDataset("dataset needs at least two columns");
    for (std::size_t c = 0; c < columns_.size(); ++c)
        if (columns_[c] < 1)
            throw InvalidDataset("column " + std::to_string(c) + " has size " +
                                 std::to_string(columns_[c]));

    column_offsets_.resize(columns_.size() + 1, 0);
    for (std::size_t c = 0; c < columns_.size(); ++c)
        column_offsets_[c + 1] = column_offsets_[c] + static_cast<std::size_t>(columns_[c]);

    for (const Flow& flow : flows_) {
        if (!contains(flow.source)) throw InvalidDataset("no entity " + ref_text(flow.source));
        if (!contains(flow.target)) throw InvalidDataset("no entity " + ref_text(flow.target));
        if (flow.target.column != flow.source.column + 1)
            throw InvalidDataset("flow " + ref_text(flow.source) + " -> " + ref_text(flow.target) +
                                 " must step one column right");
        if (!(flow.value > 0.0))
            throw InvalidDataset("flow " + ref_text(flow.source) + " -> " + ref_text(flow.target) +
                                 " has non-positive value");
    }

    std::sort(flows_.begin(), flows_.end(), [](const Flow& a, const Flow& b) {
        if (a.source != b.source) return a.source < b.source;
        return a.target < b.target;
    });
    std::vector<Flow> merged;
    merged.reserve(flows_.size());
    for (const Flow& flow : flows_) {
        if (!merged.empty() && merged.back().source == flow.source &&
            merged.back().target == flow.target) {
            merged.back().value += flow.value;
        } else {
            merged.push_back(flow);
        }
    }
    flows_ = std::move(merged);

    inflow_.assign(column_offsets_.back(), 0.0);
    outflow_.assign(column_offsets_.back(), 0.0);
    for (const Flow& flow : flows_) {
        outflow_[entity_index(flow.source)] += flow.value;
        inflow_[entity_index(flow.target)] += flow.value;
    }

    for (std::size_t c = 0; c < columns_.size(); ++c) {
        for (int s = 0; s < columns_[c]; ++s) {
            EntityRef ref{static_cast<int>(c), s};
            if (c + 1 < columns_.size() && outflow_[entity_index(ref)] == 0.0)
                throw InvalidDataset("entity " + ref_text(ref) + " has no outgoing flow");
            if (c > 0 && inflow_[entity_index(ref)] == 0.0)
                throw InvalidDataset("entity " + ref_text(ref) + " has no incoming flow");
        }
    }
}

int AlluvialDataset::entity_count() const {
    return static_cast<int>(column_offsets_.back());
}

bool AlluvialDataset::contains(EntityRef ref) const {
    return ref.column >= 0 && ref.column < column_count() && ref.slot >= 0 &&
           ref.slot < columns_[static_cast<std::size_t>(ref.column)];
}

double AlluvialDataset::inflow_total(EntityRef ref) const {
    if (!contains(ref)) throw OutOfRange("no entity " + ref_text(ref));
    return inflow_[entity_index(ref)];
}

double AlluvialDataset::outflow_total(EntityRef ref) const {
    if (!contains(ref)) throw OutOfRange("no entity " + ref_text(ref));
    return outflow_[entity_index(ref)];
}

double AlluvialDataset::entity_value(EntityRef ref) const {
    return std::max(inflow_total(ref), outflow_total(ref));
}

double AlluvialDataset::column_total(int column) const {
    if (column < 0 || column >= column_count())
        throw OutOfRange("no column " + std::to_string(column));
    double total = 0.0;
    for (int s = 0; s < columns_[static_cast<std::size_t>(column)]; ++s)
        total += entity_value({column, s});
    return total;
}

std::size_t AlluvialDataset::entity_index(EntityRef ref) const {
    return column_offsets_[static_cast<std::size_t>(ref.column)] +
           static_cast<std::size_t>(ref.slot);
}

std::string_view to_string(WeightLabel label) {
    switch (label) {
    case WeightLabel::Sa: return "S_a";
    case WeightLabel::Acc3: return "Acc3";
    case WeightLabel::Acc4: return "Acc4";
    case WeightLabel::Svc: return "S_vc";
    case WeightLabel::Custom: return "custom";
    }
    throw OutOfRange("unknown weight label");
}

WeightLabel weight_label_from_string(std::string_view text) {
    if (text == "S_a" || text == "Sa") return WeightLabel::Sa;
    if (text == "Acc3") return WeightLabel::Acc3;
    if (text == "Acc4") return WeightLabel::Acc4;
    if (text == "S_vc" || text == "Svc") return WeightLabel::Svc;
    if (text == "custom") return WeightLabel::Custom;
    throw OutOfRange("unknown weight label '" + std::string(text) + "'");
}

ModelWeights published_weights(WeightLabel label) {
    switch (label) {
    case WeightLabel::Sa: return {1.0, 1.0, 1.0, 1.0, WeightLabel::Sa};
    case WeightLabel::Acc3: return {0.222, 0.282, 0.267, 0.228, WeightLabel::Acc3};
    case WeightLabel::Acc4: return {0.2566, 0.234, 0.206, 0.302, WeightLabel::Acc4};
    case WeightLabel::Svc: return {0.240, 0.247, 0.314, 0.197, WeightLabel::Svc};
    case WeightLabel::Custom: break;
    }
    throw OutOfRange("no published weights for 'custom'");
}

std::string_view to_string(ComplexityClass cls) {
    switch (cls) {
    case ComplexityClass::Easy: return "easy";
    case ComplexityClass::Medium: return "medium";
    case ComplexityClass::Hard: return "hard";
    }
    throw OutOfRange("unknown complexity class");
}

ComplexityClass complexity_class_from_string(std::string_view text) {
    if (text == "easy") return ComplexityClass::Easy;
    if (text == "medium") return ComplexityClass::Medium;
    if (text == "hard") return ComplexityClass::Hard;
    throw OutOfRange("unknown complexity class '" + std::string(text) + "'");
}

} // namespace alluvial
