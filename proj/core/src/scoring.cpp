#include "alluvial/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "alluvial/layout.hpp"

namespace alluvial {

FeatureVector extract_features(const AlluvialDataset& dataset, const ColumnOrdering& orderings) {
    FeatureVector features;
    features.timesteps = dataset.column_count();
    features.entities = dataset.entity_count();
    features.flow_arcs = static_cast<int>(dataset.flows().size());
    features.crossings = static_cast<int>(count_crossings(dataset, orderings));
    return features;
}

double score(const FeatureVector& features, const ModelWeights& weights) {
    return weights.timesteps * features.timesteps + weights.entities * features.entities +
           weights.flow_arcs * features.flow_arcs + weights.crossings * features.crossings;
}

std::vector<double> normalize_scores(const std::vector<double>& scores) {
    if (scores.empty()) throw EmptyInput("no scores to normalize");
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    std::vector<double> normalized(scores.size(), 0.0);
    const double span = *hi - *lo;
    if (span <= 0.0) return normalized;
    for (std::size_t i = 0; i < scores.size(); ++i) normalized[i] = (scores[i] - *lo) / span;
    return normalized;
}

ComplexityClass classify(double normalized_score) {
    if (normalized_score < 0.0 || normalized_score > 1.0)
        throw OutOfRange("normalized score " + std::to_string(normalized_score) +
                         " outside [0, 1]");
    if (normalized_score < kEasyUpper) return ComplexityClass::Easy;
    if (normalized_score < kMediumUpper) return ComplexityClass::Medium;
    return ComplexityClass::Hard;
}

std::vector<ComplexityReport> build_reports(const std::vector<FeatureVector>& features,
                                            const ModelWeights& weights) {
    std::vector<double> raw(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) raw[i] = score(features[i], weights);
    const std::vector<double> normalized = normalize_scores(raw);
    std::vector<ComplexityReport> reports(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        reports[i].features = features[i];
        reports[i].raw_score = raw[i];
        reports[i].normalized_score = normalized[i];
        reports[i].cls = classify(normalized[i]);
    }
    return reports;
}

std::vector<std::pair<double, int>> score_histogram(const std::vector<double>& scores,
                                                    double bin_width) {
    if (scores.empty()) throw EmptyInput("cannot histogram an empty score list");
    if (!(bin_width > 0.0)) throw OutOfRange("histogram bin width must be positive");
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const int bins = std::max(1, static_cast<int>(std::floor((*hi - *lo) / bin_width)) + 1);
    std::vector<std::pair<double, int>> histogram(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) histogram[static_cast<std::size_t>(b)] = {*lo + b * bin_width, 0};
    for (double s : scores) {
        int b = std::min(bins - 1, static_cast<int>(std::floor((s - *lo) / bin_width)));
        ++histogram[static_cast<std::size_t>(b)].second;
    }
    return histogram;
}

} // namespace alluvial
