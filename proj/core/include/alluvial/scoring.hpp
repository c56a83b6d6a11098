#pragma once

#include <vector>

#include "alluvial/types.hpp"

namespace alluvial {

/// Class thresholds on the normalized score scale: below kEasyUpper is easy,
/// [kEasyUpper, kMediumUpper) is medium, the rest is hard.
inline constexpr double kEasyUpper = 0.33;
inline constexpr double kMediumUpper = 0.67;

/// Count timesteps, entities, flow arcs and flow crossings of a dataset laid
/// out with the given per-column orderings. Crossings depend on the ordering;
/// the other three do not.
FeatureVector extract_features(const AlluvialDataset& dataset, const ColumnOrdering& orderings);

/// Weighted feature sum.
double score(const FeatureVector& features, const ModelWeights& weights);

/// Min-max normalization to [0, 1]. A constant list maps to all zeros;
/// an empty list throws EmptyInput.
std::vector<double> normalize_scores(const std::vector<double>& scores);

/// Bin a normalized score into easy / medium / hard. Throws OutOfRange
/// outside [0, 1].
ComplexityClass classify(double normalized_score);

/// Score, normalize and classify a batch of feature vectors in one pass.
std::vector<ComplexityReport> build_reports(const std::vector<FeatureVector>& features,
                                            const ModelWeights& weights);

/// Histogram with fixed-width bins starting at the minimum score. Returns
/// (bin lower edge, count) pairs. Throws EmptyInput on an empty score list
/// and OutOfRange on a non-positive width.
std::vector<std::pair<double, int>> score_histogram(const std::vector<double>& scores,
                                                    double bin_width);

} // namespace alluvial
