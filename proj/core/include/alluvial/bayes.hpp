#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "alluvial/types.hpp"

namespace alluvial {

struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
};

/// Gaussian naive Bayes over the four features, class order Easy, Medium,
/// Hard.
struct BayesModel {
    std::array<double, 3> class_priors{};
    /// likelihoods[class][feature], features ordered t, e, f, c.
    std::array<std::array<Gaussian, 4>, 3> likelihoods{};
    ModelWeights weights;
    double variance_floor = 1e-6;
};

struct Prediction {
    ComplexityClass complexity_class = ComplexityClass::Easy;
    std::array<double, 3> posterior{};
};

struct LabeledChart {
    std::string id;
    FeatureVector features;
    ComplexityClass label = ComplexityClass::Easy;
};

struct ChartFeatures {
    std::string id;
    FeatureVector features;
};

struct EvalReport {
    double accuracy_mean = 0.0;
    double accuracy_sd = 0.0;
    double rmse_mean = 0.0;
    double rmse_sd = 0.0;
    /// Chart ids sorted by ascending unit-weight score, the mosaic row
    /// order.
    std::vector<std::string> chart_order;
    /// Per chart, fraction of test-fold appearances classified Easy,
    /// Medium, Hard. Rows sum to 1.
    std::map<std::string, std::array<double, 3>> mosaic;
    int k = 0;
    int repeats = 0;
    std::vector<std::string> warnings;
};

/// Class priors blend the training class frequencies with one corpus-worth
/// of pseudo-counts distributed by the weight-derived score mass per bin.
/// A class absent from training keeps its prior mass and falls back to the
/// pooled feature Gaussians. Throws InsufficientData on an empty set.
BayesModel train(const std::vector<LabeledChart>& training, const ModelWeights& weights);

/// Log-space posterior; ties break Easy < Medium < Hard.
Prediction predict(const BayesModel& model, const FeatureVector& features);

/// Repeated stratified k-fold evaluation. Labels come from min-max
/// normalizing and binning the weighted feature scores; pass label_scores
/// (parallel to corpus, higher = more complex) to bin an alternative
/// complexity measure instead. Accuracy and RMSE (classes encoded 0, 0.5,
/// 1) are aggregated across all k * repeats folds; each chart lands in
/// exactly `repeats` test folds.
EvalReport evaluate(const std::vector<ChartFeatures>& corpus, const ModelWeights& weights,
                    int k = 5, int repeats = 10, std::uint64_t seed = 0,
                    const std::vector<double>& label_scores = {});

} // namespace alluvial
