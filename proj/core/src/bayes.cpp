#include "alluvial/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alluvial/rng.hpp"
#include "alluvial/scoring.hpp"
#include "alluvial/stats.hpp"

namespace alluvial {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

std::array<double, 4> feature_array(const FeatureVector& f) {
    return {static_cast<double>(f.timesteps), static_cast<double>(f.entities),
            static_cast<double>(f.flow_arcs), static_cast<double>(f.crossings)};
}

std::size_t class_index(ComplexityClass cls) {
    return static_cast<std::size_t>(cls);
}

Gaussian fit_gaussian(const std::vector<double>& values, double floor) {
    Gaussian g;
    g.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) acc += (v - g.mean) * (v - g.mean);
    g.variance = std::max(floor, acc / static_cast<double>(values.size()));
    return g;
}

double log_density(const Gaussian& g, double x) {
    const double z = x - g.mean;
    return -0.5 * (kLogTwoPi + std::log(g.variance) + z * z / g.variance);
}

} // namespace

BayesModel train(const std::vector<LabeledChart>& training, const ModelWeights& weights) {
    if (training.empty()) throw InsufficientData("empty training set");
    const double n = static_cast<double>(training.size());

    BayesModel model;
    model.weights = weights;

    // Pseudo-count mass per class: where the weighted, normalized training
    // scores themselves fall. One corpus-worth, so prior = (frequency +
    // score mass) / 2.
    std::vector<double> scores(training.size());
    for (std::size_t i = 0; i < training.size(); ++i)
        scores[i] = score(training[i].features, weights);
    const std::vector<double> normalized = normalize_scores(scores);
    std::array<double, 3> score_mass{};
    for (double s : normalized) score_mass[class_index(classify(s))] += 1.0 / n;

    std::array<double, 3> frequency{};
    for (const LabeledChart& chart : training) frequency[class_index(chart.label)] += 1.0 / n;
    for (std::size_t c = 0; c < 3; ++c)
        model.class_priors[c] = (frequency[c] + score_mass[c]) / 2.0;

    std::array<std::vector<double>, 4> pooled;
    std::array<std::array<std::vector<double>, 4>, 3> per_class;
    for (const LabeledChart& chart : training) {
        const auto values = feature_array(chart.features);
        for (std::size_t j = 0; j < 4; ++j) {
            pooled[j].push_back(values[j]);
            per_class[class_index(chart.label)][j].push_back(values[j]);
        }
    }
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t j = 0; j < 4; ++j) {
            const auto& values = per_class[c][j].empty() ? pooled[j] : per_class[c][j];
            model.likelihoods[c][j] = fit_gaussian(values, model.variance_floor);
        }
    }
    return model;
}

Prediction predict(const BayesModel& model, const FeatureVector& features) {
    const auto values = feature_array(features);
    std::array<double, 3> log_posterior{};
    for (std::size_t c = 0; c < 3; ++c) {
        log_posterior[c] = std::log(std::max(model.class_priors[c], 1e-300));
        for (std::size_t j = 0; j < 4; ++j)
            log_posterior[c] += log_density(model.likelihoods[c][j], values[j]);
    }
    const double peak = *std::max_element(log_posterior.begin(), log_posterior.end());
    double norm = 0.0;
    for (double lp : log_posterior) norm += std::exp(lp - peak);

    Prediction prediction;
    for (std::size_t c = 0; c < 3; ++c)
        prediction.posterior[c] = std::exp(log_posterior[c] - peak) / norm;
    std::size_t best = 0;
    for (std::size_t c = 1; c < 3; ++c)
        if (log_posterior[c] > log_posterior[best]) best = c;
    prediction.complexity_class = static_cast<ComplexityClass>(best);
    return prediction;
}

EvalReport evaluate(const std::vector<ChartFeatures>& corpus, const ModelWeights& weights, int k,
                    int repeats, std::uint64_t seed, const std::vector<double>& label_scores) {
    const std::size_t n = corpus.size();
    if (k < 2) throw InsufficientData("k must be at least 2");
    if (static_cast<std::size_t>(k) > n)
        throw InsufficientData("k=" + std::to_string(k) + " folds need at least that many charts, got " +
                               std::to_string(n));
    if (repeats < 1) throw InsufficientData("repeats must be at least 1");
    if (!label_scores.empty() && label_scores.size() != n)
        throw FormatError("label score count " + std::to_string(label_scores.size()) +
                          " does not match corpus size " + std::to_string(n));

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i)
        scores[i] = label_scores.empty() ? score(corpus[i].features, weights) : label_scores[i];
    const std::vector<double> normalized = normalize_scores(scores);
    std::vector<ComplexityClass> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = classify(normalized[i]);

    EvalReport report;
    report.k = k;
    report.repeats = repeats;
    std::vector<double> fold_accuracy, fold_rmse;
    std::vector<std::array<int, 3>> assignment_counts(n, {0, 0, 0});
    static constexpr std::array<double, 3> kEncoding{0.0, 0.5, 1.0};

    for (int repeat = 0; repeat < repeats; ++repeat) {
        // Stratified fold assignment: shuffle within each class, then deal
        // every chart round-robin so folds stay balanced.
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(repeat));
        std::vector<int> fold_of(n, 0);
        int counter = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            std::vector<int> members;
            for (std::size_t i = 0; i < n; ++i)
                if (class_index(labels[i]) == c) members.push_back(static_cast<int>(i));
            rng.shuffle(members);
            for (int i : members) fold_of[static_cast<std::size_t>(i)] = counter++ % k;
        }

        for (int fold = 0; fold < k; ++fold) {
            std::vector<LabeledChart> train_set;
            std::vector<std::size_t> test_set;
            for (std::size_t i = 0; i < n; ++i) {
                if (fold_of[i] == fold) {
                    test_set.push_back(i);
                } else {
                    train_set.push_back({corpus[i].id, corpus[i].features, labels[i]});
                }
            }
            if (test_set.empty() || train_set.empty()) {
                report.warnings.push_back("repeat " + std::to_string(repeat) + " fold " +
                                          std::to_string(fold) + " empty; skipped");
                continue;
            }
            std::array<bool, 3> present{};
            for (const auto& chart : train_set) present[class_index(chart.label)] = true;
            for (std::size_t c = 0; c < 3; ++c) {
                if (!present[c]) {
                    report.warnings.push_back(
                        "repeat " + std::to_string(repeat) + " fold " + std::to_string(fold) +
                        ": class " + std::string(to_string(static_cast<ComplexityClass>(c))) +
                        " absent from training; pooled likelihood used");
                }
            }

            const BayesModel model = train(train_set, weights);
            int correct = 0;
            double squared = 0.0;
            for (std::size_t i : test_set) {
                const Prediction prediction = predict(model, corpus[i].features);
                ++assignment_counts[i][class_index(prediction.complexity_class)];
                if (prediction.complexity_class == labels[i]) ++correct;
                const double delta = kEncoding[class_index(prediction.complexity_class)] -
                                     kEncoding[class_index(labels[i])];
                squared += delta * delta;
            }
            fold_accuracy.push_back(static_cast<double>(correct) /
                                    static_cast<double>(test_set.size()));
            fold_rmse.push_back(std::sqrt(squared / static_cast<double>(test_set.size())));
        }
    }

    report.accuracy_mean = mean(fold_accuracy);
    report.accuracy_sd = sample_sd(fold_accuracy);
    report.rmse_mean = mean(fold_rmse);
    report.rmse_sd = sample_sd(fold_rmse);

    // Mosaic rows ordered by ascending unweighted score.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> s_a(n);
    for (std::size_t i = 0; i < n; ++i)
        s_a[i] = score(corpus[i].features, published_weights(WeightLabel::Sa));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (s_a[a] != s_a[b]) return s_a[a] < s_a[b];
        return corpus[a].id < corpus[b].id;
    });
    for (std::size_t i : order) {
        const int total = assignment_counts[i][0] + assignment_counts[i][1] + assignment_counts[i][2];
        std::array<double, 3> row{};
        if (total > 0)
            for (std::size_t c = 0; c < 3; ++c)
                row[c] = static_cast<double>(assignment_counts[i][c]) / total;
        report.chart_order.push_back(corpus[i].id);
        report.mosaic[corpus[i].id] = row;
    }
    return report;
}

} // namespace alluvial
