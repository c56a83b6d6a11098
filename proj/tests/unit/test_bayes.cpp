#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "alluvial/bayes.hpp"
#include "alluvial/errors.hpp"
#include "alluvial/scoring.hpp"

using namespace alluvial;

namespace {

/// Three well-separated clusters in feature space; cluster membership and
/// score order coincide, so tertile labels equal cluster labels.
std::vector<ChartFeatures> clustered_corpus(int per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<ChartFeatures> corpus;
    const std::array<std::array<int, 4>, 3> centers{{{3, 6, 10, 5}, {4, 15, 40, 60}, {6, 28, 90, 180}}};
    int id = 0;
    for (int cls = 0; cls < 3; ++cls) {
        for (int i = 0; i < per_class; ++i) {
            std::uniform_int_distribution<int> jitter(-2, 2);
            FeatureVector f;
            f.timesteps = std::max(2, centers[cls][0] + (i % 2));
            f.entities = std::max(2, centers[cls][1] + jitter(rng));
            f.flow_arcs = std::max(2, centers[cls][2] + jitter(rng));
            f.crossings = std::max(0, centers[cls][3] + jitter(rng));
            corpus.push_back({"chart_" + std::to_string(id++), f});
        }
    }
    return corpus;
}

std::vector<LabeledChart> labeled(const std::vector<ChartFeatures>& corpus,
                                  const ModelWeights& weights) {
    std::vector<double> raw;
    for (const auto& chart : corpus) raw.push_back(score(chart.features, weights));
    const auto normalized = normalize_scores(raw);
    std::vector<LabeledChart> out;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        out.push_back({corpus[i].id, corpus[i].features, classify(normalized[i])});
    return out;
}

} // namespace

TEST_CASE("posteriors are a probability simplex") {
    const auto corpus = clustered_corpus(12, 5);
    const auto weights = published_weights(WeightLabel::Sa);
    const auto model = train(labeled(corpus, weights), weights);
    for (const auto& chart : corpus) {
        const auto prediction = predict(model, chart.features);
        double total = 0.0;
        for (double p : prediction.posterior) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            total += p;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("prediction picks the largest posterior") {
    const auto corpus = clustered_corpus(10, 6);
    const auto weights = published_weights(WeightLabel::Sa);
    const auto model = train(labeled(corpus, weights), weights);
    for (const auto& chart : corpus) {
        const auto prediction = predict(model, chart.features);
        const auto cls = static_cast<std::size_t>(prediction.complexity_class);
        for (double p : prediction.posterior)
            CHECK(prediction.posterior[cls] >= p - 1e-15);
    }
}

TEST_CASE("separated clusters classify almost perfectly") {
    const auto corpus = clustered_corpus(15, 7);
    const auto report = evaluate(corpus, published_weights(WeightLabel::Sa), 5, 10, 1);
    CHECK(report.accuracy_mean >= 0.95);
    CHECK(report.rmse_mean <= 0.10);
    CHECK(report.accuracy_sd >= 0.0);
}

TEST_CASE("equal posteriors break ties toward the easier class") {
    BayesModel model;
    model.class_priors = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    for (auto& row : model.likelihoods)
        for (auto& g : row) g = {10.0, 4.0};
    const auto prediction = predict(model, {10, 10, 10, 10});
    CHECK(prediction.complexity_class == ComplexityClass::Easy);
    CHECK(prediction.posterior[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    model.class_priors = {0.2, 0.2, 0.6};
    CHECK(predict(model, {10, 10, 10, 10}).complexity_class == ComplexityClass::Hard);
}

TEST_CASE("a stronger prior never lowers a class posterior") {
    const auto corpus = clustered_corpus(8, 9);
    const auto weights = published_weights(WeightLabel::Sa);
    auto model = train(labeled(corpus, weights), weights);
    const FeatureVector probe{4, 14, 38, 55};
    const double before = predict(model, probe).posterior[2];
    model.class_priors[2] *= 3.0;
    const double after = predict(model, probe).posterior[2];
    CHECK(after >= before - 1e-12);
}

TEST_CASE("training requires data and tolerates a missing class via pooling") {
    CHECK_THROWS_AS(train({}, published_weights(WeightLabel::Sa)), InsufficientData);

    // all labels identical: other classes fall back to pooled likelihoods
    std::vector<LabeledChart> flat;
    for (int i = 0; i < 6; ++i)
        flat.push_back({"c" + std::to_string(i), {3, 6 + i, 10, 4}, ComplexityClass::Easy});
    const auto model = train(flat, published_weights(WeightLabel::Sa));
    const auto prediction = predict(model, {3, 8, 10, 4});
    double total = 0.0;
    for (double p : prediction.posterior) total += p;
    CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("variances are floored away from zero") {
    std::vector<LabeledChart> degenerate;
    for (int i = 0; i < 4; ++i)
        degenerate.push_back({"c" + std::to_string(i), {3, 6, 10, 4}, ComplexityClass::Easy});
    for (int i = 0; i < 4; ++i)
        degenerate.push_back({"d" + std::to_string(i), {6, 28, 90, 170}, ComplexityClass::Hard});
    const auto model = train(degenerate, published_weights(WeightLabel::Sa));
    for (const auto& row : model.likelihoods)
        for (const auto& g : row) CHECK(g.variance >= model.variance_floor);
    const auto prediction = predict(model, {3, 6, 10, 4});
    CHECK(prediction.complexity_class == ComplexityClass::Easy);
}

TEST_CASE("every chart is scored in every repeat") {
    const auto corpus = clustered_corpus(9, 10);
    const int repeats = 6;
    const auto report = evaluate(corpus, published_weights(WeightLabel::Sa), 5, repeats, 3);
    CHECK(report.k == 5);
    CHECK(report.repeats == repeats);
    REQUIRE(report.mosaic.size() == corpus.size());
    for (const auto& [id, row] : report.mosaic) {
        double total = 0.0;
        for (double share : row) {
            total += share;
            const double scaled = share * repeats;
            CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mosaic rows are ordered by unweighted score") {
    const auto corpus = clustered_corpus(5, 11);
    const auto report = evaluate(corpus, published_weights(WeightLabel::Svc), 5, 2, 3);
    REQUIRE(report.chart_order.size() == corpus.size());
    auto sum_of = [&](const std::string& id) {
        for (const auto& chart : corpus)
            if (chart.id == id)
                return chart.features.timesteps + chart.features.entities +
                       chart.features.flow_arcs + chart.features.crossings;
        FAIL("unknown id");
        return 0;
    };
    for (std::size_t i = 1; i < report.chart_order.size(); ++i)
        CHECK(sum_of(report.chart_order[i - 1]) <= sum_of(report.chart_order[i]));
}

TEST_CASE("evaluation is deterministic in its seed") {
    const auto corpus = clustered_corpus(8, 12);
    const auto weights = published_weights(WeightLabel::Sa);
    const auto a = evaluate(corpus, weights, 4, 3, 77);
    const auto b = evaluate(corpus, weights, 4, 3, 77);
    CHECK(a.accuracy_mean == b.accuracy_mean);
    CHECK(a.rmse_mean == b.rmse_mean);
    CHECK(a.mosaic == b.mosaic);
}

TEST_CASE("a rare class triggers pooled-likelihood warnings") {
    auto corpus = clustered_corpus(22, 13);
    corpus.resize(44);
    std::vector<double> scores;
    for (std::size_t i = 0; i < corpus.size(); ++i) scores.push_back(i == 0 ? 100.0 : 1.0 + i * 0.01);
    const auto report =
        evaluate(corpus, published_weights(WeightLabel::Sa), 4, 2, 5, scores);
    bool pooled = false;
    for (const auto& warning : report.warnings)
        if (warning.find("absent from training") != std::string::npos) pooled = true;
    CHECK(pooled);
}

TEST_CASE("alternative label scores relabel the corpus") {
    const auto corpus = clustered_corpus(6, 14);
    const auto weights = published_weights(WeightLabel::Sa);
    // negate the weighted scores: the simplest charts become the hard class
    std::vector<double> inverted;
    for (const auto& chart : corpus) inverted.push_back(-score(chart.features, weights));
    const auto report = evaluate(corpus, weights, 3, 2, 9, inverted);
    const auto& simplest = report.mosaic.at(report.chart_order.front());
    const auto& busiest = report.mosaic.at(report.chart_order.back());
    CHECK(simplest[2] > 0.5);
    CHECK(busiest[0] > 0.5);
    // the clusters still separate cleanly, only the label mapping flipped
    CHECK(report.accuracy_mean >= 0.9);
}

TEST_CASE("evaluation validates its protocol parameters") {
    const auto corpus = clustered_corpus(4, 15);
    const auto weights = published_weights(WeightLabel::Sa);
    CHECK_THROWS_AS(evaluate(corpus, weights, 1, 2, 0), InsufficientData);
    CHECK_THROWS_AS(evaluate(corpus, weights, 13, 2, 0), InsufficientData);
    CHECK_THROWS_AS(evaluate(corpus, weights, 5, 0, 0), InsufficientData);
    CHECK_THROWS_AS(evaluate(corpus, weights, 5, 2, 0, {1.0}), FormatError);
}
