#include <doctest.h>

#include <vector>

#include "alluvial/errors.hpp"
#include "alluvial/types.hpp"

using namespace alluvial;

namespace {

AlluvialDataset two_column() {
    return AlluvialDataset("d", {2, 2},
                           {{{0, 0}, {1, 0}, 3.0},
                            {{0, 0}, {1, 1}, 4.0},
                            {{0, 1}, {1, 0}, 5.0},
                            {{0, 1}, {1, 1}, 6.0}});
}

} // namespace

TEST_CASE("accessors report sizes, totals and per-entity values") {
    const auto d = two_column();
    CHECK(d.column_count() == 2);
    CHECK(d.entity_count() == 4);
    CHECK(d.columns() == std::vector<int>{2, 2});
    CHECK(d.flows().size() == 4);
    CHECK(d.column_total(0) == doctest::Approx(18.0));
    CHECK(d.column_total(1) == doctest::Approx(18.0));
    CHECK(d.outflow_total({0, 0}) == doctest::Approx(7.0));
    CHECK(d.inflow_total({0, 0}) == doctest::Approx(0.0));
    CHECK(d.inflow_total({1, 0}) == doctest::Approx(8.0));
    CHECK(d.entity_value({1, 1}) == doctest::Approx(10.0));
    CHECK(d.contains({1, 1}));
    CHECK_FALSE(d.contains({1, 2}));
    CHECK_FALSE(d.contains({2, 0}));
}

TEST_CASE("flows are stored in canonical order regardless of input order") {
    const AlluvialDataset shuffled("d", {2, 2},
                                   {{{0, 1}, {1, 1}, 6.0},
                                    {{0, 0}, {1, 1}, 4.0},
                                    {{0, 1}, {1, 0}, 5.0},
                                    {{0, 0}, {1, 0}, 3.0}});
    CHECK(shuffled == two_column());
}

TEST_CASE("duplicate source-target pairs merge by summing values") {
    const AlluvialDataset d("d", {1, 2},
                            {{{0, 0}, {1, 0}, 2.0},
                             {{0, 0}, {1, 0}, 3.0},
                             {{0, 0}, {1, 1}, 1.0}});
    CHECK(d.flows().size() == 2);
    CHECK(d.flows()[0].value == doctest::Approx(5.0));
}

TEST_CASE("construction rejects malformed structure") {
    CHECK_THROWS_AS(AlluvialDataset("d", {3}, {}), InvalidDataset);
    CHECK_THROWS_AS(AlluvialDataset("d", {}, {}), InvalidDataset);
    CHECK_THROWS_AS(AlluvialDataset("d", {2, 0}, {{{0, 0}, {1, 0}, 1.0}}), InvalidDataset);
    // flow skipping a column
    CHECK_THROWS_AS(AlluvialDataset("d", {1, 1, 1},
                                    {{{0, 0}, {2, 0}, 1.0}, {{1, 0}, {2, 0}, 1.0}}),
                    InvalidDataset);
    // flow pointing backwards
    CHECK_THROWS_AS(AlluvialDataset("d", {1, 1}, {{{1, 0}, {0, 0}, 1.0}}), InvalidDataset);
    // slot out of range
    CHECK_THROWS_AS(AlluvialDataset("d", {1, 1}, {{{0, 0}, {1, 1}, 1.0}}), InvalidDataset);
    // non-positive value
    CHECK_THROWS_AS(AlluvialDataset("d", {1, 1}, {{{0, 0}, {1, 0}, 0.0}}), InvalidDataset);
    CHECK_THROWS_AS(AlluvialDataset("d", {1, 1}, {{{0, 0}, {1, 0}, -2.0}}), InvalidDataset);
}

TEST_CASE("every entity must participate in the flow structure") {
    // second source has no outflow
    CHECK_THROWS_AS(AlluvialDataset("d", {2, 1}, {{{0, 0}, {1, 0}, 1.0}}), InvalidDataset);
    // second target has no inflow
    CHECK_THROWS_AS(AlluvialDataset("d", {1, 2}, {{{0, 0}, {1, 0}, 1.0}}), InvalidDataset);
}

TEST_CASE("entity lookups out of range throw") {
    const auto d = two_column();
    CHECK_THROWS_AS(d.inflow_total({5, 0}), OutOfRange);
    CHECK_THROWS_AS(d.outflow_total({0, 9}), OutOfRange);
    CHECK_THROWS_AS(d.column_total(2), OutOfRange);
}

TEST_CASE("published weight tables match their sources") {
    const auto acc3 = published_weights(WeightLabel::Acc3);
    CHECK(acc3.timesteps == doctest::Approx(0.222).epsilon(1e-12));
    CHECK(acc3.entities == doctest::Approx(0.282).epsilon(1e-12));
    CHECK(acc3.flow_arcs == doctest::Approx(0.267).epsilon(1e-12));
    CHECK(acc3.crossings == doctest::Approx(0.228).epsilon(1e-12));

    const auto acc4 = published_weights(WeightLabel::Acc4);
    CHECK(acc4.timesteps == doctest::Approx(0.2566).epsilon(1e-12));
    CHECK(acc4.entities == doctest::Approx(0.234).epsilon(1e-12));
    CHECK(acc4.flow_arcs == doctest::Approx(0.206).epsilon(1e-12));
    CHECK(acc4.crossings == doctest::Approx(0.302).epsilon(1e-12));

    const auto svc = published_weights(WeightLabel::Svc);
    CHECK(svc.timesteps == doctest::Approx(0.240).epsilon(1e-12));
    CHECK(svc.entities == doctest::Approx(0.247).epsilon(1e-12));
    CHECK(svc.flow_arcs == doctest::Approx(0.314).epsilon(1e-12));
    CHECK(svc.crossings == doctest::Approx(0.197).epsilon(1e-12));

    const auto sa = published_weights(WeightLabel::Sa);
    CHECK(sa.timesteps == 1.0);
    CHECK(sa.entities == 1.0);
    CHECK(sa.flow_arcs == 1.0);
    CHECK(sa.crossings == 1.0);

    CHECK_THROWS_AS(published_weights(WeightLabel::Custom), OutOfRange);
}

TEST_CASE("weight labels and class names round-trip through strings") {
    for (auto label : {WeightLabel::Sa, WeightLabel::Acc3, WeightLabel::Acc4, WeightLabel::Svc,
                       WeightLabel::Custom})
        CHECK(weight_label_from_string(to_string(label)) == label);
    for (auto cls : {ComplexityClass::Easy, ComplexityClass::Medium, ComplexityClass::Hard})
        CHECK(complexity_class_from_string(to_string(cls)) == cls);
    CHECK_THROWS_AS(weight_label_from_string("bogus"), OutOfRange);
    CHECK_THROWS_AS(complexity_class_from_string("trivial"), OutOfRange);
}

TEST_CASE("default weights are unit and custom") {
    const ModelWeights w;
    CHECK(w.timesteps == 1.0);
    CHECK(w.entities == 1.0);
    CHECK(w.flow_arcs == 1.0);
    CHECK(w.crossings == 1.0);
    CHECK(w.label == WeightLabel::Custom);
}
