#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Black-box tests of the alluvial-lab binary: exit codes, artifact layout,
// determinism, and end-to-end weight recovery from simulated study data.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alluvial/json_io.hpp"
#include "alluvial/stats.hpp"
#include "alluvial/types.hpp"
#include "builders.hpp"
#include "run_cli.hpp"

namespace fs = std::filesystem;
using testsupport::RunResult;
using testsupport::TempDir;
using testsupport::run_lab;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
    int count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

std::string quoted(const fs::path& path) { return "'" + path.string() + "'"; }

} // namespace

TEST_CASE("usage errors exit with code 2 and help with 0") {
    CHECK(run_lab("").exit_code == 2);
    CHECK(run_lab("frobnicate").exit_code == 2);
    CHECK(run_lab("generate --bogus-flag").exit_code == 2);
    CHECK(run_lab("score").exit_code == 2);
    CHECK(run_lab("study").exit_code == 2);

    const RunResult help = run_lab("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("generate") != std::string::npos);
    CHECK(help.output.find("reproduce") != std::string::npos);

    const RunResult sub_help = run_lab("fit --help");
    CHECK(sub_help.exit_code == 0);
    CHECK(sub_help.output.find("--features") != std::string::npos);
}

TEST_CASE("generate writes charts plus features and is byte-deterministic") {
    TempDir tmp("cli-generate");
    const fs::path a = tmp.path() / "a";
    const fs::path b = tmp.path() / "b";

    const RunResult first = run_lab("--seed 11 --out " + quoted(a) + " generate --count 6");
    REQUIRE(first.exit_code == 0);
    CHECK(first.output.find("wrote 6 chart(s)") != std::string::npos);
    for (int i = 0; i < 6; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "chart_%03d.json", i);
        CHECK(fs::exists(a / name));
    }
    CHECK(fs::exists(a / "corpus_features.csv"));

    const auto dataset = alluvial::dataset_from_json(testsupport::read_file(a / "chart_000.json"));
    CHECK(dataset.id() == "chart_000");
    CHECK(dataset.column_count() >= 3);

    const auto rows =
        alluvial::features_from_csv(testsupport::read_file(a / "corpus_features.csv"));
    REQUIRE(rows.size() == 6);
    CHECK(rows.front().id == "chart_000");

    REQUIRE(run_lab("--seed 11 --out " + quoted(b) + " generate --count 6").exit_code == 0);
    std::string difference;
    CHECK(testsupport::directories_identical(a, b, &difference));
    INFO(difference);

    const fs::path c = tmp.path() / "c";
    REQUIRE(run_lab("--seed 12 --out " + quoted(c) + " generate --count 1").exit_code == 0);
    CHECK(testsupport::read_file(c / "chart_000.json") !=
          testsupport::read_file(a / "chart_000.json"));
}

TEST_CASE("score reproduces the features written by generate") {
    TempDir tmp("cli-score");
    const fs::path charts = tmp.path() / "charts";
    REQUIRE(run_lab("--seed 21 --out " + quoted(charts) + " generate --count 5").exit_code == 0);

    const fs::path features = tmp.path() / "rescored.csv";
    const RunResult scored =
        run_lab("--out " + quoted(features) + " score --in " + quoted(charts));
    REQUIRE(scored.exit_code == 0);
    CHECK(testsupport::read_file(features) ==
          testsupport::read_file(charts / "corpus_features.csv"));

    const fs::path single = tmp.path() / "single.csv";
    REQUIRE(run_lab("--out " + quoted(single) + " score --in " +
                    quoted(charts / "chart_002.json"))
                .exit_code == 0);
    const auto rows = alluvial::features_from_csv(testsupport::read_file(single));
    REQUIRE(rows.size() == 1);
    CHECK(rows.front().id == "chart_002");
}

TEST_CASE("render and layout emit one artifact per chart with matching counts") {
    TempDir tmp("cli-render");
    const fs::path charts = tmp.path() / "charts";
    REQUIRE(run_lab("--seed 31 --out " + quoted(charts) + " generate --count 4").exit_code == 0);
    const auto rows =
        alluvial::features_from_csv(testsupport::read_file(charts / "corpus_features.csv"));

    const fs::path svgs = tmp.path() / "svgs";
    REQUIRE(run_lab("--out " + quoted(svgs) + " render --in " + quoted(charts)).exit_code == 0);
    for (const auto& row : rows) {
        const fs::path file = svgs / (row.id + ".svg");
        REQUIRE(fs::exists(file));
        const std::string svg = testsupport::read_file(file);
        CHECK(count_occurrences(svg, "<rect") == row.features.entities);
        CHECK(count_occurrences(svg, "<path") == row.features.flow_arcs);
    }

    const fs::path layouts = tmp.path() / "layouts";
    REQUIRE(run_lab("--out " + quoted(layouts) + " layout --in " + quoted(charts)).exit_code == 0);
    for (const auto& row : rows) {
        const fs::path file = layouts / (row.id + ".layout.json");
        REQUIRE(fs::exists(file));
        const auto doc = nlohmann::json::parse(testsupport::read_file(file));
        CHECK(doc.contains("entities"));
        CHECK(doc.contains("ribbons"));
        CHECK(doc["ribbons"].size() == static_cast<std::size_t>(row.features.flow_arcs));
    }
}

TEST_CASE("data errors exit with code 3") {
    TempDir tmp("cli-errors");
    const RunResult missing = run_lab("score --in " + quoted(tmp.path() / "nope"));
    CHECK(missing.exit_code == 3);
    CHECK(missing.output.find("error:") != std::string::npos);

    const fs::path bad = tmp.path() / "bad.json";
    testsupport::write_file(bad, "{\"id\": \"x\", \"columns\": [], \"flows\": []}\n");
    CHECK(run_lab("score --in " + quoted(bad)).exit_code == 3);

    const fs::path not_json = tmp.path() / "mangled.json";
    testsupport::write_file(not_json, "{nope\n");
    CHECK(run_lab("score --in " + quoted(not_json)).exit_code == 3);

    CHECK(run_lab("score --in " + quoted(bad) + " --weights NoSuchLabel").exit_code == 3);
}

TEST_CASE("study accuracy writes the hand-computed table") {
    TempDir tmp("cli-accuracy");
    const fs::path in = tmp.path() / "study1.csv";
    testsupport::write_file(in,
                            "participant,chart,task,correct\n"
                            "p1,c1,T1,1\n"
                            "p2,c1,T1,0\n"
                            "p1,c1,T2,1\n"
                            "p2,c1,T2,1\n"
                            "p1,c1,T3,0\n"
                            "p2,c1,T3,0\n"
                            "p1,c1,T4,1\n"
                            "p1,c2,T1,1\n"
                            "p2,c2,T1,1\n");

    const fs::path out = tmp.path() / "accuracy.csv";
    const RunResult result =
        run_lab("--out " + quoted(out) + " study accuracy --in " + quoted(in));
    REQUIRE(result.exit_code == 0);

    // c1: T1 1/2, T2 2/2, T3 0/2, T4 1/1; Acc3 averages T2..T4, Acc4 all four.
    const std::string expected =
        "chart,T1,T2,T3,T4,Acc3,Acc4\n"
        "c1,0.500000,1.000000,0.000000,1.000000,0.666667,0.625000\n"
        "c2,1.000000,,,,,\n";
    CHECK(testsupport::read_file(out) == expected);
    CHECK(result.output.find("T1:") != std::string::npos);

    const fs::path excluded = tmp.path() / "accuracy2.csv";
    REQUIRE(run_lab("--out " + quoted(excluded) + " study accuracy --in " + quoted(in) +
                    " --exclude c1")
                .exit_code == 0);
    const std::string table = testsupport::read_file(excluded);
    CHECK(table.find("c1") == std::string::npos);
    CHECK(table.find("c2") != std::string::npos);

    CHECK(run_lab("study accuracy --in " + quoted(in) + " --exclude c1 --exclude c2")
              .exit_code == 3);
    testsupport::write_file(in, "wrong,header\n1,2\n");
    CHECK(run_lab("study accuracy --in " + quoted(in)).exit_code == 3);
}

TEST_CASE("study perceived writes zero-sum net scores") {
    TempDir tmp("cli-perceived");
    const fs::path in = tmp.path() / "study2.csv";
    // x beats y twice and z once; z beats y once; y never wins.
    testsupport::write_file(in,
                            "participant,chart_a,chart_b,verdict\n"
                            "p1,x,y,a_more_complex\n"
                            "p2,x,y,a_more_complex\n"
                            "p1,x,z,a_more_complex\n"
                            "p1,z,y,a_more_complex\n");

    const fs::path out = tmp.path() / "perceived.csv";
    REQUIRE(run_lab("--out " + quoted(out) + " study perceived --in " + quoted(in)).exit_code ==
            0);
    CHECK(testsupport::read_file(out) ==
          "chart,score\n"
          "x,30\n"
          "y,-30\n"
          "z,0\n");
}

TEST_CASE("fit recovers weights planted on standardized features") {
    TempDir tmp("cli-fit");
    const fs::path charts = tmp.path() / "charts";
    REQUIRE(run_lab("--seed 7 --out " + quoted(charts) + " generate --count 45").exit_code == 0);

    const auto rows =
        alluvial::features_from_csv(testsupport::read_file(charts / "corpus_features.csv"));
    REQUIRE(rows.size() == 45);
    std::vector<std::vector<double>> columns(4);
    for (const auto& row : rows) {
        columns[0].push_back(row.features.timesteps);
        columns[1].push_back(row.features.entities);
        columns[2].push_back(row.features.flow_arcs);
        columns[3].push_back(row.features.crossings);
    }
    const alluvial::ModelWeights planted =
        alluvial::published_weights(alluvial::WeightLabel::Svc);
    const double w[4] = {planted.timesteps, planted.entities, planted.flow_arcs,
                         planted.crossings};
    std::ostringstream target;
    target << "chart,Svc\n";
    target.precision(17);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double value = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double mu = alluvial::mean(columns[j]);
            const double sd = alluvial::sample_sd(columns[j]);
            value += w[j] * (columns[j][i] - mu) / sd;
        }
        target << rows[i].id << "," << value << "\n";
    }
    const fs::path target_file = tmp.path() / "svc.csv";
    testsupport::write_file(target_file, target.str());

    const fs::path out = tmp.path() / "weights.json";
    const RunResult fit = run_lab("--seed 99 --out " + quoted(out) + " fit --features " +
                                  quoted(charts / "corpus_features.csv") + " --target " +
                                  quoted(target_file) + " --column Svc --label S_vc");
    REQUIRE(fit.exit_code == 0);
    CHECK(fit.output.find("fit 45 charts") != std::string::npos);

    // Each fold standardizes with its own training-sample deviations, so
    // fold weights wobble around the planted values by a few 1e-4 even on a
    // noiseless target.
    const auto report = alluvial::cross_val_from_json(testsupport::read_file(out));
    const double total = planted.timesteps + planted.entities + planted.flow_arcs +
                         planted.crossings;
    CHECK(std::abs(report.mean_weights.timesteps - planted.timesteps / total) < 5e-3);
    CHECK(std::abs(report.mean_weights.entities - planted.entities / total) < 5e-3);
    CHECK(std::abs(report.mean_weights.flow_arcs - planted.flow_arcs / total) < 5e-3);
    CHECK(std::abs(report.mean_weights.crossings - planted.crossings / total) < 5e-3);
    CHECK(report.r_squared_mean == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(report.mean_weights.label == alluvial::WeightLabel::Svc);

    // Fold counts the corpus cannot support are a numeric error.
    CHECK(run_lab("fit --features " + quoted(charts / "corpus_features.csv") + " --target " +
                  quoted(target_file) + " --column Svc --k 50")
              .exit_code == 4);
    // Unknown target column is a data error.
    CHECK(run_lab("fit --features " + quoted(charts / "corpus_features.csv") + " --target " +
                  quoted(target_file) + " --column Nope")
              .exit_code == 3);
}

TEST_CASE("classify writes a posterior mosaic covering every chart") {
    TempDir tmp("cli-classify");
    const fs::path charts = tmp.path() / "charts";
    REQUIRE(run_lab("--seed 41 --out " + quoted(charts) + " generate --count 30").exit_code == 0);

    const fs::path report_a = tmp.path() / "report.json";
    const RunResult first =
        run_lab("--seed 3 --out " + quoted(report_a) + " classify --features " +
                quoted(charts / "corpus_features.csv"));
    REQUIRE(first.exit_code == 0);
    CHECK(first.output.find("accuracy") != std::string::npos);

    const auto doc = nlohmann::json::parse(testsupport::read_file(report_a));
    CHECK(doc["accuracy"].contains("mean"));
    CHECK(doc["rmse"].contains("sd"));
    REQUIRE(doc["mosaic"].size() == 30);
    for (const auto& [id, row] : doc["mosaic"].items()) {
        const double sum = row["easy"].get<double>() + row["medium"].get<double>() +
                           row["hard"].get<double>();
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }

    const fs::path report_b = tmp.path() / "report2.json";
    REQUIRE(run_lab("--seed 3 --out " + quoted(report_b) + " classify --features " +
                    quoted(charts / "corpus_features.csv"))
                .exit_code == 0);
    CHECK(testsupport::read_file(report_a) == testsupport::read_file(report_b));
}

TEST_CASE("check accepts generated artifacts and rejects corrupted ones") {
    TempDir tmp("cli-check");
    const fs::path charts = tmp.path() / "charts";
    REQUIRE(run_lab("--seed 51 --out " + quoted(charts) + " generate --count 2").exit_code == 0);
    REQUIRE(run_lab("--out " + quoted(charts) + " render --in " + quoted(charts)).exit_code == 0);

    const RunResult dataset = run_lab("check --in " + quoted(charts / "chart_000.json"));
    CHECK(dataset.exit_code == 0);
    CHECK(dataset.output.find("valid dataset") != std::string::npos);
    CHECK(run_lab("check --in " + quoted(charts / "corpus_features.csv") + " --kind features")
              .exit_code == 0);
    CHECK(run_lab("check --in " + quoted(charts / "chart_000.svg")).exit_code == 0);

    const fs::path truncated = tmp.path() / "torn.svg";
    testsupport::write_file(truncated, "<svg width=\"10\"");
    CHECK(run_lab("check --in " + quoted(truncated)).exit_code == 3);

    const fs::path unknown = tmp.path() / "mystery.bin";
    testsupport::write_file(unknown, "??");
    CHECK(run_lab("check --in " + quoted(unknown)).exit_code == 3);
    CHECK(run_lab("check --in " + quoted(charts / "chart_000.json") + " --kind svg").exit_code ==
          3);
}

TEST_CASE("config files and the environment feed the global options") {
    TempDir tmp("cli-config");
    const fs::path config = tmp.path() / "lab.ini";
    testsupport::write_file(config, "seed=123\n");

    const fs::path via_config = tmp.path() / "via-config";
    const fs::path via_flag = tmp.path() / "via-flag";
    REQUIRE(run_lab("--config " + quoted(config) + " --out " + quoted(via_config) +
                    " generate --count 2")
                .exit_code == 0);
    REQUIRE(run_lab("--seed 123 --out " + quoted(via_flag) + " generate --count 2").exit_code ==
            0);
    std::string difference;
    CHECK(testsupport::directories_identical(via_config, via_flag, &difference));
    INFO(difference);

    // A zero attempt budget is rejected during config validation.
    const RunResult env = run_lab("generate --count 1 --out " + quoted(tmp.path() / "env"),
                                  "ALLUVIAL_MAX_ATTEMPTS=0 ");
    CHECK(env.exit_code == 3);
}

TEST_CASE("reproduce --simulate-study emits the full artifact set and recovers weights") {
    TempDir tmp("cli-reproduce");
    const fs::path rep = tmp.path() / "rep";
    const RunResult run =
        run_lab("--seed 1 --out " + quoted(rep) + " reproduce --count 48 --simulate-study");
    REQUIRE(run.exit_code == 0);

    for (const char* name :
         {"corpus_features.csv", "sa_histogram.csv", "study1.csv", "study2.csv", "accuracy.csv",
          "perceived.csv", "weights_Acc3.json", "weights_Acc4.json", "weights_Svc.json",
          "report_Acc3.json", "report_Acc4.json", "report_Svc.json", "summary.txt"}) {
        INFO(name);
        CHECK(fs::exists(rep / name));
    }
    CHECK(fs::exists(rep / "charts" / "chart_000.json"));
    CHECK(fs::exists(rep / "charts" / "chart_047.json"));
    CHECK(fs::exists(rep / "charts" / "chart_047.svg"));

    const std::string summary = testsupport::read_file(rep / "summary.txt");
    for (const char* line : {"generate: ok", "features: ok", "render: ok", "simulate-study: ok",
                             "study: ok", "fit: ok", "classify: ok"}) {
        INFO(line);
        CHECK(summary.find(line) != std::string::npos);
    }

    // The planted pairwise model uses the published perceived-complexity
    // weights; the fitted ones must land nearby.
    const auto svc = alluvial::cross_val_from_json(testsupport::read_file(rep / "weights_Svc.json"));
    const auto planted = alluvial::published_weights(alluvial::WeightLabel::Svc);
    CHECK(std::abs(svc.mean_weights.timesteps - planted.timesteps) < 0.05);
    CHECK(std::abs(svc.mean_weights.entities - planted.entities) < 0.05);
    CHECK(std::abs(svc.mean_weights.flow_arcs - planted.flow_arcs) < 0.05);
    CHECK(std::abs(svc.mean_weights.crossings - planted.crossings) < 0.05);
    CHECK(svc.r_squared_mean > 0.95);

    for (const char* artifact : {"study1.csv", "accuracy.csv", "weights_Acc3.json"}) {
        INFO(artifact);
        CHECK(run_lab("check --in " + quoted(rep / artifact)).exit_code == 0);
    }

    const fs::path rep2 = tmp.path() / "rep2";
    REQUIRE(run_lab("--seed 1 --out " + quoted(rep2) + " reproduce --count 48 --simulate-study")
                .exit_code == 0);
    std::string difference;
    CHECK(testsupport::directories_identical(rep, rep2, &difference));
    INFO(difference);
}

TEST_CASE("reproduce without study data skips the downstream stages") {
    TempDir tmp("cli-reproduce-skip");
    const fs::path rep = tmp.path() / "rep";
    const RunResult run = run_lab("--seed 2 --out " + quoted(rep) + " reproduce --count 5");
    REQUIRE(run.exit_code == 0);

    const std::string summary = testsupport::read_file(rep / "summary.txt");
    CHECK(summary.find("fit: skipped: no study data") != std::string::npos);
    CHECK(!fs::exists(rep / "weights_Svc.json"));
    CHECK(!fs::exists(rep / "accuracy.csv"));
    CHECK(fs::exists(rep / "corpus_features.csv"));
    CHECK(fs::exists(rep / "charts" / "chart_004.svg"));
}
