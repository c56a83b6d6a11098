// alluvial-lab: command-line front end wiring generation, layout, rendering,
// scoring, study ingestion, model fitting and classification into one
// pipeline. Every artifact is a pure function of the inputs and --seed; no
// timestamps are written, so identical invocations produce identical bytes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alluvial/bayes.hpp"
#include "alluvial/csv.hpp"
#include "alluvial/errors.hpp"
#include "alluvial/generator.hpp"
#include "alluvial/json_io.hpp"
#include "alluvial/layout.hpp"
#include "alluvial/render.hpp"
#include "alluvial/rng.hpp"
#include "alluvial/scoring.hpp"
#include "alluvial/stats.hpp"
#include "alluvial/study.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Substream phases for CLI-level randomness, clear of the generator's
// per-attempt phases.
constexpr std::uint64_t kPhaseStudy1 = 1000001;
constexpr std::uint64_t kPhaseStudy2 = 1000002;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw alluvial::DataError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Write via a .partial file and rename, so an interrupted run leaves the
/// incomplete artifact clearly marked instead of a truncated final file.
void write_artifact(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path partial = path.string() + ".partial";
    {
        std::ofstream out(partial, std::ios::binary | std::ios::trunc);
        if (!out) throw alluvial::DataError("cannot write " + partial.string());
        out << content;
        if (!out) throw alluvial::DataError("short write to " + partial.string());
    }
    fs::rename(partial, path);
}

std::string fixed(double value, int digits = 6) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// A weight argument is either a published label (S_a, Acc3, Acc4, S_vc) or
/// a path to a weights JSON file.
alluvial::ModelWeights resolve_weights(const std::string& text) {
    try {
        const auto label = alluvial::weight_label_from_string(text);
        if (label != alluvial::WeightLabel::Custom) return alluvial::published_weights(label);
    } catch (const alluvial::OutOfRange&) {
        // not a label; fall through to the file path case
    }
    if (!fs::exists(text))
        throw alluvial::DataError("'" + text + "' is neither a weight label nor a readable file");
    return alluvial::weights_from_json(read_text(text));
}

std::vector<fs::path> dataset_files(const fs::path& in) {
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
        for (const auto& entry : fs::directory_iterator(in)) {
            if (entry.path().extension() == ".json" &&
                entry.path().filename().string().rfind("chart", 0) == 0 &&
                entry.path().string().find(".layout.") == std::string::npos)
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw alluvial::DataError("no chart*.json files in " + in.string());
    } else if (fs::exists(in)) {
        files.push_back(in);
    } else {
        throw alluvial::DataError("no such file or directory: " + in.string());
    }
    return files;
}

std::vector<alluvial::AlluvialDataset> load_datasets(const fs::path& in) {
    std::vector<alluvial::AlluvialDataset> datasets;
    for (const auto& file : dataset_files(in)) {
        try {
            datasets.push_back(alluvial::dataset_from_json(read_text(file)));
        } catch (const alluvial::DataError& e) {
            throw alluvial::DataError(file.string() + ": " + e.what());
        }
    }
    return datasets;
}

std::string geometry_to_json(const alluvial::LayoutGeometry& geometry) {
    Json doc;
    doc["config"] = {{"canvas_width_px", geometry.config.canvas_width_px},
                     {"canvas_height_px", geometry.config.canvas_height_px},
                     {"node_width_px", geometry.config.node_width_px},
                     {"node_padding_px", geometry.config.node_padding_px},
                     {"relaxation_iterations", geometry.config.relaxation_iterations},
                     {"margin_px", geometry.config.margin_px}};
    Json entities = Json::array();
    for (const auto& column : geometry.entity_rects) {
        Json col = Json::array();
        for (const auto& rect : column)
            col.push_back({{"x", rect.x}, {"y", rect.y}, {"width", rect.width},
                           {"height", rect.height}});
        entities.push_back(std::move(col));
    }
    doc["entities"] = std::move(entities);
    Json ribbons = Json::array();
    for (const auto& ribbon : geometry.flow_ribbons)
        ribbons.push_back({{"source", {ribbon.source.column, ribbon.source.slot}},
                           {"target", {ribbon.target.column, ribbon.target.slot}},
                           {"source_offset", ribbon.source_offset},
                           {"target_offset", ribbon.target_offset},
                           {"thickness", ribbon.thickness}});
    doc["ribbons"] = std::move(ribbons);
    doc["orderings"] = geometry.orderings;
    return doc.dump(2) + "\n";
}

struct ScoredCorpus {
    std::vector<std::string> ids;
    std::vector<alluvial::FeatureVector> features;
    std::vector<alluvial::ComplexityReport> reports;
};

ScoredCorpus score_corpus(const std::vector<alluvial::AlluvialDataset>& datasets,
                          const alluvial::ModelWeights& weights) {
    ScoredCorpus corpus;
    for (const auto& dataset : datasets) {
        const auto orderings = alluvial::order_columns(dataset);
        corpus.ids.push_back(dataset.id());
        corpus.features.push_back(alluvial::extract_features(dataset, orderings));
    }
    corpus.reports = alluvial::build_reports(corpus.features, weights);
    return corpus;
}

std::string accuracy_to_csv(const alluvial::AccuracyTable& table) {
    std::string out = "chart,T1,T2,T3,T4,Acc3,Acc4\n";
    for (const auto& chart : table.charts()) {
        std::vector<std::string> fields{chart};
        for (auto task : {alluvial::Task::T1, alluvial::Task::T2, alluvial::Task::T3,
                          alluvial::Task::T4}) {
            const auto acc = table.task_accuracy(chart, task);
            fields.push_back(acc ? fixed(*acc) : "");
        }
        const auto a3 = table.acc3(chart);
        const auto a4 = table.acc4(chart);
        fields.push_back(a3 ? fixed(*a3) : "");
        fields.push_back(a4 ? fixed(*a4) : "");
        out += alluvial::csv::join_row(fields) + "\n";
    }
    return out;
}

std::string perceived_to_csv(const std::map<std::string, int>& scores) {
    std::string out = "chart,score\n";
    for (const auto& [chart, score] : scores)
        out += alluvial::csv::join_row({chart, std::to_string(score)}) + "\n";
    return out;
}

std::string histogram_to_csv(const std::vector<std::pair<double, int>>& bins) {
    std::string out = "bin_start,count\n";
    for (const auto& [start, count] : bins)
        out += fixed(start, 2) + "," + std::to_string(count) + "\n";
    return out;
}

/// Column values from a CSV keyed by its first column. Blank cells are
/// skipped.
std::map<std::string, double> load_target_column(const fs::path& file, const std::string& column) {
    const auto rows = alluvial::csv::parse(read_text(file));
    if (rows.empty()) throw alluvial::FormatError(file.string() + " is empty");
    const auto& header = rows.front();
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end())
        throw alluvial::FormatError(file.string() + " has no column '" + column +
                                    "' (header: " + alluvial::csv::join_row(header) + ")");
    const std::size_t target_col = static_cast<std::size_t>(it - header.begin());
    std::map<std::string, double> values;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() <= target_col)
            throw alluvial::FormatError(file.string() + " row " + std::to_string(r + 1) +
                                        ": too few fields");
        const std::string& cell = rows[r][target_col];
        if (cell.empty()) continue;
        try {
            values[rows[r][0]] = std::stod(cell);
        } catch (const std::exception&) {
            throw alluvial::FormatError(file.string() + " row " + std::to_string(r + 1) +
                                        ": non-numeric value '" + cell + "'");
        }
    }
    if (values.empty()) throw alluvial::EmptyInput(file.string() + " has no usable rows");
    return values;
}

/// Join features with a per-chart target, in feature order.
void join_target(const ScoredCorpus& corpus, const std::map<std::string, double>& target,
                 std::vector<alluvial::FeatureVector>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < corpus.ids.size(); ++i) {
        const auto it = target.find(corpus.ids[i]);
        if (it == target.end()) continue;
        x.push_back(corpus.features[i]);
        y.push_back(it->second);
    }
    if (x.empty())
        throw alluvial::EmptyInput("no chart ids shared between features and target");
}

// ---------------------------------------------------------------------------
// Synthetic study data: planted response models for exercising the fitting
// pipeline without human data.

/// Per-trial correctness drawn from a planted per-chart rate that decreases
/// with normalized complexity.
std::string simulate_study1(const ScoredCorpus& corpus, std::uint64_t seed, int participants) {
    alluvial::SplitMix64 rng = alluvial::SplitMix64::stream(seed, kPhaseStudy1);
    static constexpr double kBase[] = {0.95, 0.90, 0.85, 0.80};
    std::string out = "participant,chart,task,correct\n";
    for (int p = 0; p < participants; ++p) {
        char participant[16];
        std::snprintf(participant, sizeof(participant), "p%03d", p);
        for (std::size_t i = 0; i < corpus.ids.size(); ++i) {
            for (int task = 0; task < 4; ++task) {
                const double rate = std::clamp(
                    kBase[task] - 0.5 * corpus.reports[i].normalized_score, 0.05, 0.98);
                const bool correct = rng.next_unit() < rate;
                out += std::string(participant) + "," + corpus.ids[i] + ",T" +
                       std::to_string(task + 1) + "," + (correct ? "1" : "0") + "\n";
            }
        }
    }
    return out;
}

/// Thurstone-style paired comparisons: P(a judged more complex) follows the
/// planted score difference. The planted score weights standardized features
/// (matching how fitted weights are reported), and with many ratings per
/// pair the +/-10 aggregate is close to affine in that score, which is what
/// lets the fitted weights recover the planted ones.
std::string simulate_study2(const ScoredCorpus& corpus, const alluvial::ModelWeights& planted,
                            std::uint64_t seed, int ratings_per_pair) {
    alluvial::SplitMix64 rng = alluvial::SplitMix64::stream(seed, kPhaseStudy2);
    const std::size_t n = corpus.ids.size();
    std::array<std::vector<double>, 4> cols;
    for (const auto& f : corpus.features) {
        cols[0].push_back(f.timesteps);
        cols[1].push_back(f.entities);
        cols[2].push_back(f.flow_arcs);
        cols[3].push_back(f.crossings);
    }
    const double w[4] = {planted.timesteps, planted.entities, planted.flow_arcs,
                         planted.crossings};
    std::vector<double> s(n, 0.0);
    for (int j = 0; j < 4; ++j) {
        const double mu = alluvial::mean(cols[j]);
        const double sd = alluvial::sample_sd(cols[j]);
        if (sd <= 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) s[i] += w[j] * (cols[j][i] - mu) / sd;
    }
    const double tau = std::max(1e-9, 4.0 * alluvial::sample_sd(s));
    // Verdict counts follow the expected frequencies (large-panel limit), so
    // the aggregate score carries the planted signal rather than per-rating
    // sampling noise. The rater assignment for each row is still randomized.
    std::string out = "participant,chart_a,chart_b,verdict\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p_a = normal_cdf((s[i] - s[j]) / tau);
            const int a_votes =
                static_cast<int>(std::lround(ratings_per_pair * p_a));
            for (int r = 0; r < ratings_per_pair; ++r) {
                char participant[16];
                std::snprintf(participant, sizeof(participant), "p%03d",
                              static_cast<int>(rng.next_below(24)));
                const char* verdict = r < a_votes ? "a_more_complex" : "b_more_complex";
                out += std::string(participant) + "," + corpus.ids[i] + "," + corpus.ids[j] + "," +
                       verdict + "\n";
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// check: schema validation for every artifact kind the toolkit writes.

void check_header(const std::string& text, const std::string& expected, const std::string& what) {
    const auto rows = alluvial::csv::parse(text);
    if (rows.empty() || alluvial::csv::join_row(rows.front()) != expected)
        throw alluvial::FormatError(what + " must start with header '" + expected + "'");
}

void check_one(const fs::path& path, const std::string& kind) {
    const std::string text = read_text(path);
    if (kind == "dataset") {
        alluvial::dataset_from_json(text);
    } else if (kind == "features") {
        alluvial::features_from_csv(text);
    } else if (kind == "weights") {
        alluvial::weights_from_json(text);
    } else if (kind == "report") {
        const Json doc = Json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("accuracy") ||
            !doc.contains("rmse") || !doc.contains("mosaic"))
            throw alluvial::FormatError("report JSON needs accuracy, rmse and mosaic");
        for (const auto& [id, row] : doc["mosaic"].items()) {
            if (!row.contains("easy") || !row.contains("medium") || !row.contains("hard"))
                throw alluvial::FormatError("mosaic row '" + id + "' needs easy/medium/hard");
            const double sum = row["easy"].get<double>() + row["medium"].get<double>() +
                               row["hard"].get<double>();
            if (std::abs(sum - 1.0) > 1e-9)
                throw alluvial::FormatError("mosaic row '" + id + "' sums to " + fixed(sum));
        }
    } else if (kind == "layout") {
        const Json doc = Json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("entities") ||
            !doc.contains("ribbons") || !doc.contains("orderings"))
            throw alluvial::FormatError("layout JSON needs entities, ribbons and orderings");
    } else if (kind == "study1") {
        alluvial::ingest_study1(text);
    } else if (kind == "study2") {
        alluvial::ingest_study2(text);
    } else if (kind == "accuracy") {
        check_header(text, "chart,T1,T2,T3,T4,Acc3,Acc4", "accuracy table");
    } else if (kind == "perceived") {
        check_header(text, "chart,score", "perceived-complexity table");
    } else if (kind == "svg") {
        if (text.rfind("<svg", 0) != 0 || text.find("</svg>") == std::string::npos)
            throw alluvial::FormatError("not an SVG document");
    } else {
        throw alluvial::DataError("unknown artifact kind '" + kind + "'");
    }
}

std::string guess_kind(const fs::path& path) {
    const std::string name = path.filename().string();
    auto has = [&](const char* text) { return name.find(text) != std::string::npos; };
    if (path.extension() == ".svg") return "svg";
    if (has(".layout.")) return "layout";
    if (has("weights")) return "weights";
    if (has("report")) return "report";
    if (path.extension() == ".json") return "dataset";
    if (has("features")) return "features";
    if (has("accuracy")) return "accuracy";
    if (has("perceived")) return "perceived";
    if (has("study1") || has("s1")) return "study1";
    if (has("study2") || has("s2")) return "study2";
    throw alluvial::DataError("cannot guess artifact kind of '" + name + "'; pass --kind");
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out;
    int max_attempts = 10000;

    alluvial::GeneratorConfig generator_config() const {
        alluvial::GeneratorConfig config;
        config.seed = seed;
        config.max_attempts = max_attempts;
        return config;
    }

    fs::path out_or(const std::string& fallback) const {
        return out.empty() ? fs::path(fallback) : fs::path(out);
    }
};

void cmd_generate(const GlobalOptions& global, int count, const std::string& weights_arg) {
    const auto weights = resolve_weights(weights_arg);
    const auto corpus = alluvial::generate_corpus(global.generator_config(), count);
    const fs::path dir = global.out_or("out");
    for (const auto& dataset : corpus)
        write_artifact(dir / (dataset.id() + ".json"), alluvial::dataset_to_json(dataset));
    const ScoredCorpus scored = score_corpus(corpus, weights);
    write_artifact(dir / "corpus_features.csv",
                   alluvial::features_to_csv(scored.ids, scored.reports));
    std::cout << "wrote " << count << " chart(s) and corpus_features.csv to " << dir.string()
              << "\n";
}

void cmd_layout(const fs::path& in, const GlobalOptions& global) {
    const auto datasets = load_datasets(in);
    fs::path out = global.out.empty()
                       ? (fs::is_directory(in) ? in : in.parent_path())
                       : fs::path(global.out);
    for (const auto& dataset : datasets) {
        const auto orderings = alluvial::order_columns(dataset);
        const auto geometry = alluvial::assign_geometry(dataset, orderings);
        write_artifact(out / (dataset.id() + ".layout.json"), geometry_to_json(geometry));
    }
    std::cout << "wrote " << datasets.size() << " layout file(s) to " << out.string() << "\n";
}

void cmd_render(const fs::path& in, const GlobalOptions& global) {
    const auto datasets = load_datasets(in);
    fs::path out = global.out.empty()
                       ? (fs::is_directory(in) ? in : in.parent_path())
                       : fs::path(global.out);
    for (const auto& dataset : datasets) {
        const auto orderings = alluvial::order_columns(dataset);
        const auto geometry = alluvial::assign_geometry(dataset, orderings);
        write_artifact(out / (dataset.id() + ".svg"), alluvial::render_svg(geometry));
    }
    std::cout << "wrote " << datasets.size() << " svg file(s) to " << out.string() << "\n";
}

void cmd_score(const fs::path& in, const GlobalOptions& global, const std::string& weights_arg) {
    const auto weights = resolve_weights(weights_arg);
    const ScoredCorpus scored = score_corpus(load_datasets(in), weights);
    const fs::path out = global.out_or("features.csv");
    write_artifact(out, alluvial::features_to_csv(scored.ids, scored.reports));
    std::cout << "scored " << scored.ids.size() << " chart(s) -> " << out.string() << "\n";
}

void cmd_study_accuracy(const fs::path& in, const GlobalOptions& global,
                        const std::vector<std::string>& exclude) {
    const auto responses = alluvial::ingest_study1(read_text(in));
    const auto table = alluvial::accuracy_table(responses, exclude);
    const fs::path out = global.out_or("accuracy.csv");
    write_artifact(out, accuracy_to_csv(table));
    for (auto task : {alluvial::Task::T1, alluvial::Task::T2, alluvial::Task::T3,
                      alluvial::Task::T4}) {
        const auto pooled = table.overall(task);
        std::cout << alluvial::to_string(task) << ": " << fixed(pooled.accuracy(), 4) << " +/- "
                  << fixed(table.overall_stderr(task), 4) << " (" << pooled.total
                  << " responses)\n";
    }
    std::cout << "wrote " << out.string() << "\n";
}

void cmd_study_perceived(const fs::path& in, const GlobalOptions& global) {
    const auto responses = alluvial::ingest_study2(read_text(in));
    const auto scores = alluvial::perceived_complexity(responses);
    const fs::path out = global.out_or("perceived.csv");
    write_artifact(out, perceived_to_csv(scores));
    std::cout << "wrote " << scores.size() << " chart score(s) to " << out.string() << "\n";
}

void cmd_fit(const fs::path& features_file, const fs::path& target_file,
             const std::string& column, int k, int repeats, const std::string& label,
             const GlobalOptions& global) {
    const auto rows = alluvial::features_from_csv(read_text(features_file));
    ScoredCorpus corpus;
    for (const auto& row : rows) {
        corpus.ids.push_back(row.id);
        corpus.features.push_back(row.features);
    }
    const auto target = load_target_column(target_file, column);
    std::vector<alluvial::FeatureVector> x;
    std::vector<double> y;
    join_target(corpus, target, x, y);

    auto report = alluvial::fit_weights(x, y, k, repeats, global.seed);
    report.mean_weights.label = alluvial::weight_label_from_string(label);
    const fs::path out = global.out_or("weights.json");
    write_artifact(out, alluvial::cross_val_to_json(report));
    std::cout << "fit " << x.size() << " charts: w_t=" << fixed(report.mean_weights.timesteps, 4)
              << " w_e=" << fixed(report.mean_weights.entities, 4)
              << " w_f=" << fixed(report.mean_weights.flow_arcs, 4)
              << " w_c=" << fixed(report.mean_weights.crossings, 4)
              << " R2=" << fixed(report.r_squared_mean, 4) << " +/- "
              << fixed(report.r_squared_sd, 4) << "\n";
    std::cout << "wrote " << out.string() << "\n";
}

void cmd_classify(const fs::path& features_file, const std::string& weights_arg, int k,
                  int repeats, const fs::path& label_target, const std::string& label_column,
                  const GlobalOptions& global) {
    const auto weights = resolve_weights(weights_arg);
    const auto rows = alluvial::features_from_csv(read_text(features_file));
    std::vector<alluvial::ChartFeatures> corpus;
    for (const auto& row : rows) corpus.push_back({row.id, row.features});

    // Alternative labels (e.g. accuracy tertiles): accuracy falls as
    // complexity rises, so the sign is flipped to keep higher = harder.
    std::vector<double> label_scores;
    if (!label_target.empty()) {
        const auto target = load_target_column(label_target, label_column);
        for (const auto& chart : corpus) {
            const auto it = target.find(chart.id);
            if (it == target.end())
                throw alluvial::DataError("no label value for chart '" + chart.id + "'");
            label_scores.push_back(-it->second);
        }
    }

    const auto report = alluvial::evaluate(corpus, weights, k, repeats, global.seed, label_scores);
    const fs::path out = global.out_or("report.json");
    write_artifact(out, alluvial::eval_report_to_json(report));
    std::cout << "accuracy " << fixed(report.accuracy_mean, 4) << " +/- "
              << fixed(report.accuracy_sd, 4) << ", rmse " << fixed(report.rmse_mean, 4)
              << " +/- " << fixed(report.rmse_sd, 4) << "\n";
    std::cout << "wrote " << out.string() << "\n";
}

void cmd_check(const fs::path& in, std::string kind) {
    if (kind.empty()) kind = guess_kind(in);
    check_one(in, kind);
    std::cout << in.string() << ": valid " << kind << "\n";
}

struct ReproduceOptions {
    int count = 48;
    std::string study1;
    std::string study2;
    bool simulate = false;
    int participants = 30;
    int ratings_per_pair = 60;
};

template <class F>
void stage(std::vector<std::string>& summary, const std::string& name, F&& body) {
    try {
        body();
    } catch (const alluvial::NumericError& e) {
        throw alluvial::NumericError("stage " + name + ": " + e.what());
    } catch (const alluvial::DataError& e) {
        throw alluvial::DataError("stage " + name + ": " + e.what());
    } catch (const std::exception& e) {
        throw alluvial::DataError("stage " + name + ": " + std::string(e.what()));
    }
    summary.push_back(name + ": ok");
}

void cmd_reproduce(const GlobalOptions& global, const ReproduceOptions& options) {
    const fs::path dir = global.out_or("reproduction");
    std::vector<std::string> summary;
    summary.push_back("seed: " + std::to_string(global.seed));

    std::vector<alluvial::AlluvialDataset> corpus;
    stage(summary, "generate", [&] {
        corpus = alluvial::generate_corpus(global.generator_config(), options.count);
        for (const auto& dataset : corpus)
            write_artifact(dir / "charts" / (dataset.id() + ".json"),
                           alluvial::dataset_to_json(dataset));
        summary.push_back("  charts: " + std::to_string(corpus.size()));
    });

    ScoredCorpus scored;
    stage(summary, "features", [&] {
        scored = score_corpus(corpus, alluvial::published_weights(alluvial::WeightLabel::Sa));
        write_artifact(dir / "corpus_features.csv",
                       alluvial::features_to_csv(scored.ids, scored.reports));
        std::vector<double> raw;
        for (const auto& report : scored.reports) raw.push_back(report.raw_score);
        write_artifact(dir / "sa_histogram.csv",
                       histogram_to_csv(alluvial::score_histogram(raw, 25.0)));
        const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
        summary.push_back("  S_a range: " + fixed(*lo, 0) + " to " + fixed(*hi, 0));
    });

    stage(summary, "render", [&] {
        for (const auto& dataset : corpus) {
            const auto orderings = alluvial::order_columns(dataset);
            const auto geometry = alluvial::assign_geometry(dataset, orderings);
            write_artifact(dir / "charts" / (dataset.id() + ".svg"),
                           alluvial::render_svg(geometry));
        }
    });

    std::string study1_text, study2_text;
    if (options.simulate) {
        stage(summary, "simulate-study", [&] {
            study1_text = simulate_study1(scored, global.seed, options.participants);
            study2_text = simulate_study2(scored,
                                          alluvial::published_weights(alluvial::WeightLabel::Svc),
                                          global.seed, options.ratings_per_pair);
            write_artifact(dir / "study1.csv", study1_text);
            write_artifact(dir / "study2.csv", study2_text);
        });
    } else {
        if (!options.study1.empty()) study1_text = read_text(options.study1);
        if (!options.study2.empty()) study2_text = read_text(options.study2);
    }

    if (study1_text.empty() && study2_text.empty()) {
        summary.push_back("study: skipped: no study data");
        summary.push_back("fit: skipped: no study data");
        summary.push_back("classify: skipped: no study data");
        std::string text;
        for (const auto& line : summary) text += line + "\n";
        write_artifact(dir / "summary.txt", text);
        std::cout << text;
        return;
    }

    std::optional<alluvial::AccuracyTable> accuracy;
    std::map<std::string, int> perceived;
    stage(summary, "study", [&] {
        if (!study1_text.empty()) {
            accuracy = alluvial::accuracy_table(alluvial::ingest_study1(study1_text));
            write_artifact(dir / "accuracy.csv", accuracy_to_csv(*accuracy));
        }
        if (!study2_text.empty()) {
            perceived =
                alluvial::perceived_complexity(alluvial::ingest_study2(study2_text), scored.ids);
            write_artifact(dir / "perceived.csv", perceived_to_csv(perceived));
        }
    });

    struct FitTask {
        std::string name;
        alluvial::WeightLabel label;
        std::map<std::string, double> target;
    };
    std::vector<FitTask> tasks;
    if (accuracy) {
        FitTask acc3{"Acc3", alluvial::WeightLabel::Acc3, {}};
        FitTask acc4{"Acc4", alluvial::WeightLabel::Acc4, {}};
        for (const auto& chart : accuracy->charts()) {
            if (const auto v = accuracy->acc3(chart)) acc3.target[chart] = *v;
            if (const auto v = accuracy->acc4(chart)) acc4.target[chart] = *v;
        }
        tasks.push_back(std::move(acc3));
        tasks.push_back(std::move(acc4));
    }
    if (!perceived.empty()) {
        FitTask svc{"Svc", alluvial::WeightLabel::Svc, {}};
        for (const auto& [chart, score] : perceived) svc.target[chart] = score;
        tasks.push_back(std::move(svc));
    }

    std::vector<std::pair<std::string, alluvial::ModelWeights>> fitted;
    stage(summary, "fit", [&] {
        for (const auto& task : tasks) {
            std::vector<alluvial::FeatureVector> x;
            std::vector<double> y;
            join_target(scored, task.target, x, y);
            auto report = alluvial::fit_weights(x, y, 5, 10, global.seed);
            report.mean_weights.label = task.label;
            write_artifact(dir / ("weights_" + task.name + ".json"),
                           alluvial::cross_val_to_json(report));
            fitted.emplace_back(task.name, report.mean_weights);
            summary.push_back("  " + task.name + ": w_t=" +
                              fixed(report.mean_weights.timesteps, 4) + " w_e=" +
                              fixed(report.mean_weights.entities, 4) + " w_f=" +
                              fixed(report.mean_weights.flow_arcs, 4) + " w_c=" +
                              fixed(report.mean_weights.crossings, 4) + " R2=" +
                              fixed(report.r_squared_mean, 3));
        }
    });

    stage(summary, "classify", [&] {
        std::vector<alluvial::ChartFeatures> charts;
        for (std::size_t i = 0; i < scored.ids.size(); ++i)
            charts.push_back({scored.ids[i], scored.features[i]});
        for (const auto& [name, weights] : fitted) {
            const auto report = alluvial::evaluate(charts, weights, 5, 10, global.seed);
            write_artifact(dir / ("report_" + name + ".json"),
                           alluvial::eval_report_to_json(report));
            summary.push_back("  " + name + ": accuracy " + fixed(report.accuracy_mean, 3) +
                              " +/- " + fixed(report.accuracy_sd, 3) + ", rmse " +
                              fixed(report.rmse_mean, 3) + " +/- " + fixed(report.rmse_sd, 3));
        }
    });

    std::string text;
    for (const auto& line : summary) text += line + "\n";
    write_artifact(dir / "summary.txt", text);
    std::cout << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"alluvial-lab: synthetic alluvial diagrams, complexity scoring and "
                 "classification"};
    app.require_subcommand(1);
    argv = app.ensure_utf8(argv);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Master seed; every stage derives substreams from it")
        ->capture_default_str();
    app.add_option("--out", global.out, "Output file or directory (meaning depends on command)");
    app.add_option("--max-attempts", global.max_attempts,
                   "Generator rejection-sampling budget")
        ->envname("ALLUVIAL_MAX_ATTEMPTS")
        ->capture_default_str();
    app.set_config("--config", "", "Read defaults from a config file (CLI beats env beats file)");

    auto* generate = app.add_subcommand("generate", "Generate chart JSONs plus corpus_features.csv");
    generate->fallthrough();
    int gen_count = 1;
    std::string gen_weights = "S_a";
    generate->add_option("--count", gen_count, "Charts to generate")->capture_default_str();
    generate->add_option("--weights", gen_weights, "Weight label or weights JSON for the scores")
        ->capture_default_str();
    generate->callback([&] { cmd_generate(global, gen_count, gen_weights); });

    auto* layout = app.add_subcommand("layout", "Compute pixel geometry for chart JSONs");
    layout->fallthrough();
    std::string layout_in;
    layout->add_option("--in", layout_in, "Chart JSON file or directory")->required();
    layout->callback([&] { cmd_layout(layout_in, global); });

    auto* render = app.add_subcommand("render", "Render chart JSONs to SVG");
    render->fallthrough();
    std::string render_in;
    render->add_option("--in", render_in, "Chart JSON file or directory")->required();
    render->callback([&] { cmd_render(render_in, global); });

    auto* score = app.add_subcommand("score", "Extract features and complexity scores");
    score->fallthrough();
    std::string score_in, score_weights = "S_a";
    score->add_option("--in", score_in, "Chart JSON file or directory")->required();
    score->add_option("--weights", score_weights, "Weight label or weights JSON")
        ->capture_default_str();
    score->callback([&] { cmd_score(score_in, global, score_weights); });

    auto* study = app.add_subcommand("study", "Ingest study-response tables");
    study->require_subcommand(1);
    auto* accuracy = study->add_subcommand("accuracy", "Per-chart task accuracies from study #1");
    accuracy->fallthrough();
    std::string acc_in;
    std::vector<std::string> acc_exclude;
    accuracy->add_option("--in", acc_in, "study1 CSV (participant,chart,task,correct)")
        ->required();
    accuracy->add_option("--exclude", acc_exclude, "Chart ids to drop (e.g. training charts)");
    accuracy->callback([&] { cmd_study_accuracy(acc_in, global, acc_exclude); });
    auto* perceived = study->add_subcommand("perceived",
                                            "Perceived-complexity scores from study #2");
    perceived->fallthrough();
    std::string per_in;
    perceived->add_option("--in", per_in, "study2 CSV (participant,chart_a,chart_b,verdict)")
        ->required();
    perceived->callback([&] { cmd_study_perceived(per_in, global); });

    auto* fit = app.add_subcommand("fit", "Cross-validated weight fitting");
    fit->fallthrough();
    std::string fit_features, fit_target, fit_column = "Acc3", fit_label = "custom";
    int fit_k = 5, fit_repeats = 10;
    fit->add_option("--features", fit_features, "corpus_features.csv")->required();
    fit->add_option("--target", fit_target, "CSV with per-chart targets (first column: chart id)")
        ->required();
    fit->add_option("--column", fit_column, "Target column name")->capture_default_str();
    fit->add_option("--k", fit_k, "Folds")->capture_default_str();
    fit->add_option("--repeats", fit_repeats, "Shuffle repeats")->capture_default_str();
    fit->add_option("--label", fit_label, "Label stored in the weights file")
        ->capture_default_str();
    fit->callback([&] {
        cmd_fit(fit_features, fit_target, fit_column, fit_k, fit_repeats, fit_label, global);
    });

    auto* classify = app.add_subcommand("classify",
                                        "Bayesian easy/medium/hard evaluation (repeated k-fold)");
    classify->fallthrough();
    std::string cls_features, cls_weights = "S_a", cls_label_target, cls_label_column = "Acc3";
    int cls_k = 5, cls_repeats = 10;
    classify->add_option("--features", cls_features, "corpus_features.csv")->required();
    classify->add_option("--weights", cls_weights, "Weight label or weights JSON")
        ->capture_default_str();
    classify->add_option("--k", cls_k, "Folds")->capture_default_str();
    classify->add_option("--repeats", cls_repeats, "Protocol repeats")->capture_default_str();
    classify
        ->add_option("--label-target", cls_label_target,
                     "Optional CSV whose column supplies labels (accuracy tertiles) instead of "
                     "the weighted score")
        ->check(CLI::ExistingFile);
    classify->add_option("--label-column", cls_label_column, "Column in --label-target")
        ->capture_default_str();
    classify->callback([&] {
        cmd_classify(cls_features, cls_weights, cls_k, cls_repeats, cls_label_target,
                     cls_label_column, global);
    });

    auto* reproduce = app.add_subcommand("reproduce", "One-shot pipeline: generate, score, "
                                                      "render, then fit and classify when study "
                                                      "data is available");
    reproduce->fallthrough();
    ReproduceOptions rep;
    reproduce->add_option("--count", rep.count, "Corpus size")->capture_default_str();
    reproduce->add_option("--study1", rep.study1, "Task-response CSV")->check(CLI::ExistingFile);
    reproduce->add_option("--study2", rep.study2, "Pairwise-comparison CSV")
        ->check(CLI::ExistingFile);
    reproduce->add_flag("--simulate-study", rep.simulate,
                        "Synthesize study CSVs from planted response models");
    reproduce->add_option("--participants", rep.participants,
                          "Simulated participants for study #1")
        ->capture_default_str();
    reproduce->add_option("--ratings-per-pair", rep.ratings_per_pair,
                          "Simulated ratings per chart pair for study #2")
        ->capture_default_str();
    reproduce->callback([&] { cmd_reproduce(global, rep); });

    auto* check = app.add_subcommand("check", "Validate an artifact against its schema");
    check->fallthrough();
    std::string check_in, check_kind;
    check->add_option("--in", check_in, "Artifact file")->required();
    check->add_option("--kind", check_kind,
                      "dataset|layout|features|weights|report|study1|study2|accuracy|perceived|svg "
                      "(default: guessed from the file name)");
    check->callback([&] { cmd_check(check_in, check_kind); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const alluvial::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const alluvial::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
