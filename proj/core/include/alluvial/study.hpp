#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace alluvial {

enum class Task { T1, T2, T3, T4 };

std::string to_string(Task task);
Task task_from_string(const std::string& text);

struct TaskResponse {
    std::string participant;
    std::string chart;
    Task task = Task::T1;
    bool correct = false;
};

enum class Verdict { AMoreComplex, BMoreComplex, Equal };

std::string to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& text);

struct PairwiseResponse {
    std::string participant;
    std::string chart_a;
    std::string chart_b;
    Verdict verdict = Verdict::Equal;
};

struct TaskCell {
    int correct = 0;
    int total = 0;
    double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

/// Per-chart, per-task response tallies plus the summated accuracy variables.
struct AccuracyTable {
    std::map<std::string, std::array<TaskCell, 4>> cells;

    const TaskCell* cell(const std::string& chart, Task task) const;
    std::optional<double> task_accuracy(const std::string& chart, Task task) const;
    /// Mean of T2..T4 accuracies; empty unless every constituent task has a
    /// response for the chart.
    std::optional<double> acc3(const std::string& chart) const;
    /// Mean of all four task accuracies, same definedness rule.
    std::optional<double> acc4(const std::string& chart) const;
    std::vector<std::string> charts() const;

    /// Pooled across charts.
    TaskCell overall(Task task) const;
    /// Binomial standard error of the pooled accuracy.
    double overall_stderr(Task task) const;
};

/// Parses `participant,chart,task,correct` rows. Malformed rows are
/// collected and reported in one FormatError naming each offending row;
/// a missing or wrong header fails immediately.
std::vector<TaskResponse> ingest_study1(const std::string& csv_text);

/// Parses `participant,chart_a,chart_b,verdict` rows under the same error
/// policy. Rows comparing a chart to itself are malformed.
std::vector<PairwiseResponse> ingest_study2(const std::string& csv_text);

/// Tally accuracies, optionally dropping charts (e.g. training charts).
/// Throws EmptyInput when no responses survive.
AccuracyTable accuracy_table(const std::vector<TaskResponse>& responses,
                             const std::vector<std::string>& exclude_charts = {});

/// Scoring rule: +10 to the chart rated more complex, -10 to the other,
/// nothing on an equal verdict. roster entries are seeded with score 0 so
/// never-compared charts still appear.
std::map<std::string, int> perceived_complexity(const std::vector<PairwiseResponse>& responses,
                                                const std::vector<std::string>& roster = {});

} // namespace alluvial
