#include "alluvial/study.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "alluvial/csv.hpp"
#include "alluvial/errors.hpp"

namespace alluvial {

namespace {

std::size_t task_index(Task task) {
    return static_cast<std::size_t>(task);
}

bool parse_bool(const std::string& text, bool& out) {
    if (text == "1" || text == "true") {
        out = true;
        return true;
    }
    if (text == "0" || text == "false") {
        out = false;
        return true;
    }
    return false;
}

void require_header(const std::vector<std::vector<std::string>>& rows,
                    const std::vector<std::string>& expected) {
    std::string wanted = csv::join_row(expected);
    if (rows.empty()) throw FormatError("empty file, expected header " + wanted);
    if (rows.front() != expected)
        throw FormatError("bad header '" + csv::join_row(rows.front()) + "', expected " + wanted);
}

[[noreturn]] void report_bad_rows(const std::vector<std::string>& problems) {
    std::string msg = std::to_string(problems.size()) + " malformed row(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    throw FormatError(msg);
}

} // namespace

std::string to_string(Task task) {
    switch (task) {
    case Task::T1: return "T1";
    case Task::T2: return "T2";
    case Task::T3: return "T3";
    case Task::T4: return "T4";
    }
    throw OutOfRange("unknown task");
}

Task task_from_string(const std::string& text) {
    if (text == "T1") return Task::T1;
    if (text == "T2") return Task::T2;
    if (text == "T3") return Task::T3;
    if (text == "T4") return Task::T4;
    throw OutOfRange("unknown task '" + text + "'");
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::AMoreComplex: return "a_more_complex";
    case Verdict::BMoreComplex: return "b_more_complex";
    case Verdict::Equal: return "equal";
    }
    throw OutOfRange("unknown verdict");
}

Verdict verdict_from_string(const std::string& text) {
    if (text == "a_more_complex") return Verdict::AMoreComplex;
    if (text == "b_more_complex") return Verdict::BMoreComplex;
    if (text == "equal") return Verdict::Equal;
    throw OutOfRange("unknown verdict '" + text + "'");
}

std::vector<TaskResponse> ingest_study1(const std::string& csv_text) {
    const auto rows = csv::parse(csv_text);
    require_header(rows, {"participant", "chart", "task", "correct"});

    std::vector<TaskResponse> responses;
    std::vector<std::string> problems;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string at = "row " + std::to_string(r + 1);
        if (row.size() != 4) {
            problems.push_back(at + ": expected 4 fields, got " + std::to_string(row.size()));
            continue;
        }
        if (row[0].empty() || row[1].empty()) {
            problems.push_back(at + ": empty participant or chart id");
            continue;
        }
        TaskResponse response;
        response.participant = row[0];
        response.chart = row[1];
        try {
            response.task = task_from_string(row[2]);
        } catch (const OutOfRange&) {
            problems.push_back(at + ": unknown task '" + row[2] + "'");
            continue;
        }
        if (!parse_bool(row[3], response.correct)) {
            problems.push_back(at + ": correctness '" + row[3] + "' is not 0/1/true/false");
            continue;
        }
        responses.push_back(std::move(response));
    }
    if (!problems.empty()) report_bad_rows(problems);
    return responses;
}

std::vector<PairwiseResponse> ingest_study2(const std::string& csv_text) {
    const auto rows = csv::parse(csv_text);
    require_header(rows, {"participant", "chart_a", "chart_b", "verdict"});

    std::vector<PairwiseResponse> responses;
    std::vector<std::string> problems;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string at = "row " + std::to_string(r + 1);
        if (row.size() != 4) {
            problems.push_back(at + ": expected 4 fields, got " + std::to_string(row.size()));
            continue;
        }
        if (row[0].empty() || row[1].empty() || row[2].empty()) {
            problems.push_back(at + ": empty participant or chart id");
            continue;
        }
        if (row[1] == row[2]) {
            problems.push_back(at + ": chart compared to itself ('" + row[1] + "')");
            continue;
        }
        PairwiseResponse response;
        response.participant = row[0];
        response.chart_a = row[1];
        response.chart_b = row[2];
        try {
            response.verdict = verdict_from_string(row[3]);
        } catch (const OutOfRange&) {
            problems.push_back(at + ": unknown verdict '" + row[3] + "'");
            continue;
        }
        responses.push_back(std::move(response));
    }
    if (!problems.empty()) report_bad_rows(problems);
    return responses;
}

const TaskCell* AccuracyTable::cell(const std::string& chart, Task task) const {
    const auto it = cells.find(chart);
    if (it == cells.end()) return nullptr;
    const TaskCell& c = it->second[task_index(task)];
    return c.total > 0 ? &c : nullptr;
}

std::optional<double> AccuracyTable::task_accuracy(const std::string& chart, Task task) const {
    const TaskCell* c = cell(chart, task);
    if (!c) return std::nullopt;
    return c->accuracy();
}

std::optional<double> AccuracyTable::acc3(const std::string& chart) const {
    double sum = 0.0;
    for (Task task : {Task::T2, Task::T3, Task::T4}) {
        const auto a = task_accuracy(chart, task);
        if (!a) return std::nullopt;
        sum += *a;
    }
    return sum / 3.0;
}

std::optional<double> AccuracyTable::acc4(const std::string& chart) const {
    double sum = 0.0;
    for (Task task : {Task::T1, Task::T2, Task::T3, Task::T4}) {
        const auto a = task_accuracy(chart, task);
        if (!a) return std::nullopt;
        sum += *a;
    }
    return sum / 4.0;
}

std::vector<std::string> AccuracyTable::charts() const {
    std::vector<std::string> ids;
    ids.reserve(cells.size());
    for (const auto& [id, unused] : cells) ids.push_back(id);
    return ids;
}

TaskCell AccuracyTable::overall(Task task) const {
    TaskCell pooled;
    for (const auto& [id, row] : cells) {
        pooled.correct += row[task_index(task)].correct;
        pooled.total += row[task_index(task)].total;
    }
    return pooled;
}

double AccuracyTable::overall_stderr(Task task) const {
    const TaskCell pooled = overall(task);
    if (pooled.total == 0) return 0.0;
    const double p = pooled.accuracy();
    return std::sqrt(p * (1.0 - p) / pooled.total);
}

AccuracyTable accuracy_table(const std::vector<TaskResponse>& responses,
                             const std::vector<std::string>& exclude_charts) {
    const std::set<std::string> excluded(exclude_charts.begin(), exclude_charts.end());
    AccuracyTable table;
    for (const TaskResponse& response : responses) {
        if (excluded.count(response.chart)) continue;
        auto& row = table.cells[response.chart];
        TaskCell& c = row[task_index(response.task)];
        ++c.total;
        if (response.correct) ++c.correct;
    }
    if (table.cells.empty()) throw EmptyInput("no responses left to tally");
    return table;
}

std::map<std::string, int> perceived_complexity(const std::vector<PairwiseResponse>& responses,
                                                const std::vector<std::string>& roster) {
    std::map<std::string, int> scores;
    for (const std::string& id : roster) scores[id] = 0;
    for (const PairwiseResponse& response : responses) {
        scores.try_emplace(response.chart_a, 0);
        scores.try_emplace(response.chart_b, 0);
        switch (response.verdict) {
        case Verdict::AMoreComplex:
            scores[response.chart_a] += 10;
            scores[response.chart_b] -= 10;
            break;
        case Verdict::BMoreComplex:
            scores[response.chart_a] -= 10;
            scores[response.chart_b] += 10;
            break;
        case Verdict::Equal: break;
        }
    }
    return scores;
}

} // namespace alluvial
