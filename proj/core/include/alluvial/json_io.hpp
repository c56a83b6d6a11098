#pragma once

#include <string>
#include <vector>

#include "alluvial/bayes.hpp"
#include "alluvial/stats.hpp"
#include "alluvial/types.hpp"

namespace alluvial {

/// Dataset schema:
/// {"id": str, "columns": [int...],
///  "flows": [{"source": [col, slot], "target": [col, slot], "value": num}]}
std::string dataset_to_json(const AlluvialDataset& dataset);
/// Throws FormatError on malformed JSON, InvalidDataset on schema or
/// invariant violations.
AlluvialDataset dataset_from_json(const std::string& text);

/// Header `id,t,e,f,c,raw_score,normalized_score,class`; ids parallel to
/// reports.
std::string features_to_csv(const std::vector<std::string>& ids,
                            const std::vector<ComplexityReport>& reports);

struct FeatureRow {
    std::string id;
    FeatureVector features;
    double raw_score = 0.0;
    double normalized_score = 0.0;
    ComplexityClass cls = ComplexityClass::Easy;
};

std::vector<FeatureRow> features_from_csv(const std::string& text);

/// Weight keys w_t, w_e, w_f, w_c with per-weight SDs plus R-squared
/// summary and the fold protocol.
std::string cross_val_to_json(const CrossValReport& report);
CrossValReport cross_val_from_json(const std::string& text);

/// Plain weight set, same w_* keys, for hand-written inputs.
ModelWeights weights_from_json(const std::string& text);
std::string weights_to_json(const ModelWeights& weights);

/// Accuracy / RMSE summaries plus the mosaic as
/// {chart_id: {easy: p, medium: p, hard: p}} in chart_order.
std::string eval_report_to_json(const EvalReport& report);

} // namespace alluvial
