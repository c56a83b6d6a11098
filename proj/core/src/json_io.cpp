#include "alluvial/json_io.hpp"

#include <cstdio>

#include <json.hpp>

#include "alluvial/csv.hpp"

namespace alluvial {

namespace {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

std::string fixed(double value, int digits = 6) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

double number_at(const Json& node, const std::string& key) {
    if (!node.contains(key) || !node[key].is_number())
        throw FormatError("missing or non-numeric field '" + key + "'");
    return node[key].get<double>();
}

Json weights_object(const ModelWeights& weights) {
    Json obj;
    obj["w_t"] = weights.timesteps;
    obj["w_e"] = weights.entities;
    obj["w_f"] = weights.flow_arcs;
    obj["w_c"] = weights.crossings;
    return obj;
}

ModelWeights weights_from_object(const Json& obj) {
    ModelWeights weights;
    weights.timesteps = number_at(obj, "w_t");
    weights.entities = number_at(obj, "w_e");
    weights.flow_arcs = number_at(obj, "w_f");
    weights.crossings = number_at(obj, "w_c");
    weights.label = WeightLabel::Custom;
    return weights;
}

} // namespace

std::string dataset_to_json(const AlluvialDataset& dataset) {
    Json doc;
    doc["id"] = dataset.id();
    doc["columns"] = dataset.columns();
    Json flows = Json::array();
    for (const Flow& flow : dataset.flows()) {
        Json item;
        item["source"] = {flow.source.column, flow.source.slot};
        item["target"] = {flow.target.column, flow.target.slot};
        item["value"] = flow.value;
        flows.push_back(std::move(item));
    }
    doc["flows"] = std::move(flows);
    return doc.dump(2) + "\n";
}

AlluvialDataset dataset_from_json(const std::string& text) {
    const Json doc = parse_json(text);
    if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string())
        throw InvalidDataset("dataset needs a string 'id'");
    if (!doc.contains("columns") || !doc["columns"].is_array() || doc["columns"].empty())
        throw InvalidDataset("dataset needs a non-empty 'columns' array");
    std::vector<int> columns;
    for (const auto& entry : doc["columns"]) {
        if (!entry.is_number_integer()) throw InvalidDataset("column sizes must be integers");
        columns.push_back(entry.get<int>());
    }
    if (!doc.contains("flows") || !doc["flows"].is_array())
        throw InvalidDataset("dataset needs a 'flows' array");
    std::vector<Flow> flows;
    auto ref_of = [](const Json& node, const char* key) {
        if (!node.contains(key) || !node[key].is_array() || node[key].size() != 2 ||
            !node[key][0].is_number_integer() || !node[key][1].is_number_integer())
            throw InvalidDataset(std::string("flow '") + key + "' must be [column, slot]");
        return EntityRef{node[key][0].get<int>(), node[key][1].get<int>()};
    };
    for (const auto& item : doc["flows"]) {
        if (!item.is_object()) throw InvalidDataset("flows must be objects");
        Flow flow;
        flow.source = ref_of(item, "source");
        flow.target = ref_of(item, "target");
        if (!item.contains("value") || !item["value"].is_number())
            throw InvalidDataset("flow needs a numeric 'value'");
        flow.value = item["value"].get<double>();
        flows.push_back(flow);
    }
    return AlluvialDataset(doc["id"].get<std::string>(), std::move(columns), std::move(flows));
}

std::string features_to_csv(const std::vector<std::string>& ids,
                            const std::vector<ComplexityReport>& reports) {
    if (ids.size() != reports.size())
        throw FormatError("id count " + std::to_string(ids.size()) + " does not match report count " +
                          std::to_string(reports.size()));
    std::string out = "id,t,e,f,c,raw_score,normalized_score,class\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const ComplexityReport& r = reports[i];
        out += csv::join_row({ids[i], std::to_string(r.features.timesteps),
                              std::to_string(r.features.entities),
                              std::to_string(r.features.flow_arcs),
                              std::to_string(r.features.crossings), fixed(r.raw_score),
                              fixed(r.normalized_score), std::string(to_string(r.cls))}) +
               "\n";
    }
    return out;
}

std::vector<FeatureRow> features_from_csv(const std::string& text) {
    const auto rows = csv::parse(text);
    const std::vector<std::string> header = {"id", "t", "e", "f", "c", "raw_score",
                                             "normalized_score", "class"};
    if (rows.empty() || rows.front() != header)
        throw FormatError("bad features header, expected " + csv::join_row(header));
    std::vector<FeatureRow> parsed;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw FormatError("row " + std::to_string(r + 1) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(row.size()));
        FeatureRow parsed_row;
        parsed_row.id = row[0];
        try {
            parsed_row.features.timesteps = std::stoi(row[1]);
            parsed_row.features.entities = std::stoi(row[2]);
            parsed_row.features.flow_arcs = std::stoi(row[3]);
            parsed_row.features.crossings = std::stoi(row[4]);
            parsed_row.raw_score = std::stod(row[5]);
            parsed_row.normalized_score = std::stod(row[6]);
        } catch (const std::exception&) {
            throw FormatError("row " + std::to_string(r + 1) + ": non-numeric feature field");
        }
        try {
            parsed_row.cls = complexity_class_from_string(row[7]);
        } catch (const OutOfRange& e) {
            throw FormatError("row " + std::to_string(r + 1) + ": " + e.what());
        }
        parsed.push_back(std::move(parsed_row));
    }
    return parsed;
}

std::string cross_val_to_json(const CrossValReport& report) {
    Json doc;
    doc["label"] = std::string(to_string(report.mean_weights.label));
    doc["weights"] = weights_object(report.mean_weights);
    doc["sd"] = weights_object(report.weight_sd);
    doc["r_squared"] = {{"mean", report.r_squared_mean}, {"sd", report.r_squared_sd}};
    doc["k"] = report.k;
    doc["repeats"] = report.repeats;
    doc["folds"] = report.fold_weights.size();
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

CrossValReport cross_val_from_json(const std::string& text) {
    const Json doc = parse_json(text);
    if (!doc.is_object() || !doc.contains("weights") || !doc.contains("sd"))
        throw FormatError("cross-validation JSON needs 'weights' and 'sd'");
    CrossValReport report;
    report.mean_weights = weights_from_object(doc["weights"]);
    report.weight_sd = weights_from_object(doc["sd"]);
    if (doc.contains("label") && doc["label"].is_string())
        report.mean_weights.label = weight_label_from_string(doc["label"].get<std::string>());
    if (doc.contains("r_squared") && doc["r_squared"].is_object()) {
        report.r_squared_mean = number_at(doc["r_squared"], "mean");
        report.r_squared_sd = number_at(doc["r_squared"], "sd");
    }
    if (doc.contains("k")) report.k = doc["k"].get<int>();
    if (doc.contains("repeats")) report.repeats = doc["repeats"].get<int>();
    if (doc.contains("warnings") && doc["warnings"].is_array())
        for (const auto& warning : doc["warnings"])
            if (warning.is_string()) report.warnings.push_back(warning.get<std::string>());
    return report;
}

ModelWeights weights_from_json(const std::string& text) {
    const Json doc = parse_json(text);
    if (!doc.is_object()) throw FormatError("weights JSON must be an object");
    const Json& obj = doc.contains("weights") ? doc["weights"] : doc;
    ModelWeights weights = weights_from_object(obj);
    if (doc.contains("label") && doc["label"].is_string())
        weights.label = weight_label_from_string(doc["label"].get<std::string>());
    return weights;
}

std::string weights_to_json(const ModelWeights& weights) {
    Json doc = weights_object(weights);
    doc["label"] = std::string(to_string(weights.label));
    return doc.dump(2) + "\n";
}

std::string eval_report_to_json(const EvalReport& report) {
    Json doc;
    doc["accuracy"] = {{"mean", report.accuracy_mean}, {"sd", report.accuracy_sd}};
    doc["rmse"] = {{"mean", report.rmse_mean}, {"sd", report.rmse_sd}};
    doc["k"] = report.k;
    doc["repeats"] = report.repeats;
    Json mosaic;
    for (const std::string& id : report.chart_order) {
        const auto& row = report.mosaic.at(id);
        mosaic[id] = {{"easy", row[0]}, {"medium", row[1]}, {"hard", row[2]}};
    }
    doc["mosaic"] = std::move(mosaic);
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

} // namespace alluvial
