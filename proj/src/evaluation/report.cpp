#include "thermovis/evaluation/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "thermovis/core/error.hpp"
#include "thermovis/core/hash.hpp"

namespace thermovis {

void finalize_result(ExperimentResult& r) {
    if (r.runs.empty()) throw Error(ErrorCode::invalid_argument, "experiment result without runs");
    const std::size_t len = r.runs.front().size();
    r.mean.assign(len, 0.0);
    for (const auto& run : r.runs) {
        if (run.size() != len) throw Error(ErrorCode::invalid_argument, "runs disagree in gallery subject count");
        for (std::size_t k = 0; k < len; ++k) r.mean[k] += run[k];
    }
    for (double& v : r.mean) v /= static_cast<double>(r.runs.size());
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "text" || text == "txt") return ReportFormat::text;
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    throw Error(ErrorCode::invalid_argument, "unknown report format '" + std::string(text) + "'");
}

std::string_view file_extension(ReportFormat f) {
    switch (f) {
        case ReportFormat::text: return "txt";
        case ReportFormat::csv: return "csv";
        case ReportFormat::json: return "json";
    }
    return "txt";
}

const std::vector<ReferenceRow>& reference_rows(std::string_view dataset) {
    static const std::vector<ReferenceRow> carl = {
        {"DPM", {56.33, 60.08, 71.0}},
        {"PLS", {31.75, 34.66, 51.58}},
        {"bilinear", {40.2, 45.8, 75.5}},
        {"bilinear (aligned)", {42.0, 48.75, 77.25}},
        {"upconv", {41.0, 49.75, 80.2}},
        {"upconv (aligned)", {43.75, 52.5, 82.5}},
        {"upconv + DoG", {46.8, 58.5, 82.5}},
        {"upconv + DoG (aligned)", {48.0, 60.25, 85.0}},
    };
    static const std::vector<ReferenceRow> undx1 = {
        {"DPM", {55.36, 60.83, 83.73}},
        {"PLS", {44.75, 50.89, 69.86}},
        {"bilinear", {42.0, 50.25, 75.4}},
        {"upconv", {49.25, 57.5, 82.0}},
        {"upconv + DoG", {58.75, 65.25, 87.2}},
    };
    static const std::vector<ReferenceRow> eurecom = {
        {"bilinear", {50.41, 58.5, 80.0}},
        {"upconv", {53.75, 61.25, 81.25}},
        {"upconv + DoG", {57.91, 70.0, 88.33}},
    };
    static const std::vector<ReferenceRow> none;
    if (dataset == "carl") return carl;
    if (dataset == "undx1") return undx1;
    if (dataset == "eurecom") return eurecom;
    return none;
}

nlohmann::json to_json(const ExperimentResult& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        nlohmann::json run = {{"cmc", r.runs[i]}};
        if (i < r.run_descriptors.size()) run["split"] = to_json(r.run_descriptors[i]);
        runs.push_back(std::move(run));
    }
    return {{"dataset", r.dataset},
            {"variant", r.variant},
            {"policy", std::string(to_string(r.policy))},
            {"config_fingerprint", r.config_fingerprint},
            {"descriptor_hash", r.descriptor_hash},
            {"runs", std::move(runs)},
            {"mean", r.mean}};
}

ExperimentResult experiment_result_from_json(const nlohmann::json& j) {
    ExperimentResult r;
    try {
        r.dataset = j.at("dataset").get<std::string>();
        r.variant = j.at("variant").get<std::string>();
        r.policy = parse_gallery_policy(j.at("policy").get<std::string>());
        r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        r.descriptor_hash = j.value("descriptor_hash", std::string());
        for (const auto& run : j.at("runs")) {
            r.runs.push_back(run.at("cmc").get<std::vector<double>>());
            if (run.contains("split")) r.run_descriptors.push_back(split_descriptor_from_json(run.at("split")));
        }
        r.mean = j.at("mean").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("experiment result: ") + e.what());
    }
    return r;
}

namespace {

struct Table {
    std::string dataset;
    std::vector<std::string> rows;
    std::map<std::pair<std::string, GalleryPolicy>, const ExperimentResult*> cells;
};

Table arrange(const std::vector<ExperimentResult>& results) {
    if (results.empty()) throw Error(ErrorCode::invalid_argument, "no results to report");
    Table t;
    t.dataset = results.front().dataset;
    for (const ExperimentResult& r : results) {
        if (r.dataset != t.dataset) {
            throw Error(ErrorCode::invalid_argument,
                        "mixed datasets in one table: '" + t.dataset + "' and '" + r.dataset + "'");
        }
        if (r.mean.empty()) throw Error(ErrorCode::invalid_argument, "result '" + r.variant + "' has no mean");
        if (std::find(t.rows.begin(), t.rows.end(), r.variant) == t.rows.end()) t.rows.push_back(r.variant);
        if (!t.cells.emplace(std::make_pair(r.variant, r.policy), &r).second) {
            throw Error(ErrorCode::invalid_argument, "duplicate result for '" + r.variant + "' / " +
                                                         std::string(column_label(r.policy)));
        }
    }
    return t;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
    return buf;
}

std::string pad(const std::string& s, std::size_t width, bool right = false) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

std::string emit_text(const Table& t) {
    const auto& refs = reference_rows(t.dataset);
    std::size_t label_w = 5;
    for (const auto& r : t.rows) label_w = std::max(label_w, r.size());
    for (const auto& r : refs) label_w = std::max(label_w, r.label.size());
    constexpr std::size_t col_w = 12;

    std::ostringstream out;
    out << "Rank-1 identification accuracy, dataset: " << t.dataset << "\n\n";
    out << pad("Model", label_w);
    for (GalleryPolicy p : kAllPolicies) out << " | " << pad(std::string(column_label(p)), col_w, true);
    out << "\n" << std::string(label_w, '-');
    for (std::size_t i = 0; i < 3; ++i) out << "-+-" << std::string(col_w, '-');
    out << "\n";
    for (const std::string& row : t.rows) {
        out << pad(row, label_w);
        std::size_t runs = 0;
        for (GalleryPolicy p : kAllPolicies) {
            auto it = t.cells.find({row, p});
            std::string cell = "-";
            if (it != t.cells.end()) {
                cell = percent(it->second->mean_rank1());
                runs = std::max(runs, it->second->runs.size());
            }
            out << " | " << pad(cell, col_w, true);
        }
        out << "   (" << runs << (runs == 1 ? " run" : " runs") << ")\n";
    }
    std::set<std::string> hashes;
    for (const auto& [key, r] : t.cells) {
        if (!r->descriptor_hash.empty()) hashes.insert(r->descriptor_hash);
    }
    if (!hashes.empty()) {
        out << "\nRun descriptors:";
        for (const auto& h : hashes) out << ' ' << h;
        out << "\n";
    }
    if (!refs.empty()) {
        out << "\nPublished reference values\n";
        for (const ReferenceRow& r : refs) {
            out << pad(r.label, label_w);
            for (double v : r.percent) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f%%", v);
                out << " | " << pad(buf, col_w, true);
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string emit_csv(const Table& t) {
    std::ostringstream out;
    out << "dataset,variant,policy,run,rank1,config_fingerprint,descriptor_hash\n";
    char buf[64];
    for (const std::string& row : t.rows) {
        for (GalleryPolicy p : kAllPolicies) {
            auto it = t.cells.find({row, p});
            if (it == t.cells.end()) continue;
            const ExperimentResult& r = *it->second;
            auto line = [&](const std::string& run, double v) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << r.dataset << ',' << '"' << r.variant << '"' << ',' << to_string(p) << ',' << run << ','
                    << buf << ',' << r.config_fingerprint << ',' << r.descriptor_hash << '\n';
            };
            for (std::size_t i = 0; i < r.runs.size(); ++i) line(std::to_string(i + 1), r.runs[i].front());
            line("mean", r.mean_rank1());
        }
    }
    return out.str();
}

std::string emit_json(const std::vector<ExperimentResult>& results, const Table& t) {
    nlohmann::json doc;
    doc["dataset"] = t.dataset;
    doc["results"] = nlohmann::json::array();
    for (const ExperimentResult& r : results) doc["results"].push_back(to_json(r));
    nlohmann::json refs = nlohmann::json::array();
    for (const ReferenceRow& r : reference_rows(t.dataset)) {
        refs.push_back({{"label", r.label}, {"percent", r.percent}});
    }
    doc["reference"] = std::move(refs);
    return canonical_json(doc) + "\n";
}

}  // namespace

std::string emit_report(const std::vector<ExperimentResult>& results, ReportFormat format) {
    const Table t = arrange(results);
    switch (format) {
        case ReportFormat::text: return emit_text(t);
        case ReportFormat::csv: return emit_csv(t);
        case ReportFormat::json: return emit_json(results, t);
    }
    return {};
}

std::vector<ExperimentResult> parse_report_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("report: ") + e.what());
    }
    if (!doc.contains("results") || !doc["results"].is_array()) {
        throw Error(ErrorCode::parse_error, "report: missing 'results' array");
    }
    std::vector<ExperimentResult> out;
    for (const auto& r : doc["results"]) out.push_back(experiment_result_from_json(r));
    return out;
}

}  // namespace thermovis
