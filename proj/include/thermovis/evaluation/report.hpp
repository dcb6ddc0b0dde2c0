#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "thermovis/data/protocol.hpp"

namespace thermovis {

/// One table cell: a model variant evaluated under one gallery policy.
struct ExperimentResult {
    std::string dataset;
    std::string variant;  // row label, e.g. "upconv + DoG (aligned)"
    GalleryPolicy policy = GalleryPolicy::all_per_subject;
    std::string config_fingerprint;
    std::string descriptor_hash;  // run descriptor that produced the result
    std::vector<SplitDescriptor> run_descriptors;
    std::vector<std::vector<double>> runs;  // CMC per run, k = 1..S
    std::vector<double> mean;               // element-wise mean of `runs`

    double mean_rank1() const { return mean.empty() ? 0.0 : mean.front(); }
    bool operator==(const ExperimentResult&) const = default;
};

/// Fills `mean` from `runs`; throws when runs are empty or differ in length.
void finalize_result(ExperimentResult& r);

enum class ReportFormat { text, csv, json };
ReportFormat parse_report_format(std::string_view text);
std::string_view file_extension(ReportFormat f);

/// Published rank-1 percentages for the 1/2/all-per-subject columns.
struct ReferenceRow {
    std::string label;
    std::array<double, 3> percent;
};
/// Rows for "carl", "undx1" and "eurecom"; empty for any other dataset.
const std::vector<ReferenceRow>& reference_rows(std::string_view dataset);

/// Rows are variants in first-appearance order, columns the three gallery
/// policies. Text shows mean rank-1 percentages (and the reference rows),
/// CSV one line per run per cell plus a "mean" line, JSON the full records.
/// Throws for empty input, results from more than one dataset, or a repeated
/// (variant, policy) cell.
std::string emit_report(const std::vector<ExperimentResult>& results, ReportFormat format);

/// Inverse of the JSON form of emit_report.
std::vector<ExperimentResult> parse_report_json(std::string_view text);

nlohmann::json to_json(const ExperimentResult& r);
ExperimentResult experiment_result_from_json(const nlohmann::json& j);

}  // namespace thermovis
