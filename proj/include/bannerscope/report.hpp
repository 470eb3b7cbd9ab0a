#pragma once

#include "bannerscope/pipeline.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bannerscope::pipeline {

inline constexpr int kReportSchemaVersion = 1;

struct ReportInfo {
    std::string mode = "scan"; // "scan" or "analyze"
    std::optional<double> threshold;
    std::optional<std::string> model_fingerprint;
};

/// `{schema_version, ..., entries: [...]}`; byte-identical for equal input.
std::string report_to_json(const std::vector<ScanResult>& results, const ReportInfo& info);

/// Only the entries with findings, in the report's entry format.
std::string findings_to_json(const std::vector<ScanResult>& results);

} // namespace bannerscope::pipeline
