#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "qlof/dataset.hpp"
#include "qlof/lof_classical.hpp"
#include "qlof/pipeline.hpp"

namespace qlof {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// Header `index,kdist,count,lrd,lof,flagged`, one row per point.
std::string report_csv(const LofReport& report);
/// Reads a CSV written by report_csv. k and delta are not stored in the CSV
/// and stay zero. Throws ParseError on malformed input.
LofReport read_report_csv(std::istream& in);

std::string report_json(const LofReport& report, const Dataset& ds);

/// Summary statistics used to check report round trips.
struct ReportSummary {
    std::size_t points = 0;
    std::size_t flagged = 0;
    double mean_lof = 0.0;
    double max_lof = 0.0;
    double min_lof = 0.0;

    bool operator==(const ReportSummary&) const = default;
};

ReportSummary summarize(const LofReport& report);

/// Manifest for a quantum run, with the classical reference when given.
std::string run_manifest_json(const QlofRun& run, const Dataset& ds, const LofReport* classical = nullptr);
std::string comparison_manifest_json(const Comparison& cmp, const Dataset& ds);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace qlof
