#include "qlof/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "qlof/errors.hpp"

namespace qlof {

using nlohmann::ordered_json;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string report_csv(const LofReport& report) {
    std::string out = "index,kdist,count,lrd,lof,flagged\n";
    for (const auto& p : report.points) {
        out += std::to_string(p.index) + ',' + format_double(p.kdist) + ',' + std::to_string(p.count) + ',' +
               format_double(p.lrd) + ',' + format_double(p.lof) + ',' + (p.flagged ? "1" : "0") + '\n';
    }
    return out;
}

namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line, std::size_t column) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ParseError("bad field '" + std::string(text) + "'", line, column);
    }
    return value;
}

} // namespace

LofReport read_report_csv(std::istream& in) {
    LofReport report;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty report", 1, 1);
    ++line_no;
    if (line != "index,kdist,count,lrd,lof,flagged") throw ParseError("unexpected report header", 1, 1);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 6) throw ParseError("expected 6 fields", line_no, 1);
        PointScore p;
        p.index = parse_field<std::size_t>(fields[0], line_no, 1);
        p.kdist = parse_field<double>(fields[1], line_no, 2);
        p.count = parse_field<std::size_t>(fields[2], line_no, 3);
        p.lrd = parse_field<double>(fields[3], line_no, 4);
        p.lof = parse_field<double>(fields[4], line_no, 5);
        const int flag = parse_field<int>(fields[5], line_no, 6);
        if (flag != 0 && flag != 1) throw ParseError("flag must be 0 or 1", line_no, 6);
        p.flagged = flag == 1;
        if (p.flagged) ++report.flagged_count;
        report.points.push_back(p);
    }
    return report;
}

ReportSummary summarize(const LofReport& report) {
    ReportSummary s;
    s.points = report.points.size();
    s.flagged = report.flagged_count;
    if (report.points.empty()) return s;
    std::vector<double> lofs;
    for (const auto& p : report.points) lofs.push_back(p.lof);
    s.max_lof = *std::max_element(lofs.begin(), lofs.end());
    s.min_lof = *std::min_element(lofs.begin(), lofs.end());
    s.mean_lof = ordered_sum(lofs) / static_cast<double>(lofs.size());
    return s;
}

namespace {

ordered_json dataset_json(const Dataset& ds) {
    return {{"m", ds.size()}, {"n", ds.dim()}, {"c_norm", ds.c_norm()}};
}

ordered_json config_json(const RunConfig& c) {
    return {{"k", c.k},
            {"delta", c.delta},
            {"backend", std::string(to_string(c.backend))},
            {"fp_width", c.fp_width},
            {"fp_frac", c.fp_frac},
            {"ae_qubits_dist", c.ae_qubits_dist},
            {"ae_qubits_count", c.ae_qubits_count},
            {"ae_qubits_lof", c.ae_qubits_lof},
            {"ae_repeats", c.ae_repeats},
            {"shots", c.shots},
            {"seed", c.seed},
            {"e_safety", c.e_safety},
            {"neighbor_tolerance", c.neighbor_tolerance}};
}

ordered_json budget_json(const ErrorBudget& b) {
    return {{"eps1", b.eps1},   {"eps2", b.eps2}, {"eps3", b.eps3},
            {"max_ratio", b.max_ratio}, {"E", b.E}, {"P", b.P},
            {"total_bound", b.total_bound}, {"vacuous", b.vacuous}};
}

} // namespace

std::string report_json(const LofReport& report, const Dataset& ds) {
    ordered_json j;
    j["schema"] = 1;
    j["mode"] = "classical";
    j["dataset"] = dataset_json(ds);
    j["k"] = report.k;
    j["delta"] = report.delta;
    j["flagged_count"] = report.flagged_count;
    j["flagged"] = report.flagged_indices();
    ordered_json pts = ordered_json::array();
    for (const auto& p : report.points) {
        pts.push_back({{"index", p.index},
                       {"kdist", p.kdist},
                       {"count", p.count},
                       {"lrd", p.lrd},
                       {"lof", p.lof},
                       {"flagged", p.flagged}});
    }
    j["points"] = std::move(pts);
    return j.dump(2) + "\n";
}

namespace {

ordered_json run_json(const QlofRun& run, const Dataset& ds, const LofReport* classical) {
    ordered_json j;
    j["schema"] = 1;
    j["mode"] = classical != nullptr ? "compare" : "quantum";
    j["config"] = config_json(run.config);
    j["dataset"] = dataset_json(ds);
    j["error_budget"] = budget_json(run.budget);

    std::vector<char> flagged(ds.size(), 0);
    for (std::size_t i : run.flags.indices) flagged[i] = 1;
    ordered_json pts = ordered_json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& row = run.step1.table[i];
        ordered_json p;
        p["index"] = i;
        p["kdist_estimate"] = row.kdist;
        p["neighbors"] = row.neighbors;
        p["count_estimate"] = run.step1.count_estimates[i];
        p["inverse_lrd"] = run.densities.inverse_lrd[i].decode();
        p["lof_quantum"] = run.lofs.lof[i];
        p["flagged_quantum"] = flagged[i] != 0;
        if (classical != nullptr) {
            const auto& c = classical->points[i];
            p["lof_classical"] = c.lof;
            p["error"] = std::abs(run.lofs.lof[i] - c.lof);
            p["bound"] = run.budget.total_bound;
            p["flagged_classical"] = c.flagged;
        }
        p["near_threshold"] = run.step1.near_threshold[i] != 0;
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    j["flagged_quantum"] = run.flags.indices;
    if (classical != nullptr) j["flagged_classical"] = classical->flagged_indices();

    ordered_json ledger = ordered_json::object();
    for (const auto& [key, value] : run.ledger.snapshot()) ledger[key] = value;
    j["ledger"] = std::move(ledger);
    j["ledger_totals"] = {{"step1", run.ledger.total("step1.q.")},
                          {"step2", run.ledger.total("step2.q.")},
                          {"step3", run.ledger.total("step3.q.")}};
    if (run.step2_spot_check) {
        j["step2_spot_check"] = *run.step2_spot_check;
    } else {
        j["step2_spot_check"] = nullptr;
    }
    j["warnings"] = run.warnings;
    return j;
}

} // namespace

std::string run_manifest_json(const QlofRun& run, const Dataset& ds, const LofReport* classical) {
    return run_json(run, ds, classical).dump(2) + "\n";
}

std::string comparison_manifest_json(const Comparison& cmp, const Dataset& ds) {
    ordered_json j = run_json(cmp.quantum, ds, &cmp.classical);
    j["flags_match"] = cmp.flags_match;
    j["margin_ok"] = cmp.margin_ok;
    j["near_threshold_points"] = cmp.near_threshold_points;
    j["max_lof_error"] = cmp.max_lof_error;
    j["all_within_bound"] = cmp.all_within_bound;
    return j.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

} // namespace qlof
