#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace thinprobe::cli {

struct SummaryRow {
    std::string experiment;
    double predicted = std::numeric_limits<double>::quiet_NaN();
    double measured = std::numeric_limits<double>::quiet_NaN();
    double tolerance = std::numeric_limits<double>::quiet_NaN();
    std::string verdict;  // PASS, FAIL or INFO
    std::string note;
};

nlohmann::json row_to_json(const SummaryRow& r);
SummaryRow row_from_json(const nlohmann::json& j);

// "{:.4g}", or "-" for NaN.
std::string fmt_num(double x);

// FAIL rows first, then PASS, then INFO; stable inside each group.
std::vector<SummaryRow> order_rows(std::vector<SummaryRow> rows);
std::string format_table(const std::vector<SummaryRow>& rows);

struct MergedReport {
    std::vector<SummaryRow> rows;
    std::string text;
    nlohmann::json json;
    int exit_code = 0;  // 2 when any row failed
};

// Reads summary.json from each run directory. Throws ConfigError on missing or corrupt artifacts.
MergedReport merge_runs(const std::vector<std::string>& dirs);

}  // namespace thinprobe::cli
