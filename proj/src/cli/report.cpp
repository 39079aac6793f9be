#include "thinprobe/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "thinprobe/errors.hpp"

namespace thinprobe::cli {

namespace {

nlohmann::json num_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

double num_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.at(key).get<double>();
}

int rank(const std::string& verdict) {
    if (verdict == "FAIL") return 0;
    if (verdict == "PASS") return 1;
    return 2;
}

}  // namespace

nlohmann::json row_to_json(const SummaryRow& r) {
    return {{"experiment", r.experiment},  {"predicted", num_or_null(r.predicted)},
            {"measured", num_or_null(r.measured)}, {"tolerance", num_or_null(r.tolerance)},
            {"verdict", r.verdict},        {"note", r.note}};
}

SummaryRow row_from_json(const nlohmann::json& j) {
    SummaryRow r;
    r.experiment = j.at("experiment").get<std::string>();
    r.predicted = num_from(j, "predicted");
    r.measured = num_from(j, "measured");
    r.tolerance = num_from(j, "tolerance");
    r.verdict = j.at("verdict").get<std::string>();
    if (j.contains("note")) r.note = j.at("note").get<std::string>();
    if (r.verdict != "PASS" && r.verdict != "FAIL" && r.verdict != "INFO")
        throw ConfigError("summary row '" + r.experiment + "' has unknown verdict '" + r.verdict + "'");
    return r;
}

std::string fmt_num(double x) { return std::isfinite(x) ? fmt::format("{:.4g}", x) : "-"; }

std::vector<SummaryRow> order_rows(std::vector<SummaryRow> rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SummaryRow& a, const SummaryRow& b) { return rank(a.verdict) < rank(b.verdict); });
    return rows;
}

std::string format_table(const std::vector<SummaryRow>& rows) {
    size_t w = std::string("experiment").size();
    for (const auto& r : rows) w = std::max(w, r.experiment.size());
    std::string out = fmt::format("{:<{}}  {:>10}  {:>10}  {:>10}  {}\n", "experiment", w, "predicted", "measured",
                                  "tolerance", "verdict");
    for (const auto& r : order_rows(rows)) {
        out += fmt::format("{:<{}}  {:>10}  {:>10}  {:>10}  {}", r.experiment, w, fmt_num(r.predicted),
                           fmt_num(r.measured), fmt_num(r.tolerance), r.verdict);
        if (!r.note.empty()) out += "  (" + r.note + ")";
        out += "\n";
    }
    return out;
}

MergedReport merge_runs(const std::vector<std::string>& dirs) {
    if (dirs.empty()) throw ConfigError("report: need at least one run directory");
    MergedReport m;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& d : dirs) {
        const auto path = std::filesystem::path(d) / "summary.json";
        std::ifstream in(path);
        if (!in) throw ConfigError("report: missing " + path.string());
        nlohmann::json j;
        try {
            in >> j;
            const auto& rows = j.at("rows");
            for (const auto& r : rows) m.rows.push_back(row_from_json(r));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("report: corrupt " + path.string() + ": " + e.what());
        }
        runs.push_back({{"dir", d}, {"scenario", j.value("scenario", "")}, {"pass", j.value("pass", false)}});
    }
    m.rows = order_rows(m.rows);
    m.text = format_table(m.rows);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : m.rows) {
        rows.push_back(row_to_json(r));
        if (r.verdict == "FAIL") m.exit_code = 2;
    }
    m.json = {{"runs", runs}, {"rows", rows}, {"pass", m.exit_code == 0}};
    return m;
}

}  // namespace thinprobe::cli
