#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thinprobe/cli/report.hpp"
#include "thinprobe/cli/scenario.hpp"

namespace thinprobe::cli {

struct RunOptions {
    std::vector<double> eps_override;  // replaces eps (first entry) and eps_list
    int quad_refine = 0;
    bool dump_fields = false;
    std::optional<std::uint64_t> seed;
    std::string out_dir;  // overrides output.dir
    bool quiet = false;
};

struct RunResult {
    int exit_code = 0;  // 0 pass, 2 a check failed, 1 configuration or runtime error
    std::string out_dir;
    std::vector<SummaryRow> rows;
    std::map<std::string, std::string> files;  // name -> content, manifest excluded
    std::string error;
};

std::string sha256_hex(const std::string& data);

// Runs one scenario, writes its files plus summary.json and manifest.json.
RunResult run_scenario(Scenario sc, const RunOptions& opt);

// Built-in scenario used by the selfcheck subcommand.
Scenario selfcheck_scenario();

}  // namespace thinprobe::cli
