#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "thinprobe/cli/report.hpp"
#include "thinprobe/cli/runner.hpp"
#include "thinprobe/cli/scenario.hpp"
#include "thinprobe/errors.hpp"

using namespace thinprobe::cli;

namespace {

int finish(const RunResult& r) {
    std::cout << format_table(r.rows);
    if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
    std::cout << "outputs: " << r.out_dir << "\n";
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thin-domain CGO probe experiments"};
    app.set_version_flag("--version", THINPROBE_VERSION);
    app.require_subcommand(1);

    RunOptions opt;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--eps-override", opt.eps_override, "replace the eps list (first entry is the single eps)")
            ->delimiter(',');
        sub->add_option("--quad-refine", opt.quad_refine, "refine every quadrature axis k times")
            ->check(CLI::Range(0, 4));
        sub->add_flag("--dump-fields", opt.dump_fields, "write solver fields as CSV");
        sub->add_option("--seed", seed, "override the scenario seed");
        sub->add_option("--out", opt.out_dir, "output directory");
    };

    CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the built-in consistency suite");
    add_common(selfcheck);

    std::string scenario_path;
    CLI::App* run = app.add_subcommand("run", "run one scenario file");
    run->add_option("file", scenario_path, "scenario (.toml)")->required();
    add_common(run);

    std::vector<std::string> dirs;
    std::string report_out;
    CLI::App* report = app.add_subcommand("report", "merge run directories into one summary");
    report->add_option("dirs", dirs, "run directories")->required();
    report->add_option("--out", report_out, "directory for report.txt and report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (CLI::App* sub : {selfcheck, run})
            if (sub->parsed() && sub->count("--seed")) opt.seed = seed;
        if (selfcheck->parsed()) return finish(run_scenario(selfcheck_scenario(), opt));
        if (run->parsed()) return finish(run_scenario(load_scenario(scenario_path), opt));
        const MergedReport m = merge_runs(dirs);
        std::cout << m.text;
        if (!report_out.empty()) {
            std::filesystem::create_directories(report_out);
            std::ofstream(std::filesystem::path(report_out) / "report.txt") << m.text;
            std::ofstream(std::filesystem::path(report_out) / "report.json") << m.json.dump(2) << "\n";
        }
        return m.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
