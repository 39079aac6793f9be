#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinprobe/families.hpp"

namespace thinprobe::cli {

struct SolverBlock {
    std::string mode = "mms";  // mms | heat | constant | pair
    int n = 9;                 // nodes per axis on the coarsest level
    int nt = 4;                // steps on the coarsest level
    int levels = 4;
    double T = 0.0;            // 0 means eps^2 / 128
    std::string exact = "smooth";
    double constant = 0.5;
    std::string perturbation = "source";  // pair mode: none | source | flux
    double delta = 0.1;
};

struct RdcBlock {
    std::vector<double> c0{1.0, 0.5};
    std::vector<double> A{0.0, -1.0, 1.0, 0.0};  // row-major dim x dim
    std::string reaction = "logistic";
    std::vector<double> reaction_params;
    double bump_amplitude = 1.0;
};

struct ExperimentBlock {
    std::string kind;  // selfcheck | identity | sweep | solve | theorem-check | rdc
    std::vector<std::string> terms;
    double tolerance = -1.0;  // negative: per-experiment default
    int refine_levels = 0;
    int samples = 1000;
};

struct OutputBlock {
    std::string dir;
    std::vector<std::string> formats{"json", "csv"};

    bool wants(const std::string& f) const;
};

struct Scenario {
    std::string name = "scenario";
    std::string path;
    std::string text;
    std::uint64_t seed = 1;
    FamilySpec family;
    double eps = 0.1;
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::string f = "zero";
    std::vector<double> f_params;
    SolverBlock solver;
    RdcBlock rdc;
    ExperimentBlock experiment;
    OutputBlock output;
};

// Throws ConfigError listing every schema violation by key path.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

}  // namespace thinprobe::cli
