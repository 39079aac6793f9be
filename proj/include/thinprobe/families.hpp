#pragma once

#include <string>
#include <vector>

#include "thinprobe/cgo.hpp"
#include "thinprobe/geometry.hpp"
#include "thinprobe/identity.hpp"
#include "thinprobe/model.hpp"

namespace thinprobe {

// Recipe for a one-parameter (eps) family of manufactured pairs plus CGO probe.
struct FamilySpec {
    std::string name = "custom";
    int dim = 2;
    DomainKind kind = DomainKind::nozzle;
    std::string curve = "straight";
    std::vector<double> curve_params;
    double L = 1.0;
    double b1 = 0.0;
    double l = 1.0;

    ProbeCase probe_case = ProbeCase::a;
    AlphaPack alphas{0.9, 0.95, 0.95, 0.95};
    ProductChoice product = ProductChoice::theorem;
    double lambda = 1.0;
    double mu = 1.0;
    std::vector<double> d{-0.7071067811865476, -0.7071067811865476};

    std::string base_u = "trig";
    std::vector<double> base_params;
    std::string H = "identity";
    std::vector<double> H_params;
    bool H_c1 = false;
    Holder H_holder{0.5, 10.0};
    std::string F = "constant-advection";
    std::vector<double> F_params{1.0, 0.5};
    Holder F_holder{0.5, 10.0};
    PairSettings settings;

    double T1 = 0.0;
    double window_exponent = 2.0;  // T2 - T1 = eps^window_exponent
    std::vector<int> counts{17, 17, 9};
};

TermFamily make_family(const FamilySpec& spec);

// Named presets: I3-source, I5-cubic, I43-flux, theorem-a, theorem-b, adversarial.
FamilySpec family_preset(const std::string& name);
std::vector<std::string> family_preset_names();

}  // namespace thinprobe
