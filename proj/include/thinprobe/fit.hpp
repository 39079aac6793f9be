#pragma once

#include <string>
#include <vector>

namespace thinprobe {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int used = 0;
};

// OLS of log(ys) against log(xs), skipping ys below floor.
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys, double floor = 1e-14);

struct SweepRow {
    double eps = 0.0;
    double s = 0.0;
    double re = 0.0, im = 0.0, abs = 0.0;
    double slope_so_far = 0.0;  // NaN until three usable points exist
};

struct SweepResult {
    std::string name;
    std::vector<SweepRow> rows;
    SlopeFit fit;
    double predicted = 0.0;  // NaN when the term has no registered exponent
    double tolerance = 0.15;
    bool degenerate = false;  // every value at the floor
    bool pass = false;
    std::string verdict;

    std::vector<double> eps() const;
    std::vector<double> values() const;
};

}  // namespace thinprobe
