#pragma once

#include <vector>

namespace thinprobe {

struct AxisRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Composite Simpson on [a, b] with n nodes (n odd, n >= 3).
AxisRule simpson(double a, double b, int n);

// Node counts per axis, all odd. 2D: {n_x1, n_eta, n_t}; 3D: {n_cross, n_along, n_eta, n_t}.
struct QuadRule {
    std::vector<int> counts;

    static QuadRule make(std::vector<int> counts);
    // Each axis goes from n to (n-1)*2^k + 1 nodes.
    QuadRule refined(int k) const;
    int time_count() const { return counts.back(); }
};

}  // namespace thinprobe
