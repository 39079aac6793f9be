#include "thinprobe/quadrature.hpp"

#include <string>

#include "thinprobe/errors.hpp"

namespace thinprobe {

AxisRule simpson(double a, double b, int n) {
    if (n < 3 || n % 2 == 0)
        throw DomainError("simpson: node count must be odd and >= 3, got " + std::to_string(n));
    AxisRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double h = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = (i == n - 1) ? b : a + i * h;
        double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        r.weights[i] = w * h / 3.0;
    }
    return r;
}

QuadRule QuadRule::make(std::vector<int> counts) {
    if (counts.size() != 3 && counts.size() != 4)
        throw DomainError("QuadRule: expected 3 (2D) or 4 (3D) axis counts");
    for (int c : counts)
        if (c < 3 || c % 2 == 0)
            throw DomainError("QuadRule: axis counts must be odd and >= 3");
    return QuadRule{std::move(counts)};
}

QuadRule QuadRule::refined(int k) const {
    QuadRule r = *this;
    for (int& c : r.counts) c = (c - 1) * (1 << k) + 1;
    return r;
}

}  // namespace thinprobe
