#include "mree/compact_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mree {

const char *method_name(CloudMethod m) {
    switch (m) {
    case CloudMethod::given: return "given";
    case CloudMethod::sampled_grid: return "sampled_grid";
    case CloudMethod::hull_candidates: return "hull_candidates";
    case CloudMethod::exact: return "exact";
    case CloudMethod::support: return "support";
    case CloudMethod::selections: return "selections";
    }
    return "?";
}

CompactSetApprox CompactSetApprox::from_points(const std::vector<std::vector<double>> &pts, double resolution,
                                               bool convex_hint) {
    if (pts.empty()) throw std::invalid_argument("compact set approximation needs at least one point");
    CompactSetApprox c(pts.front().size(), resolution, convex_hint);
    for (const auto &p : pts) c.push(p);
    return c;
}

void CompactSetApprox::push(std::span<const double> x) {
    if (x.size() != dim_) throw std::invalid_argument("point dimension mismatch");
    coords_.insert(coords_.end(), x.begin(), x.end());
}

void CompactSetApprox::canonicalize(double quantum) {
    const std::size_t n = size();
    if (n <= 1) return;
    double scale = 1.0;
    for (double v : coords_) scale = std::max(scale, std::abs(v));
    const double q = quantum * scale;

    std::vector<long long> keys(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) keys[i] = std::llround(coords_[i] / q);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto key_less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(keys.begin() + a * dim_, keys.begin() + (a + 1) * dim_,
                                            keys.begin() + b * dim_, keys.begin() + (b + 1) * dim_);
    };
    auto key_eq = [&](std::size_t a, std::size_t b) {
        return std::equal(keys.begin() + a * dim_, keys.begin() + (a + 1) * dim_, keys.begin() + b * dim_);
    };
    // Stable so that the first-pushed representative of a cluster survives.
    std::stable_sort(order.begin(), order.end(), key_less);

    std::vector<double> out;
    out.reserve(coords_.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0 && key_eq(order[k], order[k - 1])) continue;
        auto p = point(order[k]);
        out.insert(out.end(), p.begin(), p.end());
    }
    coords_ = std::move(out);
}

std::vector<std::vector<double>> CompactSetApprox::points() const {
    std::vector<std::vector<double>> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        auto p = point(i);
        out.emplace_back(p.begin(), p.end());
    }
    return out;
}

} // namespace mree
