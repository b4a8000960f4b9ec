#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mree {

// How a point cloud was produced. Aggregates carry the Aumann-integral route.
enum class CloudMethod { given, sampled_grid, hull_candidates, exact, support, selections };
const char *method_name(CloudMethod m);

// Finite point cloud standing in for a nonempty compact subset of the
// nonnegative orthant. Coordinates are stored flat, one point per `dim` run.
class CompactSetApprox {
public:
    CompactSetApprox() = default;
    explicit CompactSetApprox(std::size_t dim, double resolution = 0.0, bool convex_hint = false,
                              CloudMethod method = CloudMethod::given)
        : dim_(dim), resolution_(resolution), convex_hint_(convex_hint), method_(method) {}

    static CompactSetApprox from_points(const std::vector<std::vector<double>> &pts, double resolution = 0.0,
                                        bool convex_hint = false);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const { return coords_.empty(); }

    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    void push(std::span<const double> x);
    void reserve(std::size_t n) { coords_.reserve(n * dim_); }

    double resolution() const { return resolution_; }
    bool convex_hint() const { return convex_hint_; }
    CloudMethod method() const { return method_; }
    void set_method(CloudMethod m) { method_ = m; }
    void set_convex_hint(bool c) { convex_hint_ = c; }
    void set_resolution(double r) { resolution_ = r; }

    const std::vector<double> &coords() const { return coords_; }

    // Sort lexicographically and drop points that coincide after quantizing
    // to `quantum` (relative to the largest coordinate magnitude).
    void canonicalize(double quantum = 1e-12);

    std::vector<std::vector<double>> points() const;

private:
    std::size_t dim_ = 0;
    double resolution_ = 0.0;
    bool convex_hint_ = false;
    CloudMethod method_ = CloudMethod::given;
    std::vector<double> coords_;
};

} // namespace mree
