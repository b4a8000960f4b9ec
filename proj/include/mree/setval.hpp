#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mree/compact_set.hpp"
#include "mree/config.hpp"
#include "mree/correspondences.hpp"
#include "mree/economy.hpp"

namespace mree {

using SetSequence = std::vector<CompactSetApprox>;

// Euclidean distance from x to the nearest cloud point.
double point_set_distance(std::span<const double> x, const CompactSetApprox &a);

// sup_{a in A} dist(a, B)
double directed_hausdorff(const CompactSetApprox &a, const CompactSetApprox &b);

// max of the two directed distances; exact on finite clouds.
double hausdorff_distance(const CompactSetApprox &a, const CompactSetApprox &b);

// max over `dirs` of |h_A(u) - h_B(u)| with h the support function. Equals the
// Hausdorff distance of the convex hulls once the directions are dense.
double support_hausdorff(const CompactSetApprox &a, const CompactSetApprox &b,
                         const std::vector<std::vector<double>> &dirs);

// Finite-window surrogates for the lower (Li) and upper (Ls) Kuratowski limits.
// Candidates are the union of all clouds; x is in Li when every one of the last
// `tail` sets comes within `tol` of x, and in Ls when at least one does.
// An empty optional is the explicit "empty set" marker.
struct KuratowskiLimits {
    std::optional<CompactSetApprox> lower;
    std::optional<CompactSetApprox> upper;
};
KuratowskiLimits kuratowski_limits(const SetSequence &seq, std::size_t tail, double tol);

class AumannError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AumannOptions {
    std::size_t combo_budget = 1'000'000;
    int support_directions = 720;
    std::vector<std::vector<double>> extra_directions;
    bool allow_sampling = true;
    int selection_samples = 20000;
    std::uint64_t seed = 20240607;
    bool force_support = false;

    static AumannOptions from(const Config &cfg);
};

// Unit directions used by the support-function route: offset angle grid in
// the plane, Fibonacci lattice on the sphere in higher dimension.
std::vector<std::vector<double>> direction_grid(std::size_t dim, int count);

// Weighted Minkowski sum sum_i w_i F_i over finite clouds. Ladder:
//   exact      all combinations, when the product of sizes fits combo_budget
//   support    per-direction support points, when every input is convex-hinted
//   selections seeded random selections, when allowed
CompactSetApprox aumann_integral(const std::vector<CompactSetApprox> &family, std::span<const double> weights,
                                 const AumannOptions &opts = {});

// Reduce a cloud to the lowest and highest point of every last-axis column.
// The convex hull, hence every support value, is unchanged.
CompactSetApprox column_extremes(const CompactSetApprox &a);

// True when every sampled cloud fits the point budget and the exact
// combination route is affordable at this resolution.
bool aggregate_is_exact(const Economy &e, std::size_t s, const PriceVector &p, double resolution,
                        const Config &cfg = {});

// Aggregate preferred set: Aumann integral of the sampled C^X over agents.
CompactSetApprox aggregate_preferred_set(const Economy &e, std::size_t s, const PriceVector &p, double resolution,
                                         const Config &cfg = {});

// Componentwise upper bound sum_i w_i b(t_i, s, p).
Bundle aggregate_truncation_bound(const Economy &e, std::size_t s, const PriceVector &p);

// H(aggregate at p_n, aggregate at p) for each p_n. Convex-hinted aggregates
// are compared through their support functions on 4x the support grid.
std::vector<double> continuity_probe(const Economy &e, std::size_t s, const std::vector<PriceVector> &p_seq,
                                     const PriceVector &p, double resolution, const Config &cfg = {});

} // namespace mree
