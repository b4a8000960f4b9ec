#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mree/compact_set.hpp"
#include "mree/config.hpp"
#include "mree/economy.hpp"

namespace mree {

class DemandError : public std::runtime_error {
public:
    DemandError(const std::string &what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class SamplingError : public std::runtime_error {
public:
    SamplingError(const std::string &what, double suggested_resolution)
        : std::runtime_error(what), suggested_(suggested_resolution) {}
    double suggested_resolution() const { return suggested_; }

private:
    double suggested_;
};

// Upper corner (gamma, ..., gamma) of the truncation box X = {x : 0 <= x <= upper},
// gamma = sum_h a^h / min_h p^h.
struct TruncationBox {
    double gamma = 0.0;
    Bundle upper;
};

double delta_min(const PriceVector &p);
double wealth(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p);
TruncationBox truncation_bound(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p);

bool in_budget(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, std::span<const double> x,
               double tol_budget = 1e-10);

// Closed-form maximizer of the agent's utility over the budget set. Linear
// utilities with several maximizing goods return the lexicographically
// smallest corner bundle.
Bundle demand(const UtilitySpec &u, const PriceVector &p, double wealth, const Config &cfg = {});
Bundle demand(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, const Config &cfg = {});

// Projected-gradient ascent on the budget frontier. Independent of the
// closed forms; throws DemandError after cfg.demand_max_iter iterations.
Bundle demand_numeric(const UtilitySpec &u, const PriceVector &p, double wealth, const Config &cfg = {});

// Goods whose bang-per-buck c_h/p_h is within the relative band `tol_tie` of
// the maximum. Only meaningful for linear utilities.
std::vector<std::size_t> linear_argmax_goods(const UtilitySpec &u, const PriceVector &p, double tol_tie);

// Membership oracle for C (preferred set) and C^X = C cap X at fixed (t, s, p).
class PreferredSet {
public:
    PreferredSet(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, const Config &cfg = {});

    bool contains(std::span<const double> x, bool truncated = true) const;

    const Bundle &demand_point() const { return demand_; }
    double demand_utility() const { return u_star_; }
    const TruncationBox &box() const { return box_; }
    const UtilitySpec &utility() const { return *spec_; }
    double threshold() const { return u_star_ - tol_pref_; }

private:
    const UtilitySpec *spec_;
    Bundle demand_;
    double u_star_;
    double tol_pref_;
    TruncationBox box_;
};

bool preferred_membership(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p,
                          std::span<const double> x, const Config &cfg = {}, bool truncated = true);

enum class SampleMode {
    full,           // every lattice point of the box inside C^X
    hull_candidates // lowest and highest member of each last-axis lattice column
};

// Lattice sample of C^X(t, s, p) at step `resolution`, with the demand point
// appended. Throws SamplingError when the point budget would be exceeded.
CompactSetApprox sample_preferred_set(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p,
                                      double resolution, const Config &cfg = {},
                                      SampleMode mode = SampleMode::full);

// Number of lattice points a full sample would enumerate.
double lattice_size(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, double resolution);

} // namespace mree
