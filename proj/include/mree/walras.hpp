#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mree/config.hpp"
#include "mree/correspondences.hpp"
#include "mree/economy.hpp"

namespace mree {

// Equilibrium of the deterministic economy of one state.
struct StateEquilibrium {
    std::size_t state = 0;
    PriceVector price;
    std::vector<Bundle> allocation; // per agent
    Bundle clearing_residual;       // sum_i w_i (f_i - a_i)
    int iterations = 0;
    std::string method;
    std::uint64_t trajectory_hash = 0;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string &what, double best_residual, PriceVector last)
        : std::runtime_error(what), best_residual_(best_residual), last_(std::move(last)) {}
    double best_residual() const { return best_residual_; }
    const PriceVector &last_iterate() const { return last_; }

private:
    double best_residual_;
    PriceVector last_;
};

// z(s, p) = sum_i w_i (demand_i - a_i), using the point-valued demand.
Bundle excess_demand(const Economy &e, std::size_t s, const PriceVector &p, const Config &cfg = {});

// A point of the set-valued aggregate excess demand. Agents with a unique
// maximizer get their demand; linear agents indifferent between several goods
// get the point of their argmax face that brings the aggregate closest to
// clearing.
struct DemandSelection {
    std::vector<Bundle> bundles;
    Bundle residual;
};
DemandSelection clearing_selection(const Economy &e, std::size_t s, const PriceVector &p, const Config &cfg = {});

double sup_norm(std::span<const double> v);

// Damped tatonnement from the uniform price with a homotopy fallback.
// Throws SolverError when neither reaches cfg.tol_clear within cfg.max_iter.
StateEquilibrium solve_state_equilibrium(const Economy &e, std::size_t s, const Config &cfg = {});

// dist(0, aggregate preferred set - aggregate endowment).
struct ExcessCertificate {
    double distance = 0.0;
    std::string method; // "exact" or "local_selection"
    Bundle aggregate_point;
};
ExcessCertificate aggregate_excess_certificate(const Economy &e, std::size_t s, const PriceVector &p,
                                               double resolution, const Config &cfg = {});

} // namespace mree
