#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mree/config.hpp"
#include "mree/economy.hpp"
#include "mree/partition.hpp"
#include "mree/walras.hpp"

namespace mree {

// One price per state.
struct PriceSystem {
    std::vector<PriceVector> prices;

    std::size_t size() const { return prices.size(); }
    const PriceVector &operator[](std::size_t s) const { return prices[s]; }
    bool operator==(const PriceSystem &) const = default;
};

class PriceSystemError : public std::runtime_error {
public:
    PriceSystemError(const std::string &what, std::vector<std::string> failed, double best_residual)
        : std::runtime_error(what), failed_(std::move(failed)), best_residual_(best_residual) {}
    const std::vector<std::string> &failed_states() const { return failed_; }
    double best_residual() const { return best_residual_; }

private:
    std::vector<std::string> failed_;
    double best_residual_;
};

// Per-state equilibria in state order; states are solved concurrently when
// cfg.parallel is set. Throws PriceSystemError naming every failed state.
std::vector<StateEquilibrium> solve_all_states(const Economy &e, const Config &cfg = {});
PriceSystem build_price_system(const Economy &e, const Config &cfg = {});

// States grouped by the transitive closure of |pi(s) - pi(s')|_inf <= tol.
Partition sigma_pi_partition(const PriceSystem &pi, double tol_price);

struct InfoStructure {
    std::vector<Partition> joined; // per agent: own partition joined with sigma(pi)
    Partition sigma;
    double tol_price = 0.0;
};
InfoStructure info_structure(const Economy &e, const PriceSystem &pi, double tol_price);

// Agent t's plan: one bundle per state.
using Plan = std::vector<Bundle>;
Plan plan_of(const Allocation &f, std::size_t t);

// min over the agent's block containing s of the state utilities. Throws
// std::invalid_argument when the plan lacks a bundle for a block state.
double maximin_utility(const Economy &e, std::size_t t, std::size_t s, const Plan &plan, const InfoStructure &g);

// plan(s') within budget at pi(s') for every s' in the agent's block of s.
bool in_bree(const Economy &e, std::size_t t, std::size_t s, const PriceSystem &pi, const Plan &plan,
             const InfoStructure &g, double tol_budget = 1e-10);

struct DeviationSearch {
    int grid_n = 0;
    double best_improvement = 0.0;
    std::size_t agent = 0, state = 0; // where the best improvement was found
    std::vector<std::vector<double>> improvement; // [agent][state]
};

struct MaximinCertificate {
    std::vector<std::vector<double>> budget_residual; // [agent][state] <p,f> - <p,a>
    std::vector<Bundle> clearing_residual;            // per state
    double max_budget_residual = 0.0;
    double max_clearing_residual = 0.0;
    DeviationSearch deviation;
    InfoStructure info;
    bool budget_ok = false, clearing_ok = false, deviation_ok = false;
    bool pass = false;
};

// Budget membership, per-state clearing and a grid search for an improving
// plan in B^REE, for every (agent, state).
MaximinCertificate verify_maximin_ree(const Economy &e, const Allocation &f, const PriceSystem &pi,
                                      const Config &cfg = {});

struct MaximinResult {
    Allocation allocation;
    PriceSystem prices;
    std::vector<StateEquilibrium> equilibria;
    std::vector<std::pair<std::size_t, std::size_t>> repaired; // (agent, state) replaced by demand
    MaximinCertificate certificate;
};

// Per-state equilibria assembled into an allocation. Any bundle outside the
// agent's C^X at tol_pref is replaced by the agent's demand before the
// certificate is computed.
MaximinResult compute_maximin_ree(const Economy &e, const Config &cfg = {});

} // namespace mree
