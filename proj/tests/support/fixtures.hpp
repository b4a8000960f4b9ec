#pragma once

#include <string>
#include <vector>

#include "mree/economy.hpp"

namespace mree::testing {

// Every agent has the same utility in every state and sees the full partition
// `info` (discrete when empty).
inline Economy make_economy(std::size_t goods, std::vector<double> probs, std::vector<double> weights,
                            std::vector<UtilitySpec> utility,
                            std::vector<std::vector<std::vector<double>>> endow /* [t][s] */) {
    Economy e;
    e.goods = goods;
    const std::size_t n = probs.size(), m = weights.size();
    for (std::size_t s = 0; s < n; ++s) e.states.ids.push_back("s" + std::to_string(s + 1));
    e.states.probs = std::move(probs);
    for (std::size_t t = 0; t < m; ++t) {
        e.agents.ids.push_back("t" + std::to_string(t + 1));
        e.partitions.push_back(Partition::discrete(n));
        e.utility.emplace_back(n, utility[t]);
        e.priors.emplace_back(std::nullopt);
    }
    e.agents.weights = std::move(weights);
    e.endowment = Endowment(m, n, goods);
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t s = 0; s < n; ++s) e.endowment.set_bundle(t, s, endow[t][s]);
    return e;
}

inline UtilitySpec cobb_douglas(std::vector<double> alpha) { return {Family::cobb_douglas_log, std::move(alpha)}; }
inline UtilitySpec linear(std::vector<double> c) { return {Family::linear, std::move(c)}; }
inline UtilitySpec log_shifted(std::vector<double> a) { return {Family::log_shifted, std::move(a)}; }
inline UtilitySpec ces(std::vector<double> w, double rho) { return {Family::ces, std::move(w), rho}; }

// Two-agent two-good Cobb-Douglas box: a1 = (1, 0), a2 = (0, 1). The
// clearing price satisfies p2 / p1 = (1 - alpha1) / alpha2.
inline Economy edgeworth(double alpha1 = 0.6, double alpha2 = 0.5) {
    return make_economy(2, {1.0}, {1.0, 1.0},
                        {cobb_douglas({alpha1, 1.0 - alpha1}), cobb_douglas({alpha2, 1.0 - alpha2})},
                        {{{1.0, 0.0}}, {{0.0, 1.0}}});
}

// Mirror images: agent 2 is agent 1 with the goods swapped.
inline Economy mirror_edgeworth(const UtilitySpec &u, std::vector<double> a1) {
    UtilitySpec v = u;
    std::swap(v.coeffs[0], v.coeffs[1]);
    return make_economy(2, {1.0}, {1.0, 1.0}, {u, v}, {{a1}, {{a1[1], a1[0]}}});
}

} // namespace mree::testing
