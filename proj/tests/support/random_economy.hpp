#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mree/economy.hpp"

namespace mree::testing {

struct RandomEconomyOptions {
    std::size_t max_goods = 3;
    std::size_t max_states = 4;
    std::size_t max_agents = 5;
    std::vector<Family> families{Family::log_shifted, Family::linear, Family::ces};
    double duplicate_state_prob = 0.3; // copy an earlier state's data so sigma(pi) pools states
};

inline UtilitySpec random_utility(std::mt19937_64 &rng, std::size_t goods, const std::vector<Family> &families) {
    std::uniform_int_distribution<std::size_t> pick(0, families.size() - 1);
    std::uniform_real_distribution<double> coef(0.5, 3.0), rho(0.2, 0.8);
    UtilitySpec u;
    u.family = families[pick(rng)];
    u.coeffs.resize(goods);
    for (double &c : u.coeffs) c = coef(rng);
    if (u.family == Family::ces) u.rho = rho(rng);
    if (u.family == Family::cobb_douglas_log) {
        double sum = 0.0;
        for (double c : u.coeffs) sum += c;
        for (double &c : u.coeffs) c /= sum;
        // exponents must sum to 1 to rounding
        double rest = 1.0;
        for (std::size_t h = 0; h + 1 < goods; ++h) rest -= u.coeffs[h];
        u.coeffs.back() = rest;
    }
    return u;
}

inline Economy random_economy(std::uint64_t seed, const RandomEconomyOptions &opt = {}) {
    std::mt19937_64 rng(seed);
    auto upto = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    std::uniform_real_distribution<double> unit(0.0, 1.0), weight(0.5, 1.5), amount(0.0, 2.0);

    Economy e;
    e.goods = upto(2, opt.max_goods);
    const std::size_t n = upto(1, opt.max_states), m = upto(2, opt.max_agents);

    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        e.states.ids.push_back("w" + std::to_string(s + 1));
        e.states.probs.push_back(0.5 + unit(rng));
        total += e.states.probs.back();
    }
    double rest = 1.0;
    for (std::size_t s = 0; s + 1 < n; ++s) rest -= (e.states.probs[s] /= total);
    e.states.probs.back() = rest;

    for (std::size_t t = 0; t < m; ++t) {
        e.agents.ids.push_back("t" + std::to_string(t + 1));
        e.agents.weights.push_back(weight(rng));
        std::vector<std::vector<std::size_t>> blocks(upto(1, n));
        for (std::size_t s = 0; s < n; ++s) blocks[s < blocks.size() ? s : upto(0, blocks.size() - 1)].push_back(s);
        e.partitions.emplace_back(blocks, n);
        e.priors.emplace_back(std::nullopt);
    }

    e.utility.assign(m, std::vector<UtilitySpec>(n));
    e.endowment = Endowment(m, n, e.goods);
    for (std::size_t s = 0; s < n; ++s) {
        if (s > 0 && unit(rng) < opt.duplicate_state_prob) {
            const std::size_t src = upto(0, s - 1);
            for (std::size_t t = 0; t < m; ++t) {
                e.utility[t][s] = e.utility[t][src];
                e.endowment.set_bundle(t, s, e.endow(t, src));
            }
            continue;
        }
        for (std::size_t t = 0; t < m; ++t) {
            e.utility[t][s] = random_utility(rng, e.goods, opt.families);
            for (std::size_t h = 0; h < e.goods; ++h) e.endowment.at(t, s, h) = amount(rng);
        }
        // keep every good in positive aggregate supply
        for (std::size_t h = 0; h < e.goods; ++h) e.endowment.at(upto(0, m - 1), s, h) += 0.5;
    }
    return e;
}

// Uniform interior price with every coordinate at least `floor`.
inline PriceVector random_price(std::mt19937_64 &rng, std::size_t goods, double floor = 0.05) {
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> raw(goods);
    double sum = 0.0;
    for (double &v : raw) sum += (v = ex(rng));
    for (double &v : raw) v = floor + (1.0 - floor * static_cast<double>(goods)) * v / sum;
    return PriceVector::normalized(raw, 1e-9);
}

} // namespace mree::testing
