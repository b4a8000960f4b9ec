#include "mree/maximin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>

#include "mree/correspondences.hpp"

namespace mree {

std::vector<StateEquilibrium> solve_all_states(const Economy &e, const Config &cfg) {
    const std::size_t k = e.states.size();
    std::vector<StateEquilibrium> out(k);
    std::vector<std::string> failed;
    std::string detail;
    double worst = 0.0;

    auto record = [&](std::size_t s, const SolverError &err) {
        failed.push_back(e.states.ids[s]);
        detail += std::string(detail.empty() ? "" : "; ") + err.what();
        worst = std::max(worst, err.best_residual());
    };

    if (cfg.parallel && k > 1) {
        std::vector<std::future<StateEquilibrium>> jobs;
        for (std::size_t s = 0; s < k; ++s)
            jobs.push_back(std::async(std::launch::async, [&e, &cfg, s] { return solve_state_equilibrium(e, s, cfg); }));
        for (std::size_t s = 0; s < k; ++s) {
            try {
                out[s] = jobs[s].get();
            } catch (const SolverError &err) {
                record(s, err);
            }
        }
    } else {
        for (std::size_t s = 0; s < k; ++s) {
            try {
                out[s] = solve_state_equilibrium(e, s, cfg);
            } catch (const SolverError &err) {
                record(s, err);
            }
        }
    }
    if (!failed.empty()) throw PriceSystemError("equilibrium search failed: " + detail, failed, worst);
    return out;
}

PriceSystem build_price_system(const Economy &e, const Config &cfg) {
    PriceSystem pi;
    for (auto &eq : solve_all_states(e, cfg)) pi.prices.push_back(std::move(eq.price));
    return pi;
}

Partition sigma_pi_partition(const PriceSystem &pi, double tol_price) {
    const std::size_t k = pi.size();
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            double d = 0.0;
            for (std::size_t h = 0; h < pi[a].size(); ++h) d = std::max(d, std::abs(pi[a][h] - pi[b][h]));
            if (d <= tol_price) parent[find(a)] = find(b);
        }
    std::vector<std::vector<std::size_t>> blocks;
    std::vector<std::size_t> slot(k, k);
    for (std::size_t s = 0; s < k; ++s) {
        std::size_t r = find(s);
        if (slot[r] == k) {
            slot[r] = blocks.size();
            blocks.emplace_back();
        }
        blocks[slot[r]].push_back(s);
    }
    return Partition(std::move(blocks), k);
}

InfoStructure info_structure(const Economy &e, const PriceSystem &pi, double tol_price) {
    InfoStructure g;
    g.sigma = sigma_pi_partition(pi, tol_price);
    g.tol_price = tol_price;
    for (const auto &f : e.partitions) g.joined.push_back(join_partitions(f, g.sigma));
    return g;
}

Plan plan_of(const Allocation &f, std::size_t t) {
    Plan plan(f.states());
    for (std::size_t s = 0; s < f.states(); ++s) {
        auto b = f.bundle(t, s);
        plan[s].assign(b.begin(), b.end());
    }
    return plan;
}

double maximin_utility(const Economy &e, std::size_t t, std::size_t s, const Plan &plan, const InfoStructure &g) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t r : g.joined.at(t).block_of(s)) {
        if (r >= plan.size() || plan[r].size() != e.goods)
            throw std::invalid_argument("plan has no bundle for state " + e.states.ids[r]);
        v = std::min(v, utility_value(e.spec(t, r), plan[r]));
    }
    return v;
}

bool in_bree(const Economy &e, std::size_t t, std::size_t s, const PriceSystem &pi, const Plan &plan,
             const InfoStructure &g, double tol_budget) {
    for (std::size_t r : g.joined.at(t).block_of(s))
        if (r >= plan.size() || !in_budget(e, t, r, pi[r], plan[r], tol_budget)) return false;
    return true;
}

namespace {

// Utilities of the deviation candidates in one state: the budget frontier at
// grid step 1/n (expenditure shares on the simplex grid) and the demand point.
std::vector<double> candidate_values(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, int n,
                                     const Config &cfg) {
    const std::size_t l = e.goods;
    const UtilitySpec &u = e.spec(t, s);
    const double w = wealth(e, t, s, p);
    std::vector<double> vals;
    vals.push_back(utility_value(u, demand(u, p, w, cfg)));
    if (w <= 0.0) return vals;

    std::vector<int> k(l, 0);
    Bundle x(l);
    // enumerate compositions k_1 + ... + k_l = n
    auto emit = [&] {
        for (std::size_t h = 0; h < l; ++h) x[h] = static_cast<double>(k[h]) / n * w / p[h];
        vals.push_back(utility_value(u, x));
    };
    if (l == 1) {
        k[0] = n;
        emit();
        return vals;
    }
    std::function<void(std::size_t, int)> rec = [&](std::size_t h, int left) {
        if (h + 1 == l) {
            k[h] = left;
            emit();
            return;
        }
        for (int v = 0; v <= left; ++v) {
            k[h] = v;
            rec(h + 1, left - v);
        }
    };
    rec(0, n);
    return vals;
}

// max over candidate plans on the block of the min over block states.
double best_maximin(const std::vector<std::vector<double>> &cands, std::size_t combo_budget) {
    double product = 1.0;
    for (const auto &c : cands) product *= static_cast<double>(c.size());
    if (product > static_cast<double>(combo_budget)) {
        // The objective separates across states: the best plan picks each
        // state's best candidate.
        double v = std::numeric_limits<double>::infinity();
        for (const auto &c : cands) v = std::min(v, *std::max_element(c.begin(), c.end()));
        return v;
    }
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(cands.size(), 0);
    for (;;) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cands.size(); ++i) v = std::min(v, cands[i][idx[i]]);
        best = std::max(best, v);
        std::size_t i = 0;
        while (i < cands.size()) {
            if (++idx[i] < cands[i].size()) break;
            idx[i] = 0;
            ++i;
        }
        if (i == cands.size()) break;
    }
    return best;
}

std::vector<double> agent_improvements(const Economy &e, std::size_t t, const Allocation &f, const PriceSystem &pi,
                                       const InfoStructure &g, const Config &cfg) {
    const std::size_t k = e.states.size();
    std::vector<std::vector<double>> cands(k);
    for (std::size_t s = 0; s < k; ++s) cands[s] = candidate_values(e, t, s, pi[s], cfg.grid_n, cfg);
    const Plan plan = plan_of(f, t);

    std::vector<double> out(k, 0.0);
    for (const auto &block : g.joined[t].blocks()) {
        std::vector<std::vector<double>> block_cands;
        for (std::size_t r : block) block_cands.push_back(cands[r]);
        const double best = best_maximin(block_cands, cfg.deviation_combo_budget);
        const double current = maximin_utility(e, t, block.front(), plan, g);
        double imp;
        if (best == current) imp = 0.0; // also covers both infinite
        else imp = best - current;
        for (std::size_t r : block) out[r] = imp;
    }
    return out;
}

} // namespace

MaximinCertificate verify_maximin_ree(const Economy &e, const Allocation &f, const PriceSystem &pi,
                                      const Config &cfg) {
    const std::size_t m = e.agents.size(), k = e.states.size(), l = e.goods;
    if (f.agents() != m || f.states() != k || f.goods() != l || pi.size() != k)
        throw std::invalid_argument("allocation or price system does not match the economy's dimensions");

    MaximinCertificate c;
    c.info = info_structure(e, pi, cfg.tol_price);

    c.budget_residual.assign(m, std::vector<double>(k, 0.0));
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t s = 0; s < k; ++s) {
            double r = dot(pi[s].span(), f.bundle(t, s)) - dot(pi[s].span(), e.endow(t, s));
            c.budget_residual[t][s] = r;
            c.max_budget_residual = std::max(c.max_budget_residual, r);
        }

    for (std::size_t s = 0; s < k; ++s) {
        Bundle z(l, 0.0);
        for (std::size_t t = 0; t < m; ++t) {
            auto x = f.bundle(t, s);
            auto a = e.endow(t, s);
            for (std::size_t h = 0; h < l; ++h) z[h] += e.agents.weights[t] * (x[h] - a[h]);
        }
        c.max_clearing_residual = std::max(c.max_clearing_residual, sup_norm(z));
        c.clearing_residual.push_back(std::move(z));
    }

    c.deviation.grid_n = cfg.grid_n;
    c.deviation.improvement.resize(m);
    if (cfg.parallel && m > 1) {
        std::vector<std::future<std::vector<double>>> jobs;
        for (std::size_t t = 0; t < m; ++t)
            jobs.push_back(std::async(std::launch::async,
                                      [&, t] { return agent_improvements(e, t, f, pi, c.info, cfg); }));
        for (std::size_t t = 0; t < m; ++t) c.deviation.improvement[t] = jobs[t].get();
    } else {
        for (std::size_t t = 0; t < m; ++t) c.deviation.improvement[t] = agent_improvements(e, t, f, pi, c.info, cfg);
    }
    c.deviation.best_improvement = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t s = 0; s < k; ++s)
            if (c.deviation.improvement[t][s] > c.deviation.best_improvement) {
                c.deviation.best_improvement = c.deviation.improvement[t][s];
                c.deviation.agent = t;
                c.deviation.state = s;
            }

    // NaN residuals must fail, hence the negated comparisons.
    c.budget_ok = true;
    for (const auto &row : c.budget_residual)
        for (double r : row)
            if (!(r <= cfg.tol_budget)) c.budget_ok = false;
    c.clearing_ok = true;
    for (const auto &z : c.clearing_residual)
        if (!(sup_norm(z) <= cfg.tol_clear)) c.clearing_ok = false;
    c.deviation_ok = c.deviation.best_improvement <= cfg.tol_dev;
    c.pass = c.budget_ok && c.clearing_ok && c.deviation_ok;
    return c;
}

MaximinResult compute_maximin_ree(const Economy &e, const Config &cfg) {
    MaximinResult r;
    r.equilibria = solve_all_states(e, cfg);
    const std::size_t m = e.agents.size(), k = e.states.size();
    r.allocation = Allocation(m, k, e.goods);
    for (std::size_t s = 0; s < k; ++s) {
        const auto &eq = r.equilibria[s];
        r.prices.prices.push_back(eq.price);
        for (std::size_t t = 0; t < m; ++t) {
            PreferredSet pref(e, t, s, eq.price, cfg);
            if (pref.contains(eq.allocation[t])) {
                r.allocation.set_bundle(t, s, eq.allocation[t]);
            } else {
                r.allocation.set_bundle(t, s, pref.demand_point());
                r.repaired.emplace_back(t, s);
            }
        }
    }
    r.certificate = verify_maximin_ree(e, r.allocation, r.prices, cfg);
    return r;
}

} // namespace mree
