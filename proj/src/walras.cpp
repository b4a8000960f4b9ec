#include "mree/walras.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>

#include "mree/linalg.hpp"
#include "mree/min_norm.hpp"
#include "mree/setval.hpp"

namespace mree {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Bundle excess_demand(const Economy &e, std::size_t s, const PriceVector &p, const Config &cfg) {
    Bundle z(e.goods, 0.0);
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        Bundle x = demand(e, t, s, p, cfg);
        auto a = e.endow(t, s);
        for (std::size_t h = 0; h < e.goods; ++h) z[h] += e.agents.weights[t] * (x[h] - a[h]);
    }
    return z;
}

namespace {

Bundle residual_of(const Economy &e, std::size_t s, const std::vector<Bundle> &bundles) {
    Bundle z(e.goods, 0.0);
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        auto a = e.endow(t, s);
        for (std::size_t h = 0; h < e.goods; ++h) z[h] += e.agents.weights[t] * (bundles[t][h] - a[h]);
    }
    return z;
}

struct TiedAgent {
    std::size_t agent;
    std::vector<std::size_t> goods;
    double wealth;
};

} // namespace

DemandSelection clearing_selection(const Economy &e, std::size_t s, const PriceVector &p, const Config &cfg) {
    const std::size_t m = e.agents.size(), n = e.goods;
    DemandSelection out;
    out.bundles.resize(m);
    std::vector<TiedAgent> tied;
    for (std::size_t t = 0; t < m; ++t) {
        const auto &u = e.spec(t, s);
        double w = wealth(e, t, s, p);
        if (u.family == Family::linear && w > 0.0) {
            auto goods = linear_argmax_goods(u, p, cfg.tol_tie);
            if (goods.size() > 1) {
                tied.push_back({t, std::move(goods), w});
                continue;
            }
        }
        out.bundles[t] = demand(u, p, w, cfg);
    }

    if (!tied.empty()) {
        // What the indifferent agents must absorb for the market to clear.
        Bundle target = e.aggregate_endowment(s);
        for (std::size_t t = 0; t < m; ++t) {
            if (out.bundles[t].empty()) continue;
            for (std::size_t h = 0; h < n; ++h) target[h] -= e.agents.weights[t] * out.bundles[t][h];
        }
        // Vertices of the Minkowski sum of the argmax faces: one corner per tied agent.
        std::vector<std::vector<std::size_t>> combos{{}};
        for (const auto &ta : tied) {
            std::vector<std::vector<std::size_t>> next;
            for (const auto &c : combos)
                for (std::size_t h : ta.goods) {
                    auto c2 = c;
                    c2.push_back(h);
                    next.push_back(std::move(c2));
                }
            combos = std::move(next);
        }
        std::vector<std::vector<double>> pts;
        pts.reserve(combos.size());
        for (const auto &c : combos) {
            std::vector<double> v(n);
            for (std::size_t h = 0; h < n; ++h) v[h] = -target[h];
            for (std::size_t i = 0; i < tied.size(); ++i) {
                std::size_t h = c[i];
                v[h] += e.agents.weights[tied[i].agent] * tied[i].wealth / p[h];
            }
            pts.push_back(std::move(v));
        }
        auto lambda = min_norm_point(pts);
        for (std::size_t i = 0; i < tied.size(); ++i) {
            std::vector<double> share(n, 0.0);
            for (std::size_t k = 0; k < combos.size(); ++k) share[combos[k][i]] += lambda[k];
            double total = 0.0;
            for (double v : share) total += v;
            Bundle x(n, 0.0);
            for (std::size_t h = 0; h < n; ++h) x[h] = share[h] / total * tied[i].wealth / p[h];
            out.bundles[tied[i].agent] = std::move(x);
        }
    }
    out.residual = residual_of(e, s, out.bundles);
    return out;
}

namespace {

struct TrajectoryHash {
    std::uint64_t value = 1469598103934665603ull;
    void add(const PriceVector &p) {
        for (double v : p.values()) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &v, sizeof(double));
            for (unsigned char b : bytes) {
                value ^= b;
                value *= 1099511628211ull;
            }
        }
    }
};

// Direction field and its residual at a price.
using Field = std::function<std::vector<double>(const PriceVector &, double &)>;

struct SearchResult {
    PriceVector price;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

PriceVector step_to(const PriceVector &p, const std::vector<double> &g, double t, double p_min) {
    std::vector<double> raw(p.size());
    for (std::size_t h = 0; h < p.size(); ++h) raw[h] = p[h] + t * g[h];
    return PriceVector::normalized(raw, p_min);
}

// p <- normalize(clamp(p + lambda g)); the step doubles after an accepted move
// and halves after a rejected one. When a trial overshoots (the field reverses
// along g) the crossing is bracketed by bisection before halving.
SearchResult damped_search(const Field &field, PriceVector p, double tol, int max_iter, double step0, double p_min,
                           TrajectoryHash &hash) {
    SearchResult res;
    double r = 0.0;
    auto g = field(p, r);
    double lambda = step0;
    const double lambda_max = 1e6 * step0;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (r <= tol) {
            res = {p, r, it, true};
            return res;
        }
        double rt = 0.0;
        PriceVector trial = step_to(p, g, lambda, p_min);
        auto gt = field(trial, rt);
        if (rt < r) {
            p = trial;
            g = std::move(gt);
            r = rt;
            hash.add(p);
            lambda = std::min(2.0 * lambda, lambda_max);
            continue;
        }
        if (dot(gt, g) < 0.0) {
            double lo = 0.0, hi = lambda;
            PriceVector best_p = p;
            double best_r = r, best_t = 0.0;
            std::vector<double> best_g;
            for (int k = 0; k < 200 && hi - lo > 1e-17 * lambda; ++k) {
                double mid = 0.5 * (lo + hi), rm = 0.0;
                PriceVector pm = step_to(p, g, mid, p_min);
                auto gm = field(pm, rm);
                if (rm < best_r) {
                    best_r = rm;
                    best_p = pm;
                    best_g = gm;
                    best_t = mid;
                }
                (dot(gm, g) > 0.0 ? lo : hi) = mid;
            }
            if (best_r < r) {
                p = best_p;
                g = std::move(best_g);
                r = best_r;
                hash.add(p);
                lambda = std::max(best_t, 1e-300);
                continue;
            }
        }
        lambda *= 0.5;
        if (lambda * sup_norm(g) < 1e-17) break;
    }
    res = {p, r, it, r <= tol};
    return res;
}

} // namespace

namespace {

bool has_linear_agent(const Economy &e, std::size_t s) {
    for (std::size_t t = 0; t < e.agents.size(); ++t)
        if (e.spec(t, s).family == Family::linear) return true;
    return false;
}

// Spending shares of a linear agent under logit smoothing of sharpness sigma:
// share_h proportional to (c_h / p_h)^sigma. Tends to the argmax face as sigma grows.
std::vector<double> logit_shares(const UtilitySpec &u, const PriceVector &p, double sigma) {
    const std::size_t n = p.size();
    std::vector<double> v(n);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < n; ++h) top = std::max(top, v[h] = sigma * std::log(u.coeffs[h] / p[h]));
    double sum = 0.0;
    for (double &x : v) sum += (x = std::exp(x - top));
    for (double &x : v) x /= sum;
    return v;
}

Bundle smoothed_excess(const Economy &e, std::size_t s, const PriceVector &p, double sigma, const Config &cfg) {
    Bundle z(e.goods, 0.0);
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        const auto &u = e.spec(t, s);
        const double w = wealth(e, t, s, p);
        Bundle x;
        if (u.family == Family::linear && w > 0.0) {
            x = logit_shares(u, p, sigma);
            for (std::size_t h = 0; h < e.goods; ++h) x[h] *= w / p[h];
        } else {
            x = demand(u, p, w, cfg);
        }
        auto a = e.endow(t, s);
        for (std::size_t h = 0; h < e.goods; ++h) z[h] += e.agents.weights[t] * (x[h] - a[h]);
    }
    return z;
}

// Equilibrium with a fixed pattern of indifference: linear agent t spends
// only on the goods in ties[t] (all of them equally good), in proportions that
// are free unknowns. The ties pin price ratios inside each connected group of
// goods, which leaves one free scale per group; with a forest of ties the
// unknowns match the ell - 1 independent clearing equations and Newton's
// method applies.
class FacePolish {
public:
    FacePolish(const Economy &e, std::size_t s, const Config &cfg, std::vector<std::vector<std::size_t>> ties)
        : e_(e), s_(s), cfg_(cfg), ties_(std::move(ties)) {}

    // Builds the group structure; false when the ties are inconsistent.
    bool build() {
        const std::size_t n = e_.goods;
        group_.assign(n, n);
        ratio_.assign(n, 1.0);
        std::vector<std::vector<std::pair<std::size_t, double>>> adj(n); // (neighbor, p_nb / p_self)
        std::vector<std::size_t> root(n);
        for (std::size_t h = 0; h < n; ++h) root[h] = h;
        auto find = [&](std::size_t x) {
            while (root[x] != x) x = root[x] = root[root[x]];
            return x;
        };
        for (std::size_t t = 0; t < ties_.size(); ++t) {
            const auto &S = ties_[t];
            if (S.size() < 2) continue;
            const auto &c = e_.spec(t, s_).coeffs;
            for (std::size_t i = 1; i < S.size(); ++i) {
                std::size_t a = S[0], b = S[i];
                if (find(a) == find(b)) return false; // a cycle over-determines the ratios
                root[find(a)] = find(b);
                adj[a].push_back({b, c[b] / c[a]});
                adj[b].push_back({a, c[a] / c[b]});
            }
        }
        groups_ = 0;
        for (std::size_t h = 0; h < n; ++h) {
            if (group_[h] != n) continue;
            std::vector<std::size_t> stack{h};
            group_[h] = groups_;
            ratio_[h] = 1.0;
            while (!stack.empty()) {
                std::size_t x = stack.back();
                stack.pop_back();
                for (auto [y, r] : adj[x])
                    if (group_[y] == n) {
                        group_[y] = groups_;
                        ratio_[y] = ratio_[x] * r;
                        stack.push_back(y);
                    }
            }
            ++groups_;
        }
        std::size_t unknowns = groups_ - 1;
        for (const auto &S : ties_) unknowns += S.size() >= 2 ? S.size() - 1 : 0;
        return unknowns == n - 1;
    }

    std::size_t unknowns() const { return e_.goods - 1; }

    // u = (log scale of groups 1..G-1, free spending shares of each tie set).
    std::vector<double> initial(const PriceVector &p, double sigma) const {
        std::vector<double> u;
        std::vector<double> lsum(groups_, 0.0), cnt(groups_, 0.0);
        for (std::size_t h = 0; h < e_.goods; ++h) {
            lsum[group_[h]] += std::log(p[h] / ratio_[h]);
            cnt[group_[h]] += 1.0;
        }
        for (std::size_t g = 1; g < groups_; ++g) u.push_back(lsum[g] / cnt[g] - lsum[0] / cnt[0]);
        for (std::size_t t = 0; t < ties_.size(); ++t) {
            const auto &S = ties_[t];
            if (S.size() < 2) continue;
            auto sh = logit_shares(e_.spec(t, s_), p, sigma);
            double tot = 0.0;
            for (std::size_t h : S) tot += sh[h];
            for (std::size_t i = 0; i + 1 < S.size(); ++i) u.push_back(sh[S[i]] / tot);
        }
        return u;
    }

    PriceVector price(const std::vector<double> &u) const {
        std::vector<double> raw(e_.goods);
        for (std::size_t h = 0; h < e_.goods; ++h)
            raw[h] = ratio_[h] * (group_[h] == 0 ? 1.0 : std::exp(u[group_[h] - 1]));
        double sum = 0.0;
        for (double v : raw) sum += v;
        for (double &v : raw) v /= sum;
        return PriceVector::normalized(raw, 0.0);
    }

    // Spending shares per tied agent, in the order of ties[t].
    std::vector<std::vector<double>> shares(const std::vector<double> &u) const {
        std::vector<std::vector<double>> out(ties_.size());
        std::size_t k = groups_ - 1;
        for (std::size_t t = 0; t < ties_.size(); ++t) {
            const auto &S = ties_[t];
            if (S.size() < 2) continue;
            double rest = 1.0;
            for (std::size_t i = 0; i + 1 < S.size(); ++i) {
                out[t].push_back(u[k]);
                rest -= u[k++];
            }
            out[t].push_back(rest);
        }
        return out;
    }

    Bundle excess(const std::vector<double> &u) const {
        const PriceVector p = price(u);
        const auto th = shares(u);
        Bundle z(e_.goods, 0.0);
        for (std::size_t t = 0; t < e_.agents.size(); ++t) {
            const double w = wealth(e_, t, s_, p);
            Bundle x(e_.goods, 0.0);
            if (ties_[t].size() >= 2) {
                for (std::size_t i = 0; i < ties_[t].size(); ++i) {
                    std::size_t h = ties_[t][i];
                    x[h] = th[t][i] * w / p[h];
                }
            } else {
                x = demand(e_.spec(t, s_), p, w, cfg_);
            }
            auto a = e_.endow(t, s_);
            for (std::size_t h = 0; h < e_.goods; ++h) z[h] += e_.agents.weights[t] * (x[h] - a[h]);
        }
        return z;
    }

    // Damped Newton with a forward-difference Jacobian on the first ell - 1
    // clearing equations (the last follows from budget exhaustion).
    std::vector<double> newton(std::vector<double> u, int max_iter = 60) const {
        const std::size_t k = unknowns();
        auto F = [&](const std::vector<double> &v) {
            Bundle z = excess(v);
            z.pop_back();
            return z;
        };
        auto f = F(u);
        double r = sup_norm(f);
        for (int it = 0; it < max_iter && r > 1e-15; ++it) {
            std::vector<std::vector<double>> J(k, std::vector<double>(k));
            for (std::size_t j = 0; j < k; ++j) {
                auto v = u;
                const double step = 1e-7 * std::max(1.0, std::abs(u[j]));
                v[j] += step;
                auto fj = F(v);
                for (std::size_t i = 0; i < k; ++i) J[i][j] = (fj[i] - f[i]) / step;
            }
            std::vector<double> rhs(k), d;
            for (std::size_t i = 0; i < k; ++i) rhs[i] = -f[i];
            if (!solve_dense(J, rhs, d)) break;
            bool moved = false;
            for (double lam = 1.0; lam > 1e-6; lam *= 0.5) {
                auto v = u;
                for (std::size_t j = 0; j < k; ++j) v[j] += lam * d[j];
                auto fv = F(v);
                double rv = sup_norm(fv);
                if (rv < r) {
                    u = std::move(v);
                    f = std::move(fv);
                    r = rv;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        return u;
    }

    const std::vector<std::vector<std::size_t>> &ties() const { return ties_; }

private:
    const Economy &e_;
    std::size_t s_;
    const Config &cfg_;
    std::vector<std::vector<std::size_t>> ties_;
    std::vector<std::size_t> group_;
    std::vector<double> ratio_;
    std::size_t groups_ = 0;
};

// Tie sets read off the smoothed shares: goods a linear agent still buys in
// non-negligible proportion.
std::vector<std::vector<std::size_t>> ties_from_shares(const Economy &e, std::size_t s, const PriceVector &p,
                                                       double sigma) {
    std::vector<std::vector<std::size_t>> ties(e.agents.size());
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        const auto &u = e.spec(t, s);
        if (u.family != Family::linear) continue;
        auto sh = logit_shares(u, p, sigma);
        const double top = *std::max_element(sh.begin(), sh.end());
        for (std::size_t h = 0; h < e.goods; ++h)
            if (sh[h] >= 1e-6 * top) ties[t].push_back(h);
        if (ties[t].size() < 2) ties[t].clear();
    }
    return ties;
}

// Newton polish over tie patterns, starting from the smoothed equilibrium.
// The pattern is repaired when a share turns negative (drop that good) or a
// good outside the set becomes strictly better (add it).
std::optional<PriceVector> polish_faces(const Economy &e, std::size_t s, const PriceVector &p0, double sigma,
                                        const Config &cfg, TrajectoryHash &hash) {
    auto ties = ties_from_shares(e, s, p0, sigma);
    PriceVector p = p0;
    for (int round = 0; round < 12; ++round) {
        FacePolish fp(e, s, cfg, ties);
        if (!fp.build()) return std::nullopt;
        auto u = fp.newton(fp.initial(p, sigma));
        p = fp.price(u);
        hash.add(p);
        auto th = fp.shares(u);

        bool changed = false;
        for (std::size_t t = 0; t < ties.size() && !changed; ++t) {
            if (ties[t].empty()) continue;
            std::size_t worst = 0;
            for (std::size_t i = 1; i < th[t].size(); ++i)
                if (th[t][i] < th[t][worst]) worst = i;
            if (th[t][worst] < -1e-12) {
                ties[t].erase(ties[t].begin() + static_cast<std::ptrdiff_t>(worst));
                if (ties[t].size() < 2) ties[t].clear();
                changed = true;
            }
        }
        for (std::size_t t = 0; t < ties.size() && !changed; ++t) {
            const auto &spec = e.spec(t, s);
            if (spec.family != Family::linear) continue;
            auto best = linear_argmax_goods(spec, p, 1e-9);
            if (ties[t].empty()) {
                if (best.size() >= 2) {
                    ties[t] = best;
                    changed = true;
                }
                continue;
            }
            for (std::size_t h : best)
                if (std::find(ties[t].begin(), ties[t].end(), h) == ties[t].end()) {
                    ties[t].push_back(h);
                    std::sort(ties[t].begin(), ties[t].end());
                    changed = true;
                    break;
                }
        }
        if (changed) continue;
        if (sup_norm(fp.excess(u)) <= 1e-2 * cfg.tol_clear) return p;

        // Newton stalled with a consistent pattern: admit the closest
        // competing good of some linear agent, keeping the ties a forest.
        double best_gap = std::numeric_limits<double>::infinity();
        std::vector<std::vector<std::size_t>> next;
        for (std::size_t t = 0; t < ties.size(); ++t) {
            const auto &spec = e.spec(t, s);
            if (spec.family != Family::linear) continue;
            auto top = linear_argmax_goods(spec, p, 0.0);
            double m = spec.coeffs[top[0]] / p[top[0]];
            for (std::size_t h = 0; h < e.goods; ++h) {
                const auto &S = ties[t];
                if (std::find(S.begin(), S.end(), h) != S.end() || h == top[0]) continue;
                double gap = (m - spec.coeffs[h] / p[h]) / m;
                if (gap >= best_gap) continue;
                auto trial = ties;
                if (trial[t].empty()) trial[t] = {top[0]};
                trial[t].push_back(h);
                std::sort(trial[t].begin(), trial[t].end());
                if (!FacePolish(e, s, cfg, trial).build()) continue;
                best_gap = gap;
                next = std::move(trial);
            }
        }
        if (next.empty()) return std::nullopt;
        ties = std::move(next);
    }
    return std::nullopt;
}

} // namespace

StateEquilibrium solve_state_equilibrium(const Economy &e, std::size_t s, const Config &cfg) {
    const std::size_t n = e.goods;
    StateEquilibrium eq;
    eq.state = s;

    auto finish = [&](const PriceVector &p, int iterations, std::string method, std::uint64_t hash) {
        auto sel = clearing_selection(e, s, p, cfg);
        eq.price = p;
        eq.allocation = std::move(sel.bundles);
        eq.clearing_residual = std::move(sel.residual);
        eq.iterations = iterations;
        eq.method = std::move(method);
        eq.trajectory_hash = hash;
        return eq;
    };
    auto residual_at = [&](const PriceVector &p) { return sup_norm(clearing_selection(e, s, p, cfg).residual); };

    if (n == 1) return finish(PriceVector::uniform(1), 0, "single_good", 0);

    Bundle scale = e.aggregate_endowment(s);
    for (double &v : scale)
        if (!(v > 0.0)) v = 1.0;

    Field tatonnement = [&](const PriceVector &p, double &r) {
        auto z = clearing_selection(e, s, p, cfg).residual;
        r = sup_norm(z);
        for (std::size_t h = 0; h < n; ++h) z[h] /= scale[h];
        return z;
    };

    const PriceVector start = PriceVector::uniform(n);
    TrajectoryHash hash;
    hash.add(start);
    const bool linear = has_linear_agent(e, s);
    // Point tatonnement rarely lands on the tie manifolds where linear agents
    // sit in equilibrium, so it gets a short budget in that case.
    const int first_budget = linear ? std::min(cfg.max_iter, 200) : cfg.max_iter;
    auto first = damped_search(tatonnement, start, cfg.tol_clear, first_budget, cfg.step0, cfg.p_min, hash);
    if (first.converged) return finish(first.price, first.iterations, "tatonnement", hash.value);
    int used = first.iterations;
    PriceVector best_p = first.price;
    double best_r = first.residual;
    auto consider = [&](const PriceVector &p) {
        double r = residual_at(p);
        if (r < best_r) {
            best_r = r;
            best_p = p;
        }
        return r;
    };

    if (linear) {
        // Smoothing homotopy: linear agents get logit shares of growing
        // sharpness; the smoothed equilibria approach a face equilibrium,
        // which Newton's method then pins down exactly.
        PriceVector p = start;
        for (double sigma = 4.0; sigma <= 65536.0 && used < cfg.max_iter; sigma *= 4.0) {
            Field smooth = [&](const PriceVector &q, double &r) {
                auto z = smoothed_excess(e, s, q, sigma, cfg);
                r = sup_norm(z);
                for (std::size_t h = 0; h < n; ++h) z[h] /= scale[h];
                return z;
            };
            auto res = damped_search(smooth, p, 1e-11, cfg.max_iter - used, cfg.step0, cfg.p_min, hash);
            used += res.iterations;
            p = res.price;
            if (sigma < 1024.0) continue;
            if (auto q = polish_faces(e, s, p, sigma, cfg, hash)) {
                if (consider(*q) <= cfg.tol_clear) return finish(*q, used, "smoothing_homotopy", hash.value);
            }
        }
    }

    // Homotopy: blend the excess demand with a pull towards the uniform price
    // and follow the root as the blend moves to the original field.
    PriceVector p = start;
    for (int k = 1; k <= 10 && used < cfg.max_iter; ++k) {
        const double tau = k / 10.0;
        Field blended = [&](const PriceVector &q, double &r) {
            auto z = clearing_selection(e, s, q, cfg).residual;
            std::vector<double> g(n);
            for (std::size_t h = 0; h < n; ++h) g[h] = tau * z[h] / scale[h] + (1.0 - tau) * (start[h] - q[h]);
            r = k == 10 ? sup_norm(z) : sup_norm(g);
            return g;
        };
        const double tol = k == 10 ? cfg.tol_clear : 1e-6;
        auto res = damped_search(blended, p, tol, cfg.max_iter - used, cfg.step0, cfg.p_min, hash);
        used += res.iterations;
        p = res.price;
        if (k == 10 && res.converged) return finish(p, used, "homotopy", hash.value);
        if (!res.converged) break;
    }
    consider(p);

    throw SolverError("state " + e.states.ids[s] + ": no price within tol_clear after " + std::to_string(used) +
                          " iterations",
                      best_r, best_p);
}

namespace {

// Implicit lattice sample of one agent's C^X: members are tested on demand.
struct LatticeAgent {
    PreferredSet pref;
    double step;
    std::size_t k_max;
    double weight;

    // Member of the sampled cloud nearest to `target` among the demand point
    // and the lattice points of a (2r+1)^n window around it.
    Bundle nearest(const Bundle &target, int r) const {
        const std::size_t n = target.size();
        Bundle best = pref.demand_point();
        double best_d = 0.0;
        for (std::size_t h = 0; h < n; ++h) best_d += (best[h] - target[h]) * (best[h] - target[h]);

        std::vector<long> lo(n), hi(n), idx(n);
        for (std::size_t h = 0; h < n; ++h) {
            long c = std::lround(target[h] / step);
            lo[h] = std::max(0L, c - r);
            hi[h] = std::min(static_cast<long>(k_max), c + r);
            if (lo[h] > hi[h]) return best;
            idx[h] = lo[h];
        }
        Bundle x(n);
        for (;;) {
            double d = 0.0;
            for (std::size_t h = 0; h < n; ++h) {
                x[h] = static_cast<double>(idx[h]) * step;
                d += (x[h] - target[h]) * (x[h] - target[h]);
            }
            if (d < best_d && pref.contains(x)) {
                best_d = d;
                best = x;
            }
            std::size_t h = 0;
            while (h < n) {
                if (++idx[h] <= hi[h]) break;
                idx[h] = lo[h];
                ++h;
            }
            if (h == n) break;
        }
        return best;
    }
};

} // namespace

ExcessCertificate aggregate_excess_certificate(const Economy &e, std::size_t s, const PriceVector &p,
                                               double resolution, const Config &cfg) {
    const std::size_t m = e.agents.size(), n = e.goods;
    const Bundle q = e.aggregate_endowment(s);
    ExcessCertificate cert;

    if (aggregate_is_exact(e, s, p, resolution, cfg)) {
        auto cloud = aggregate_preferred_set(e, s, p, resolution, cfg);
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            double d = 0.0;
            auto x = cloud.point(i);
            for (std::size_t h = 0; h < n; ++h) d += (x[h] - q[h]) * (x[h] - q[h]);
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        auto x = cloud.point(arg);
        cert.distance = std::sqrt(best);
        cert.method = "exact";
        cert.aggregate_point.assign(x.begin(), x.end());
        return cert;
    }

    // Too many combinations to enumerate: search over selections of the
    // sampled clouds. Any selection found is a point of the aggregate, so the
    // reported distance bounds the exact one from above.
    std::vector<LatticeAgent> agents;
    agents.reserve(m);
    for (std::size_t t = 0; t < m; ++t) {
        PreferredSet pref(e, t, s, p, cfg);
        auto k_max = static_cast<std::size_t>(std::floor(pref.box().gamma / resolution * (1.0 + 1e-12)));
        agents.push_back({std::move(pref), resolution, k_max, e.agents.weights[t]});
    }

    auto start = clearing_selection(e, s, p, cfg).bundles;
    std::vector<Bundle> x(m);
    for (std::size_t t = 0; t < m; ++t) x[t] = agents[t].nearest(start[t], cfg.local_window);

    auto total = [&] {
        Bundle sum(n, 0.0);
        for (std::size_t t = 0; t < m; ++t)
            for (std::size_t h = 0; h < n; ++h) sum[h] += agents[t].weight * x[t][h];
        return sum;
    };
    auto gap = [&](const Bundle &sum) {
        double d = 0.0;
        for (std::size_t h = 0; h < n; ++h) d += (sum[h] - q[h]) * (sum[h] - q[h]);
        return std::sqrt(d);
    };

    Bundle sum = total();
    double best = gap(sum);
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool improved = false;
        for (std::size_t t = 0; t < m; ++t) {
            Bundle target(n);
            for (std::size_t h = 0; h < n; ++h)
                target[h] = x[t][h] + (q[h] - sum[h]) / agents[t].weight;
            Bundle y = agents[t].nearest(target, cfg.local_window);
            Bundle trial_sum = sum;
            for (std::size_t h = 0; h < n; ++h) trial_sum[h] += agents[t].weight * (y[h] - x[t][h]);
            double g = gap(trial_sum);
            if (g < best) {
                best = g;
                sum = std::move(trial_sum);
                x[t] = std::move(y);
                improved = true;
            }
        }
        if (!improved) break;
    }
    cert.distance = best;
    cert.method = "local_selection";
    cert.aggregate_point = sum;
    return cert;
}

} // namespace mree
