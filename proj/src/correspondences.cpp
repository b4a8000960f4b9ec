#include "mree/correspondences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mree {

double delta_min(const PriceVector &p) {
    return *std::min_element(p.values().begin(), p.values().end());
}

double wealth(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p) {
    return dot(p.span(), e.endow(t, s));
}

TruncationBox truncation_bound(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p) {
    auto a = e.endow(t, s);
    double gamma = std::accumulate(a.begin(), a.end(), 0.0) / delta_min(p);
    return {gamma, Bundle(e.goods, gamma)};
}

bool in_budget(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, std::span<const double> x,
               double tol_budget) {
    return dot(p.span(), x) - wealth(e, t, s, p) <= tol_budget;
}

std::vector<std::size_t> linear_argmax_goods(const UtilitySpec &u, const PriceVector &p, double tol_tie) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < p.size(); ++h) best = std::max(best, u.coeffs[h] / p[h]);
    std::vector<std::size_t> out;
    for (std::size_t h = 0; h < p.size(); ++h)
        if (u.coeffs[h] / p[h] >= best * (1.0 - tol_tie)) out.push_back(h);
    return out;
}

namespace {

Bundle linear_demand(const UtilitySpec &u, const PriceVector &p, double w, double tol_tie) {
    const std::size_t n = p.size();
    Bundle best_bundle;
    for (std::size_t h : linear_argmax_goods(u, p, tol_tie)) {
        Bundle corner(n, 0.0);
        corner[h] = w / p[h];
        if (best_bundle.empty() || corner < best_bundle) best_bundle = std::move(corner);
    }
    return best_bundle;
}

// Water-filling for sum a_h ln(1 + x_h): x_h = max(0, a_h / (lambda p_h) - 1).
Bundle log_shifted_demand(const UtilitySpec &u, const PriceVector &p, double w) {
    const std::size_t n = p.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return u.coeffs[a] / p[a] > u.coeffs[b] / p[b];
    });
    double alpha_sum = 0.0, price_sum = 0.0, inv_lambda = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t h = order[k];
        double a2 = alpha_sum + u.coeffs[h], p2 = price_sum + p[h];
        double inv2 = (w + p2) / a2;
        // good h enters iff its bang-per-buck beats the multiplier of the enlarged set
        if (k > 0 && !(u.coeffs[h] / p[h] * inv2 > 1.0)) break;
        alpha_sum = a2;
        price_sum = p2;
        inv_lambda = inv2;
        active = k + 1;
    }
    Bundle x(n, 0.0);
    for (std::size_t k = 0; k < active; ++k) {
        std::size_t h = order[k];
        x[h] = std::max(0.0, u.coeffs[h] * inv_lambda / p[h] - 1.0);
    }
    return x;
}

Bundle ces_demand(const UtilitySpec &u, const PriceVector &p, double w) {
    const std::size_t n = p.size();
    const double sigma = 1.0 / (1.0 - u.rho);
    Bundle x(n);
    double denom = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        x[h] = std::pow(u.coeffs[h] / p[h], sigma);
        denom += p[h] * x[h];
    }
    for (double &v : x) v *= w / denom;
    return x;
}

Bundle cobb_douglas_demand(const UtilitySpec &u, const PriceVector &p, double w) {
    double total = std::accumulate(u.coeffs.begin(), u.coeffs.end(), 0.0);
    Bundle x(p.size());
    for (std::size_t h = 0; h < p.size(); ++h) x[h] = u.coeffs[h] / total * w / p[h];
    return x;
}

std::vector<double> gradient(const UtilitySpec &u, std::span<const double> x) {
    constexpr double cap = 1e12;
    std::vector<double> g(x.size());
    switch (u.family) {
    case Family::linear:
        g = u.coeffs;
        break;
    case Family::log_shifted:
        for (std::size_t h = 0; h < x.size(); ++h) g[h] = u.coeffs[h] / (1.0 + x[h]);
        break;
    case Family::ces: {
        double inner = 0.0;
        for (std::size_t h = 0; h < x.size(); ++h) inner += u.coeffs[h] * std::pow(x[h], u.rho);
        double outer = std::pow(inner, 1.0 / u.rho - 1.0);
        for (std::size_t h = 0; h < x.size(); ++h)
            g[h] = x[h] > 0.0 ? outer * u.coeffs[h] * std::pow(x[h], u.rho - 1.0) : cap;
        break;
    }
    case Family::cobb_douglas_log:
        for (std::size_t h = 0; h < x.size(); ++h) g[h] = x[h] > 0.0 ? u.coeffs[h] / x[h] : cap;
        break;
    }
    for (double &v : g)
        if (!std::isfinite(v) || v > cap) v = cap;
    return g;
}

// Euclidean projection onto {y >= 0, sum y = total}.
void project_simplex(std::vector<double> &y, double total) {
    std::vector<double> s = y;
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        cum += s[k];
        double t = (cum - total) / static_cast<double>(k + 1);
        if (k + 1 == s.size() || s[k + 1] <= t) {
            theta = t;
            break;
        }
    }
    for (double &v : y) v = std::max(0.0, v - theta);
}

} // namespace

Bundle demand(const UtilitySpec &u, const PriceVector &p, double w, const Config &cfg) {
    if (u.coeffs.size() != p.size()) throw EconomyError("utility.params", "dimension mismatch with prices");
    if (!(w > 0.0)) return Bundle(p.size(), 0.0);
    switch (u.family) {
    case Family::linear: return linear_demand(u, p, w, cfg.tol_tie);
    case Family::log_shifted: return log_shifted_demand(u, p, w);
    case Family::ces: return ces_demand(u, p, w);
    case Family::cobb_douglas_log: return cobb_douglas_demand(u, p, w);
    }
    return {};
}

Bundle demand(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, const Config &cfg) {
    return demand(e.spec(t, s), p, wealth(e, t, s, p), cfg);
}

Bundle demand_numeric(const UtilitySpec &u, const PriceVector &p, double w, const Config &cfg) {
    const std::size_t n = p.size();
    if (!(w > 0.0)) return Bundle(n, 0.0);
    // Optimize over money spent per good, y_h = p_h x_h, on the simplex of total w.
    std::vector<double> y(n, w / static_cast<double>(n)), x(n);
    auto to_x = [&](const std::vector<double> &yy, std::vector<double> &xx) {
        for (std::size_t h = 0; h < n; ++h) xx[h] = yy[h] / p[h];
    };
    to_x(y, x);
    double value = utility_value(u, x);
    double step = w;
    double gap = std::numeric_limits<double>::infinity();
    std::vector<double> trial(n), xt(n);
    for (int it = 0; it < cfg.demand_max_iter; ++it) {
        auto g = gradient(u, x);
        for (std::size_t h = 0; h < n; ++h) g[h] /= p[h];
        // KKT gap on the simplex: spread of marginal utility of money over the support
        double gmax = *std::max_element(g.begin(), g.end());
        double gmin_support = std::numeric_limits<double>::infinity();
        for (std::size_t h = 0; h < n; ++h)
            if (y[h] > 1e-14 * w) gmin_support = std::min(gmin_support, g[h]);
        gap = gmax - gmin_support;
        if (gap <= cfg.demand_tol * (1.0 + std::abs(gmax))) {
            // exact budget exhaustion
            double spent = std::accumulate(y.begin(), y.end(), 0.0);
            for (double &v : y) v *= w / spent;
            to_x(y, x);
            return x;
        }
        double scale = step / std::max(gmax, 1e-300);
        bool moved = false;
        while (step > 1e-18 * w) {
            for (std::size_t h = 0; h < n; ++h) trial[h] = y[h] + scale * g[h];
            project_simplex(trial, w);
            to_x(trial, xt);
            double v = utility_value(u, xt);
            if (v > value) {
                y = trial;
                x = xt;
                value = v;
                step = std::min(step * 1.5, w);
                moved = true;
                break;
            }
            step *= 0.5;
            scale = step / std::max(gmax, 1e-300);
        }
        if (!moved) {
            // no ascent possible at machine precision: accept as stationary
            to_x(y, x);
            return x;
        }
    }
    throw DemandError("projected-gradient demand did not converge", gap);
}

PreferredSet::PreferredSet(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, const Config &cfg)
    : spec_(&e.spec(t, s)), demand_(demand(e, t, s, p, cfg)), u_star_(utility_value(*spec_, demand_)),
      tol_pref_(cfg.tol_pref), box_(truncation_bound(e, t, s, p)) {}

bool PreferredSet::contains(std::span<const double> x, bool truncated) const {
    for (std::size_t h = 0; h < x.size(); ++h) {
        if (!(x[h] >= 0.0)) throw EconomyError("bundle[" + std::to_string(h) + "]", "negative quantity");
        if (truncated && x[h] > box_.gamma * (1.0 + 1e-12)) return false;
    }
    return utility_value(*spec_, x) >= u_star_ - tol_pref_;
}

bool preferred_membership(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p,
                          std::span<const double> x, const Config &cfg, bool truncated) {
    return PreferredSet(e, t, s, p, cfg).contains(x, truncated);
}

namespace {

std::size_t lattice_steps(double gamma, double resolution) {
    return static_cast<std::size_t>(std::floor(gamma / resolution * (1.0 + 1e-12)));
}

bool nonnegative_coeffs(const UtilitySpec &u) {
    return std::all_of(u.coeffs.begin(), u.coeffs.end(), [](double c) { return c >= 0.0; });
}

} // namespace

double lattice_size(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p, double resolution) {
    auto box = truncation_bound(e, t, s, p);
    return std::pow(static_cast<double>(lattice_steps(box.gamma, resolution) + 1), static_cast<double>(e.goods));
}

CompactSetApprox sample_preferred_set(const Economy &e, std::size_t t, std::size_t s, const PriceVector &p,
                                      double resolution, const Config &cfg, SampleMode mode) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
    PreferredSet pref(e, t, s, p, cfg);
    const std::size_t n = e.goods;
    const double gamma = pref.box().gamma;
    const std::size_t k_max = lattice_steps(gamma, resolution);
    const double per_axis = static_cast<double>(k_max + 1);
    const double columns = std::pow(per_axis, static_cast<double>(n - 1));
    const double budget = static_cast<double>(cfg.max_points);
    const double needed = mode == SampleMode::full ? columns * per_axis : 2.0 * columns;
    if (needed > budget) {
        double axis = mode == SampleMode::full ? std::floor(std::pow(budget, 1.0 / static_cast<double>(n)))
                                               : std::floor(std::pow(budget / 2.0, 1.0 / static_cast<double>(n - 1 ? n - 1 : 1)));
        double suggested = gamma / std::max(axis - 1.0, 1.0);
        throw SamplingError("preferred-set lattice needs " + std::to_string(needed) + " points, budget is " +
                                std::to_string(cfg.max_points) + "; try resolution >= " + std::to_string(suggested),
                            suggested);
    }

    const auto &u = pref.utility();
    const bool convex = !(u.family == Family::ces && u.rho > 1.0);
    CompactSetApprox cloud(n, resolution, convex,
                           mode == SampleMode::full ? CloudMethod::sampled_grid : CloudMethod::hull_candidates);
    const bool monotone = nonnegative_coeffs(u);

    std::vector<std::size_t> idx(n, 0);
    Bundle x(n, 0.0);
    auto coord = [&](std::size_t k) { return static_cast<double>(k) * resolution; };
    auto member_at = [&](std::size_t k_last) {
        x[n - 1] = coord(k_last);
        return pref.contains(x);
    };

    for (;;) {
        for (std::size_t h = 0; h + 1 < n; ++h) x[h] = coord(idx[h]);
        if (monotone) {
            // U is nondecreasing in the last coordinate, so members form a top segment of the column
            if (member_at(k_max)) {
                std::size_t lo = 0, hi = k_max;
                if (!member_at(0)) {
                    while (hi - lo > 1) {
                        std::size_t mid = lo + (hi - lo) / 2;
                        (member_at(mid) ? hi : lo) = mid;
                    }
                } else {
                    hi = 0;
                }
                if (mode == SampleMode::full) {
                    for (std::size_t k = hi; k <= k_max; ++k) {
                        x[n - 1] = coord(k);
                        cloud.push(x);
                    }
                } else {
                    x[n - 1] = coord(hi);
                    cloud.push(x);
                    if (hi != k_max) {
                        x[n - 1] = coord(k_max);
                        cloud.push(x);
                    }
                }
            }
        } else {
            std::size_t first = k_max + 1, last = 0;
            for (std::size_t k = 0; k <= k_max; ++k) {
                if (!member_at(k)) continue;
                if (mode == SampleMode::full) {
                    cloud.push(x);
                } else {
                    first = std::min(first, k);
                    last = k;
                }
            }
            if (mode == SampleMode::hull_candidates && first <= k_max) {
                x[n - 1] = coord(first);
                cloud.push(x);
                if (last != first) {
                    x[n - 1] = coord(last);
                    cloud.push(x);
                }
            }
        }
        // advance the column odometer over the first n-1 axes
        std::size_t h = 0;
        while (h + 1 < n) {
            if (++idx[h] <= k_max) break;
            idx[h] = 0;
            ++h;
        }
        if (h + 1 >= n) break;
    }

    const auto &d = pref.demand_point();
    bool present = false;
    for (std::size_t i = 0; i < cloud.size() && !present; ++i) {
        auto q = cloud.point(i);
        double dist = 0.0;
        for (std::size_t h = 0; h < n; ++h) dist = std::max(dist, std::abs(q[h] - d[h]));
        present = dist <= 1e-12 * (1.0 + gamma);
    }
    if (!present) cloud.push(d);
    return cloud;
}

} // namespace mree
