#include "mree/economy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace mree {

const char *family_name(Family f) {
    switch (f) {
    case Family::linear: return "linear";
    case Family::log_shifted: return "log_shifted";
    case Family::ces: return "ces";
    case Family::cobb_douglas_log: return "cobb_douglas_log";
    }
    return "?";
}

std::optional<Family> family_from_name(const std::string &name) {
    for (Family f : {Family::linear, Family::log_shifted, Family::ces, Family::cobb_douglas_log})
        if (name == family_name(f)) return f;
    return std::nullopt;
}

const char *status_name(CheckStatus s) {
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::interior_only: return "interior_only";
    case CheckStatus::fail: return "fail";
    }
    return "?";
}

double AgentGrid::total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void BundleTensor::set_bundle(std::size_t t, std::size_t s, std::span<const double> x) {
    if (x.size() != goods_) throw std::invalid_argument("bundle size mismatch");
    std::copy(x.begin(), x.end(), data_.begin() + static_cast<std::ptrdiff_t>(index(t, s, 0)));
}

Bundle Economy::aggregate_endowment(std::size_t s) const {
    Bundle total(goods, 0.0);
    for (std::size_t t = 0; t < agents.size(); ++t)
        for (std::size_t h = 0; h < goods; ++h) total[h] += agents.weights[t] * endowment.at(t, s, h);
    return total;
}

std::size_t Economy::state_index(const std::string &id) const {
    auto it = std::find(states.ids.begin(), states.ids.end(), id);
    if (it == states.ids.end()) throw EconomyError("states", "unknown state id '" + id + "'");
    return static_cast<std::size_t>(it - states.ids.begin());
}

std::size_t Economy::agent_index(const std::string &id) const {
    auto it = std::find(agents.ids.begin(), agents.ids.end(), id);
    if (it == agents.ids.end()) throw EconomyError("agents", "unknown agent id '" + id + "'");
    return static_cast<std::size_t>(it - agents.ids.begin());
}

PriceVector::PriceVector(std::vector<double> p, double p_min) : p_(std::move(p)) {
    if (p_.empty()) throw EconomyError("price", "empty price vector");
    double sum = 0.0;
    for (std::size_t h = 0; h < p_.size(); ++h) {
        if (!std::isfinite(p_[h]) || p_[h] < p_min)
            throw EconomyError("price[" + std::to_string(h) + "]", "coordinate below p_min");
        sum += p_[h];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw EconomyError("price", "coordinates do not sum to 1");
}

PriceVector PriceVector::normalized(std::span<const double> raw, double p_min) {
    std::vector<double> p(raw.begin(), raw.end());
    if (p.empty()) throw EconomyError("price", "empty price vector");
    for (int pass = 0; pass < 4; ++pass) {
        double sum = 0.0;
        for (double &v : p) {
            if (!std::isfinite(v)) throw EconomyError("price", "non-finite coordinate");
            v = std::max(v, p_min);
            sum += v;
        }
        for (double &v : p) v /= sum;
        if (std::all_of(p.begin(), p.end(), [&](double v) { return v >= p_min; })) break;
    }
    // Push the rounding residue into the largest coordinate so the sum is 1 to the last ulp or so.
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    auto big = std::max_element(p.begin(), p.end());
    *big += 1.0 - sum;
    PriceVector out;
    out.p_ = std::move(p);
    return out;
}

PriceVector PriceVector::uniform(std::size_t goods) {
    std::vector<double> p(goods, 1.0 / static_cast<double>(goods));
    return normalized(p);
}

bool ValidationReport::ok() const {
    return std::none_of(checks.begin(), checks.end(), [](const auto &c) { return c.status == CheckStatus::fail; });
}

const AssumptionCheck &ValidationReport::check(const std::string &name) const {
    for (const auto &c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no check named " + name);
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto &c : checks) {
        os << c.name << ": " << status_name(c.status) << "\n";
        for (const auto &i : c.issues) os << "  " << i.path << ": " << i.message << "\n";
    }
    return os.str();
}

namespace {

std::string agent_path(std::size_t t) { return "agents[" + std::to_string(t) + "]"; }

std::string utility_path(const Economy &e, std::size_t t, std::size_t s) {
    return agent_path(t) + ".utility[" + e.states.ids[s] + "]";
}

void fail(AssumptionCheck &c, std::string path, std::string msg) {
    c.status = CheckStatus::fail;
    c.issues.push_back({std::move(path), std::move(msg)});
}

AssumptionCheck check_structure(const Economy &e) {
    AssumptionCheck c{"structure", CheckStatus::pass, {}};
    if (e.goods == 0) fail(c, "goods", "must be positive");
    const std::size_t n = e.states.size(), m = e.agents.size();
    if (n == 0) fail(c, "states", "empty state list");
    if (m == 0) fail(c, "agents", "empty agent list");
    if (e.states.probs.size() != n) fail(c, "states.prob", "one probability per state required");
    if (e.agents.weights.size() != m) fail(c, "agents.weight", "one weight per agent required");
    if (c.status == CheckStatus::fail) return c;

    if (std::set<std::string>(e.states.ids.begin(), e.states.ids.end()).size() != n)
        fail(c, "states", "duplicate state id");
    if (std::set<std::string>(e.agents.ids.begin(), e.agents.ids.end()).size() != m)
        fail(c, "agents", "duplicate agent id");

    double psum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double p = e.states.probs[s];
        if (!(p > 0.0) || !std::isfinite(p))
            fail(c, "states[" + std::to_string(s) + "].prob", "must be strictly positive");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-12) fail(c, "states.prob", "sum != 1 (got " + std::to_string(psum) + ")");

    for (std::size_t t = 0; t < m; ++t) {
        double w = e.agents.weights[t];
        if (!(w > 0.0) || !std::isfinite(w)) fail(c, agent_path(t) + ".weight", "must be strictly positive and finite");
    }

    if (e.partitions.size() != m) {
        fail(c, "agents.partition", "one partition per agent required");
    } else {
        for (std::size_t t = 0; t < m; ++t)
            if (e.partitions[t].universe() != n) fail(c, agent_path(t) + ".partition", "does not cover the state space");
    }

    if (e.utility.size() != m) {
        fail(c, "agents.utility", "one utility row per agent required");
    } else {
        for (std::size_t t = 0; t < m; ++t) {
            if (e.utility[t].size() != n) {
                fail(c, agent_path(t) + ".utility", "one utility per state required");
                continue;
            }
            for (std::size_t s = 0; s < n; ++s) {
                const auto &u = e.utility[t][s];
                if (u.coeffs.size() != e.goods) {
                    fail(c, utility_path(e, t, s) + ".params", "expected " + std::to_string(e.goods) + " coefficients");
                    continue;
                }
                for (std::size_t h = 0; h < e.goods; ++h)
                    if (!std::isfinite(u.coeffs[h]))
                        fail(c, utility_path(e, t, s) + ".params[" + std::to_string(h) + "]", "non-finite");
                if (u.family == Family::ces && !(u.rho > 0.0))
                    fail(c, utility_path(e, t, s) + ".rho", "ces requires rho > 0");
                if (u.family == Family::ces && u.rho == 1.0)
                    fail(c, utility_path(e, t, s) + ".rho", "ces with rho = 1 is linear; use the linear family");
            }
        }
    }

    if (e.endowment.agents() != m || e.endowment.states() != n || e.endowment.goods() != e.goods) {
        fail(c, "agents.endowment", "dimension mismatch");
    } else {
        for (std::size_t t = 0; t < m; ++t)
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t h = 0; h < e.goods; ++h) {
                    double v = e.endowment.at(t, s, h);
                    if (!(v >= 0.0) || !std::isfinite(v))
                        fail(c, agent_path(t) + ".endowment." + e.states.ids[s] + "[" + std::to_string(h) + "]",
                             "must be a finite nonnegative quantity");
                }
    }

    if (!e.priors.empty() && e.priors.size() != m) fail(c, "agents.prior", "one prior slot per agent required");
    for (std::size_t t = 0; t < e.priors.size() && t < m; ++t) {
        if (!e.priors[t]) continue;
        const auto &q = *e.priors[t];
        if (q.size() != n) {
            fail(c, agent_path(t) + ".prior", "one probability per state required");
            continue;
        }
        double sum = 0.0;
        for (double v : q) {
            if (!(v >= 0.0)) fail(c, agent_path(t) + ".prior", "negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) fail(c, agent_path(t) + ".prior", "sum != 1");
    }
    return c;
}

AssumptionCheck check_a1(const Economy &e) {
    AssumptionCheck c{"A1", CheckStatus::pass, {}};
    for (std::size_t s = 0; s < e.states.size(); ++s) {
        Bundle agg = e.aggregate_endowment(s);
        for (std::size_t h = 0; h < e.goods; ++h)
            if (!(agg[h] > 0.0))
                fail(c, "endowment[" + e.states.ids[s] + "][" + std::to_string(h) + "]",
                     "aggregate endowment not strictly positive");
    }
    return c;
}

// (A2): every family is continuous on the orthant; cobb_douglas_log only on its interior.
AssumptionCheck check_a2(const Economy &e) {
    AssumptionCheck c{"A2", CheckStatus::pass, {}};
    for (std::size_t t = 0; t < e.agents.size(); ++t)
        for (std::size_t s = 0; s < e.states.size(); ++s)
            if (e.utility[t][s].interior_only() && c.status == CheckStatus::pass) {
                c.status = CheckStatus::interior_only;
                c.issues.push_back({utility_path(e, t, s), "continuous on the interior only"});
            }
    return c;
}

AssumptionCheck check_a3(const Economy &e) {
    AssumptionCheck c{"A3", CheckStatus::pass, {}};
    for (std::size_t t = 0; t < e.agents.size(); ++t)
        for (std::size_t s = 0; s < e.states.size(); ++s) {
            const auto &u = e.utility[t][s];
            for (std::size_t h = 0; h < u.coeffs.size(); ++h)
                if (!(u.coeffs[h] > 0.0))
                    fail(c, utility_path(e, t, s) + ".params[" + std::to_string(h) + "]",
                         "coefficient must be strictly positive for strict monotonicity");
            if (u.family == Family::cobb_douglas_log && c.status != CheckStatus::fail) {
                double sum = std::accumulate(u.coeffs.begin(), u.coeffs.end(), 0.0);
                if (std::abs(sum - 1.0) > 1e-12) {
                    fail(c, utility_path(e, t, s) + ".params", "cobb_douglas_log exponents must sum to 1");
                } else if (c.status == CheckStatus::pass) {
                    c.status = CheckStatus::interior_only;
                    c.issues.push_back({utility_path(e, t, s), "strictly monotone on the interior only"});
                }
            }
        }
    return c;
}

AssumptionCheck check_a4(const Economy &e) {
    AssumptionCheck c{"A4", CheckStatus::pass, {}};
    for (std::size_t t = 0; t < e.agents.size(); ++t)
        for (std::size_t s = 0; s < e.states.size(); ++s) {
            const auto &u = e.utility[t][s];
            if (u.family == Family::ces && u.rho > 1.0)
                fail(c, utility_path(e, t, s) + ".rho", "ces with rho > 1 is not concave");
            if ((u.family == Family::log_shifted || u.family == Family::cobb_douglas_log) &&
                std::any_of(u.coeffs.begin(), u.coeffs.end(), [](double a) { return a < 0.0; }))
                fail(c, utility_path(e, t, s) + ".params", "negative log weight is convex in that good");
        }
    return c;
}

} // namespace

ValidationReport validate_economy(const Economy &e) {
    ValidationReport r;
    r.checks.push_back(check_structure(e));
    if (r.checks.front().status == CheckStatus::fail) {
        for (const char *name : {"A1", "A2", "A3", "A4"})
            r.checks.push_back({name, CheckStatus::fail, {{"", "not evaluated: structural errors"}}});
        return r;
    }
    r.checks.push_back(check_a1(e));
    r.checks.push_back(check_a2(e));
    r.checks.push_back(check_a3(e));
    r.checks.push_back(check_a4(e));
    return r;
}

void require_valid(const Economy &e) {
    auto r = validate_economy(e);
    for (const auto &c : r.checks)
        if (c.status == CheckStatus::fail) {
            const auto &i = c.issues.front();
            throw EconomyError(i.path.empty() ? c.name : i.path, c.name + ": " + i.message);
        }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t h = 0; h < a.size(); ++h) s += a[h] * b[h];
    return s;
}

double utility_value(const UtilitySpec &u, std::span<const double> x) {
    if (x.size() != u.coeffs.size()) throw EconomyError("bundle", "size mismatch");
    const auto &c = u.coeffs;
    double v = 0.0;
    switch (u.family) {
    case Family::linear:
        for (std::size_t h = 0; h < x.size(); ++h) v += c[h] * x[h];
        return v;
    case Family::log_shifted:
        for (std::size_t h = 0; h < x.size(); ++h) v += c[h] * std::log1p(x[h]);
        return v;
    case Family::ces:
        for (std::size_t h = 0; h < x.size(); ++h) v += c[h] * std::pow(x[h], u.rho);
        return std::pow(v, 1.0 / u.rho);
    case Family::cobb_douglas_log:
        for (std::size_t h = 0; h < x.size(); ++h) {
            if (!(x[h] > 0.0)) return -std::numeric_limits<double>::infinity();
            v += c[h] * std::log(x[h]);
        }
        return v;
    }
    return v;
}

double utility_eval(const UtilitySpec &u, std::span<const double> x) {
    if (x.size() != u.coeffs.size()) throw EconomyError("bundle", "size mismatch");
    for (std::size_t h = 0; h < x.size(); ++h) {
        if (!(x[h] >= 0.0)) throw EconomyError("bundle[" + std::to_string(h) + "]", "negative quantity");
        if (u.interior_only() && !(x[h] > 0.0))
            throw EconomyError("bundle[" + std::to_string(h) + "]",
                               std::string(family_name(u.family)) + " evaluated on the boundary");
    }
    return utility_value(u, x);
}

double utility_eval(const Economy &e, std::size_t t, std::size_t s, std::span<const double> x) {
    return utility_eval(e.spec(t, s), x);
}

} // namespace mree
