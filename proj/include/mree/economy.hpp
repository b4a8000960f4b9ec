#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mree/partition.hpp"

namespace mree {

using Bundle = std::vector<double>;

class EconomyError : public std::runtime_error {
public:
    EconomyError(std::string path, const std::string &what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string &path() const { return path_; }

private:
    std::string path_;
};

enum class Family { linear, log_shifted, ces, cobb_douglas_log };

const char *family_name(Family f);
std::optional<Family> family_from_name(const std::string &name);

// Utility of one agent in one state.
//   linear:           sum c_h x_h
//   log_shifted:      sum a_h ln(1 + x_h)
//   ces:              (sum w_h x_h^rho)^(1/rho)
//   cobb_douglas_log: sum a_h ln x_h          (interior only)
struct UtilitySpec {
    Family family = Family::linear;
    std::vector<double> coeffs;
    double rho = 0.5; // ces only

    bool interior_only() const { return family == Family::cobb_douglas_log; }
    bool operator==(const UtilitySpec &) const = default;
};

struct StateSpace {
    std::vector<std::string> ids;
    std::vector<double> probs;

    std::size_t size() const { return ids.size(); }
    bool operator==(const StateSpace &) const = default;
};

struct AgentGrid {
    std::vector<std::string> ids;
    std::vector<double> weights;

    std::size_t size() const { return ids.size(); }
    double total_mass() const;
    bool operator==(const AgentGrid &) const = default;
};

// Dense agent x state x good tensor of nonnegative quantities. Used for
// endowments and allocations alike.
class BundleTensor {
public:
    BundleTensor() = default;
    BundleTensor(std::size_t agents, std::size_t states, std::size_t goods, double fill = 0.0)
        : agents_(agents), states_(states), goods_(goods), data_(agents * states * goods, fill) {}

    std::size_t agents() const { return agents_; }
    std::size_t states() const { return states_; }
    std::size_t goods() const { return goods_; }

    double &at(std::size_t t, std::size_t s, std::size_t h) { return data_[index(t, s, h)]; }
    double at(std::size_t t, std::size_t s, std::size_t h) const { return data_[index(t, s, h)]; }

    std::span<double> bundle(std::size_t t, std::size_t s) {
        return {data_.data() + index(t, s, 0), goods_};
    }
    std::span<const double> bundle(std::size_t t, std::size_t s) const {
        return {data_.data() + index(t, s, 0), goods_};
    }
    void set_bundle(std::size_t t, std::size_t s, std::span<const double> x);

    const std::vector<double> &data() const { return data_; }
    bool operator==(const BundleTensor &) const = default;

private:
    std::size_t index(std::size_t t, std::size_t s, std::size_t h) const {
        return (t * states_ + s) * goods_ + h;
    }
    std::size_t agents_ = 0, states_ = 0, goods_ = 0;
    std::vector<double> data_;
};

using Endowment = BundleTensor;
using Allocation = BundleTensor;

// The discretized economy. Plain data: construct, validate, then share as const.
struct Economy {
    std::size_t goods = 0;
    StateSpace states;
    AgentGrid agents;
    std::vector<Partition> partitions;             // per agent
    std::vector<std::vector<UtilitySpec>> utility; // [agent][state]
    Endowment endowment;
    std::vector<std::optional<std::vector<double>>> priors; // per agent, inert

    const UtilitySpec &spec(std::size_t t, std::size_t s) const { return utility[t][s]; }
    std::span<const double> endow(std::size_t t, std::size_t s) const { return endowment.bundle(t, s); }
    Bundle aggregate_endowment(std::size_t s) const;

    std::size_t state_index(const std::string &id) const;
    std::size_t agent_index(const std::string &id) const;

    bool operator==(const Economy &) const = default;
};

// Interior point of the price simplex.
class PriceVector {
public:
    PriceVector() = default;
    // Throws EconomyError unless every coordinate >= p_min and the sum is 1 within 1e-12.
    explicit PriceVector(std::vector<double> p, double p_min = 1e-9);

    // Clamp to p_min and renormalize; accepts any nonnegative nonzero vector.
    static PriceVector normalized(std::span<const double> raw, double p_min = 1e-9);
    static PriceVector uniform(std::size_t goods);

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t h) const { return p_[h]; }
    const std::vector<double> &values() const { return p_; }
    std::span<const double> span() const { return p_; }
    bool operator==(const PriceVector &) const = default;

private:
    std::vector<double> p_;
};

enum class CheckStatus { pass, interior_only, fail };
const char *status_name(CheckStatus s);

struct ValidationIssue {
    std::string path;
    std::string message;
};

struct AssumptionCheck {
    std::string name; // "structure", "A1".."A4"
    CheckStatus status = CheckStatus::pass;
    std::vector<ValidationIssue> issues;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;

    bool ok() const; // no check failed
    const AssumptionCheck &check(const std::string &name) const;
    std::string summary() const;
};

// Structural invariants plus assumptions (A1)-(A4). Monotonicity and
// concavity are decided analytically from the family parameters.
ValidationReport validate_economy(const Economy &e);

// Throws EconomyError carrying the first failing path.
void require_valid(const Economy &e);

double dot(std::span<const double> a, std::span<const double> b);

// Exact family formula. Throws EconomyError if x is negative, has the wrong
// size, or sits on the boundary of an interior-only family.
double utility_eval(const UtilitySpec &u, std::span<const double> x);
double utility_eval(const Economy &e, std::size_t t, std::size_t s, std::span<const double> x);

// Like utility_eval, but boundary points of interior-only families map to -inf.
double utility_value(const UtilitySpec &u, std::span<const double> x);

} // namespace mree
