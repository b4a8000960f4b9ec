#include "mree/cli.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "mree/correspondences.hpp"
#include "mree/setval.hpp"
#include "mree/walras.hpp"

namespace mree {

const std::vector<std::string> &commands() {
    static const std::vector<std::string> names{"validate", "solve", "ree", "verify", "aggregate-set",
                                                "probe-continuity"};
    return names;
}

namespace {

std::string hex(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json partition_json(const Economy &e, const Partition &p) {
    Json out = Json::array();
    for (const auto &b : p.blocks()) {
        Json block = Json::array();
        for (std::size_t s : b) block.push_back(e.states.ids[s]);
        out.push_back(std::move(block));
    }
    return out;
}

Json cloud_json(const CompactSetApprox &c) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < c.size(); ++i) pts.push_back(vector_json(c.point(i)));
    return pts;
}

void flatten(const Json &j, const std::string &prefix, std::ostringstream &os) {
    if (j.is_object()) {
        for (const auto &[k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array()) &&
               !(j.front().is_array() && !j.front().empty() && j.front().front().is_primitive())) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << " = " << j.dump() << "\n";
    }
}

const char *verdict_name(bool pass) { return pass ? "pass" : "fail"; }

std::size_t lookup_state(const Economy &e, const std::string &id) {
    if (id.empty()) throw ParseError("--state is required for this command", "--state");
    try {
        return e.state_index(id);
    } catch (const std::exception &) {
        throw ParseError("--state: unknown state id '" + id + "'", "--state");
    }
}

PriceVector price_for(const Economy &e, std::size_t s, const RunFlags &flags) {
    if (flags.price.empty()) return solve_state_equilibrium(e, s, flags.cfg).price;
    if (flags.price.size() != e.goods)
        throw ParseError("--price: expected " + std::to_string(e.goods) + " coordinates", "--price");
    try {
        return PriceVector(flags.price, flags.cfg.p_min);
    } catch (const EconomyError &err) {
        throw ParseError(std::string("--price: ") + err.what(), "--price");
    }
}

} // namespace

Json equilibrium_json(const Economy &e, const StateEquilibrium &eq) {
    Json j = Json::object();
    j["state"] = e.states.ids[eq.state];
    j["price"] = vector_json(eq.price.span());
    Json alloc = Json::object();
    for (std::size_t t = 0; t < eq.allocation.size(); ++t) alloc[e.agents.ids[t]] = vector_json(eq.allocation[t]);
    j["allocation"] = std::move(alloc);
    j["clearing_residual"] = vector_json(eq.clearing_residual);
    j["residual_sup"] = number(sup_norm(eq.clearing_residual));
    j["iterations"] = eq.iterations;
    j["method"] = eq.method;
    j["trajectory_hash"] = hex(eq.trajectory_hash);
    return j;
}

Json certificate_json(const Economy &e, const MaximinCertificate &c) {
    Json j = Json::object();
    Json budget = Json::object();
    for (std::size_t t = 0; t < c.budget_residual.size(); ++t) {
        Json row = Json::object();
        for (std::size_t s = 0; s < c.budget_residual[t].size(); ++s) row[e.states.ids[s]] = number(c.budget_residual[t][s]);
        budget[e.agents.ids[t]] = std::move(row);
    }
    j["budget_residual"] = std::move(budget);
    Json clearing = Json::object();
    for (std::size_t s = 0; s < c.clearing_residual.size(); ++s)
        clearing[e.states.ids[s]] = vector_json(c.clearing_residual[s]);
    j["clearing_residual"] = std::move(clearing);
    j["max_budget_residual"] = number(c.max_budget_residual);
    j["max_clearing_residual"] = number(c.max_clearing_residual);

    Json dev = Json::object();
    dev["grid_n"] = c.deviation.grid_n;
    dev["best_improvement"] = number(c.deviation.best_improvement);
    dev["agent"] = e.agents.ids.at(c.deviation.agent);
    dev["state"] = e.states.ids.at(c.deviation.state);
    Json imp = Json::object();
    for (std::size_t t = 0; t < c.deviation.improvement.size(); ++t) {
        Json row = Json::object();
        for (std::size_t s = 0; s < c.deviation.improvement[t].size(); ++s)
            row[e.states.ids[s]] = number(c.deviation.improvement[t][s]);
        imp[e.agents.ids[t]] = std::move(row);
    }
    dev["improvement"] = std::move(imp);
    j["deviation"] = std::move(dev);

    Json info = Json::object();
    info["tol_price"] = c.info.tol_price;
    info["sigma_pi"] = partition_json(e, c.info.sigma);
    Json joined = Json::object();
    for (std::size_t t = 0; t < c.info.joined.size(); ++t) joined[e.agents.ids[t]] = partition_json(e, c.info.joined[t]);
    info["joined"] = std::move(joined);
    j["information"] = std::move(info);

    j["budget_ok"] = c.budget_ok;
    j["clearing_ok"] = c.clearing_ok;
    j["deviation_ok"] = c.deviation_ok;
    j["verdict"] = verdict_name(c.pass);
    return j;
}

Json maximin_json(const Economy &e, const MaximinResult &r) {
    Json j = Json::object();
    Json eqs = Json::array();
    for (const auto &eq : r.equilibria) eqs.push_back(equilibrium_json(e, eq));
    j["equilibria"] = std::move(eqs);
    j["solution"] = solution_to_json(e, r.allocation, r.prices);
    Json repaired = Json::array();
    for (auto [t, s] : r.repaired) repaired.push_back({e.agents.ids[t], e.states.ids[s]});
    j["repaired"] = std::move(repaired);
    j["certificate"] = certificate_json(e, r.certificate);
    return j;
}

std::string RunReport::render(const std::string &format) const {
    if (format == "text") {
        std::ostringstream os;
        os << "command: " << command << "\n";
        os << "verdict: " << verdict.value("status", "") << "\n";
        if (verdict.contains("message")) os << "message: " << verdict["message"].get<std::string>() << "\n";
        os << "exit code: " << exit_code << "\n\n[config]\n";
        flatten(config, "", os);
        os << "\n[result]\n";
        flatten(result, "", os);
        if (timing) os << "\n[timing]\nseconds = " << seconds << "\n";
        return os.str();
    }
    Json doc = Json::object();
    doc["command"] = command;
    doc["config"] = config;
    doc["result"] = result;
    doc["verdict"] = verdict;
    doc["exit_code"] = exit_code;
    if (timing) doc["timing"] = {{"seconds", seconds}};
    return doc.dump(2) + "\n";
}

RunReport run_command(const std::string &cmd, const std::string &spec_path, const RunFlags &flags) {
    const auto start = std::chrono::steady_clock::now();
    const Config &cfg = flags.cfg;
    RunReport rep;
    rep.command = cmd;
    rep.config = config_json(cfg);
    rep.result = Json::object();
    rep.timing = flags.timing;

    auto conclude = [&](bool pass, const std::string &message = "") {
        rep.exit_code = pass ? exit_pass : exit_fail;
        rep.verdict = {{"status", verdict_name(pass)}};
        if (!message.empty()) rep.verdict["message"] = message;
    };
    auto error = [&](int code, const std::string &message) {
        rep.exit_code = code;
        rep.verdict = {{"status", "error"}, {"message", message}};
    };

    try {
        if (std::find(commands().begin(), commands().end(), cmd) == commands().end())
            throw ParseError("unknown command '" + cmd + "'", "command");

        if (cmd == "validate") {
            Economy e = parse_economy(spec_path, false);
            ValidationReport vr = validate_economy(e);
            Json checks = Json::array();
            for (const auto &c : vr.checks) {
                Json issues = Json::array();
                for (const auto &i : c.issues) issues.push_back({{"path", i.path}, {"message", i.message}});
                checks.push_back({{"name", c.name}, {"status", status_name(c.status)}, {"issues", std::move(issues)}});
            }
            rep.result["checks"] = std::move(checks);
            conclude(vr.ok());
            // A structurally broken description is an input error, not a failed assumption.
            if (vr.check("structure").status == CheckStatus::fail) {
                const auto &i = vr.check("structure").issues.front();
                error(exit_usage, i.path + ": " + i.message);
            }
        } else if (cmd == "solve") {
            Economy e = parse_economy(spec_path);
            Json states = Json::array();
            for (const auto &eq : solve_all_states(e, cfg)) states.push_back(equilibrium_json(e, eq));
            rep.result["states"] = std::move(states);
            conclude(true);
        } else if (cmd == "ree") {
            Economy e = parse_economy(spec_path);
            MaximinResult r = compute_maximin_ree(e, cfg);
            rep.result = maximin_json(e, r);
            conclude(r.certificate.pass);
        } else if (cmd == "verify") {
            Economy e = parse_economy(spec_path);
            if (flags.solution.empty()) throw ParseError("--solution is required for verify", "--solution");
            Solution sol = parse_solution(e, flags.solution);
            MaximinCertificate c = verify_maximin_ree(e, sol.allocation, sol.prices, cfg);
            rep.result["certificate"] = certificate_json(e, c);
            conclude(c.pass);
        } else if (cmd == "aggregate-set") {
            Economy e = parse_economy(spec_path);
            const std::size_t s = lookup_state(e, flags.state);
            const PriceVector p = price_for(e, s, flags);
            rep.result["state"] = e.states.ids[s];
            rep.result["price"] = vector_json(p.span());
            rep.result["resolution"] = cfg.resolution;
            CompactSetApprox cloud;
            if (!flags.agent.empty()) {
                std::size_t t;
                try {
                    t = e.agent_index(flags.agent);
                } catch (const std::exception &) {
                    throw ParseError("--agent: unknown agent id '" + flags.agent + "'", "--agent");
                }
                rep.result["agent"] = flags.agent;
                cloud = sample_preferred_set(e, t, s, p, cfg.resolution, cfg);
            } else {
                cloud = aggregate_preferred_set(e, s, p, cfg.resolution, cfg);
                auto cert = aggregate_excess_certificate(e, s, p, cfg.resolution, cfg);
                rep.result["excess_distance"] = number(cert.distance);
                rep.result["excess_method"] = cert.method;
            }
            rep.result["method"] = method_name(cloud.method());
            rep.result["size"] = cloud.size();
            rep.result["points"] = cloud_json(cloud);
            conclude(!cloud.empty());
        } else if (cmd == "probe-continuity") {
            Economy e = parse_economy(spec_path);
            if (e.goods < 2) throw ParseError("probe-continuity needs at least two goods", "goods");
            const std::size_t s = lookup_state(e, flags.state);
            const PriceVector p = price_for(e, s, flags);
            std::vector<PriceVector> seq;
            Json ns = Json::array(), skipped = Json::array();
            for (int n = 1; n <= flags.steps; ++n) {
                std::vector<double> q = p.values();
                q[0] += std::ldexp(1.0, -n);
                q[1] -= std::ldexp(1.0, -n);
                if (q[0] < cfg.p_min || q[1] < cfg.p_min) {
                    skipped.push_back(n);
                    continue;
                }
                seq.push_back(PriceVector::normalized(q, cfg.p_min));
                ns.push_back(n);
            }
            auto d = continuity_probe(e, s, seq, p, cfg.resolution, cfg);
            rep.result["state"] = e.states.ids[s];
            rep.result["price"] = vector_json(p.span());
            rep.result["n"] = std::move(ns);
            rep.result["skipped"] = std::move(skipped);
            rep.result["distances"] = vector_json(d);
            conclude(true);
        }
    } catch (const ParseError &err) {
        error(exit_usage, err.what());
    } catch (const EconomyError &err) {
        error(exit_usage, err.what());
    } catch (const SamplingError &err) {
        error(exit_usage, std::string(err.what()) + " (try --resolution " + std::to_string(err.suggested_resolution()) + ")");
    } catch (const PriceSystemError &err) {
        Json failed = Json::array();
        for (const auto &s : err.failed_states()) failed.push_back(s);
        rep.result["failed_states"] = std::move(failed);
        rep.result["best_residual"] = number(err.best_residual());
        error(exit_nonconvergence, err.what());
    } catch (const SolverError &err) {
        rep.result["best_residual"] = number(err.best_residual());
        error(exit_nonconvergence, err.what());
    } catch (const std::exception &err) {
        error(exit_usage, std::string(cmd) + ": " + err.what());
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace mree
