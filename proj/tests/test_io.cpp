#include <doctest.h>

#include <cmath>

#include "mree/cli.hpp"
#include "mree/io.hpp"
#include "support/fixtures.hpp"
#include "support/random_economy.hpp"

using namespace mree;
using namespace mree::testing;

namespace {

std::string spec(const std::string &name) { return std::string(MREE_SPEC_DIR) + "/" + name; }

RunFlags quiet() {
    RunFlags f;
    f.timing = false;
    return f;
}

} // namespace

TEST_CASE("parse examples") {
    auto e = parse_economy(spec("minimal.json"));
    CHECK(e.goods == 1);
    CHECK(e.states.ids == std::vector<std::string>{"s1"});
    CHECK(e.agents.ids == std::vector<std::string>{"t1"});
    CHECK(e.endow(0, 0)[0] == 1.0);

    try {
        parse_economy(spec("bad_probs.json"));
        FAIL("expected an error");
    } catch (const EconomyError &err) {
        CHECK(err.path() == "states.prob");
    }

    auto text = read_file(spec("minimal.json"));
    text.replace(text.find("\"s1\": [1.0]"), 11, "\"s1\": [-1.0]");
    try {
        parse_economy_text(text);
        FAIL("expected an error");
    } catch (const EconomyError &err) {
        CHECK(err.path() == "agents[0].endowment.s1[0]");
    }
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_economy(spec("syntax_error.json"));
        FAIL("expected a parse error");
    } catch (const ParseError &err) {
        CHECK(err.line() == 4);
        CHECK(err.column() == 10); // just past the token that should have been a comma
    }
}

TEST_CASE("structural parse errors name the field") {
    auto doc = parse_json_text(read_file(spec("minimal.json")));
    doc["agents"][0]["utility"]["family"] = "quadratic";
    CHECK_THROWS_AS(economy_from_json(doc), ParseError);
    auto doc2 = parse_json_text(read_file(spec("minimal.json")));
    doc2["agents"][0]["partition"] = Json::array({Json::array({"s9"})});
    try {
        economy_from_json(doc2);
        FAIL("expected an error");
    } catch (const EconomyError &err) {
        CHECK(err.path() == "agents[0].partition[0][0]");
    }
}

TEST_CASE("per-state overrides expand") {
    auto e = parse_economy(spec("edgeworth_two_state.json"));
    REQUIRE(e.states.size() == 2);
    CHECK(e.spec(0, 0).coeffs[0] == 0.6);
    CHECK(e.spec(0, 1).coeffs[0] == 0.5);
    CHECK(e.priors[0].has_value());
}

TEST_CASE("serialize then parse is field exact") {
    std::vector<Economy> all{parse_economy(spec("edgeworth_two_state.json")), edgeworth()};
    RandomEconomyOptions opt;
    opt.families = {Family::linear, Family::log_shifted, Family::ces, Family::cobb_douglas_log};
    for (int seed = 1; seed <= 40; ++seed) all.push_back(random_economy(seed, opt));
    for (const auto &e : all) {
        auto back = parse_economy_text(serialize_economy(e), false);
        CHECK(back == e);
        CHECK(serialize_economy(back) == serialize_economy(e));
    }
}

TEST_CASE("solutions round trip") {
    auto e = parse_economy(spec("edgeworth.json"));
    auto sol = parse_solution(e, spec("edgeworth_solution.json"));
    auto again = solution_from_json(e, solution_to_json(e, sol.allocation, sol.prices));
    CHECK(again.allocation == sol.allocation);
    CHECK(again.prices == sol.prices);
    auto doc = solution_to_json(e, sol.allocation, sol.prices);
    doc["schema_version"] = 2;
    CHECK_THROWS_AS(solution_from_json(e, doc), ParseError);
}

TEST_CASE("non-finite numbers serialize as strings") {
    CHECK(number(INFINITY) == "inf");
    CHECK(number(-INFINITY) == "-inf");
    CHECK(number(NAN) == "nan");
    CHECK(number(0.25) == 0.25);
}

TEST_CASE("command examples") {
    auto v = run_command("validate", spec("minimal.json"), quiet());
    CHECK(v.exit_code == exit_pass);
    CHECK(v.verdict["status"] == "pass");

    auto r = run_command("ree", spec("edgeworth.json"), quiet());
    CHECK(r.exit_code == exit_pass);
    CHECK(r.result["certificate"]["verdict"] == "pass");
    auto p = r.result["solution"]["prices"]["s1"];
    CHECK(std::abs(p[0].get<double>() - 5.0 / 9.0) <= 1e-9);
    CHECK(std::abs(p[1].get<double>() - 4.0 / 9.0) <= 1e-9);

    RunFlags f = quiet();
    f.solution = spec("edgeworth_tampered.json");
    auto t = run_command("verify", spec("edgeworth.json"), f);
    CHECK(t.exit_code == exit_fail);
    CHECK(t.verdict["status"] == "fail");

    f.solution = spec("edgeworth_solution.json");
    CHECK(run_command("verify", spec("edgeworth.json"), f).exit_code == exit_pass);

    CHECK(run_command("validate", spec("ces_rho_1_5.json"), quiet()).exit_code == exit_fail);
    CHECK(run_command("validate", spec("bad_probs.json"), quiet()).exit_code == exit_usage);
    CHECK(run_command("solve", spec("syntax_error.json"), quiet()).exit_code == exit_usage);
    CHECK(run_command("nonsense", spec("minimal.json"), quiet()).exit_code == exit_usage);
    CHECK(run_command("solve", spec("does_not_exist.json"), quiet()).exit_code == exit_usage);

    RunFlags hard = quiet();
    hard.cfg.max_iter = 1;
    hard.cfg.tol_clear = 1e-300;
    auto n = run_command("solve", spec("three_goods.json"), hard);
    CHECK(n.exit_code == exit_nonconvergence);
    CHECK(n.result.contains("best_residual"));
}

TEST_CASE("reports echo the configuration and are deterministic") {
    RunFlags f = quiet();
    f.state = "s1";
    for (const char *cmd : {"solve", "ree", "aggregate-set", "probe-continuity"}) {
        auto a = run_command(cmd, spec("edgeworth_two_state.json"), f);
        auto b = run_command(cmd, spec("edgeworth_two_state.json"), f);
        CHECK(a.exit_code == exit_pass);
        CHECK(a.render("json") == b.render("json"));
        CHECK(a.render("text") == b.render("text"));
        for (const char *k : {"tol_clear", "tol_budget", "tol_pref", "tol_price", "tol_dev", "resolution", "grid_n",
                              "max_iter", "seed", "parallel"})
            CHECK(a.config.contains(k));
    }
}

TEST_CASE("aggregate-set and probe flags") {
    RunFlags f = quiet();
    f.state = "s1";
    f.price = {0.5, 0.5};
    f.cfg.resolution = 0.1;
    auto a = run_command("aggregate-set", spec("edgeworth.json"), f);
    CHECK(a.exit_code == exit_pass);
    CHECK(a.result["size"].get<std::size_t>() == a.result["points"].size());
    CHECK(a.result.contains("excess_distance"));

    f.agent = "t1";
    auto one = run_command("aggregate-set", spec("edgeworth.json"), f);
    CHECK(one.result["agent"] == "t1");

    f.agent = "nobody";
    CHECK(run_command("aggregate-set", spec("edgeworth.json"), f).exit_code == exit_usage);
    f.agent.clear();
    f.price = {0.5, 0.6};
    CHECK(run_command("aggregate-set", spec("edgeworth.json"), f).exit_code == exit_usage);

    RunFlags g = quiet();
    g.state = "s1";
    g.steps = 4;
    g.cfg.resolution = 0.05;
    auto probe = run_command("probe-continuity", spec("edgeworth.json"), g);
    CHECK(probe.exit_code == exit_pass);
    CHECK(probe.result["skipped"] == Json::array({1}));
    CHECK(probe.result["distances"].size() == 3);
}
