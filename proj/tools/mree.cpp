// Command-line driver: mree <command> <spec.json> [flags]
#include <iostream>

#include <CLI11.hpp>

#include "mree/cli.hpp"

int main(int argc, char **argv) {
    mree::RunFlags flags;
    mree::Config &cfg = flags.cfg;
    std::string command, spec, parallel = "off";

    CLI::App app{"Differential-information exchange economies: equilibria and maximin REE certificates"};
    app.add_option("command", command, "validate | solve | ree | verify | aggregate-set | probe-continuity")
        ->required()
        ->check(CLI::IsMember(mree::commands()));
    app.add_option("spec", spec, "economy specification (JSON)")->required();

    app.add_option("--tol-clear", cfg.tol_clear)->capture_default_str();
    app.add_option("--tol-budget", cfg.tol_budget)->capture_default_str();
    app.add_option("--tol-pref", cfg.tol_pref)->capture_default_str();
    app.add_option("--tol-price", cfg.tol_price)->capture_default_str();
    app.add_option("--tol-dev", cfg.tol_dev)->capture_default_str();
    app.add_option("--resolution", cfg.resolution)->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--grid-n", cfg.grid_n)->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--max-iter", cfg.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--format", flags.format)->capture_default_str()->check(CLI::IsMember({"json", "text"}));
    app.add_option("--parallel", parallel)->capture_default_str()->check(CLI::IsMember({"on", "off"}));

    app.add_option("--solution", flags.solution, "allocation and prices file (verify)");
    app.add_option("--state", flags.state, "state id (aggregate-set, probe-continuity)");
    app.add_option("--agent", flags.agent, "single agent's preferred set (aggregate-set)");
    app.add_option("--price", flags.price, "price vector; defaults to the state's equilibrium")->delimiter(',');
    app.add_option("--steps", flags.steps, "probe length (probe-continuity)")->capture_default_str();
    app.add_flag("!--no-timing", flags.timing, "omit the timing section");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : mree::exit_usage;
    }
    cfg.parallel = parallel == "on";

    mree::RunReport rep = mree::run_command(command, spec, flags);
    std::cout << rep.render(flags.format);
    if (rep.exit_code != mree::exit_pass && rep.verdict.contains("message"))
        std::cerr << "mree " << command << ": " << rep.verdict["message"].get<std::string>() << "\n";
    return rep.exit_code;
}
