#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mree/config.hpp"
#include "mree/io.hpp"

namespace mree {

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_nonconvergence = 3 };

struct RunFlags {
    Config cfg;
    std::string format = "json"; // or "text"
    std::string solution;        // verify: allocation and prices file
    std::string state;           // aggregate-set, probe-continuity
    std::string agent;           // aggregate-set: one agent's C^X instead of the aggregate
    std::vector<double> price;   // aggregate-set, probe-continuity; default: the state's equilibrium
    int steps = 12;              // probe-continuity: p_n = p + 2^-n (e_1 - e_2), n = 1..steps
    bool timing = true;
};

struct RunReport {
    std::string command;
    int exit_code = exit_pass;
    Json config;  // echo of every numeric knob
    Json result;  // numeric content, reproducible for fixed spec and flags
    Json verdict; // "pass", "fail" or "error" plus a message
    double seconds = 0.0;
    bool timing = true;

    std::string render(const std::string &format) const;
};

const std::vector<std::string> &commands();

// Report sections, keyed by state and agent ids.
Json equilibrium_json(const Economy &e, const StateEquilibrium &eq);
Json certificate_json(const Economy &e, const MaximinCertificate &c);
Json maximin_json(const Economy &e, const MaximinResult &r);

// Never throws: errors become a report with exit code 2 or 3.
RunReport run_command(const std::string &cmd, const std::string &spec_path, const RunFlags &flags);

} // namespace mree
