#pragma once

#include <cstddef>
#include <cstdint>

namespace mree {

// Numerical knobs shared by every module. Every field is echoed in run
// reports so certificates are self-describing.
struct Config {
    double tol_clear = 1e-8;   // market clearing, sup norm
    double tol_budget = 1e-10; // budget slack
    double tol_pref = 1e-9;    // utility slack for preferred-set membership
    double tol_price = 1e-7;   // sigma(pi) grouping
    double tol_dev = 1e-4;     // maximin deviation search
    double tol_tie = 1e-12;    // relative tie band for linear argmax faces
    double p_min = 1e-9;       // floor on price coordinates
    double resolution = 1e-2;  // lattice step for preferred-set sampling
    int grid_n = 50;           // budget-frontier grid for deviation search
    int max_iter = 50000;      // tatonnement iterations
    double step0 = 1.0;        // initial tatonnement step
    int demand_max_iter = 10000;
    double demand_tol = 1e-10;
    std::size_t max_points = 4'000'000;   // per sampled cloud
    std::size_t combo_budget = 1'000'000; // exact Minkowski enumeration
    std::size_t deviation_combo_budget = 100'000;
    int support_directions = 720;
    int selection_samples = 20000;
    int local_window = 3; // lattice cells around each selection target
    std::uint64_t seed = 20240607;
    bool parallel = false;
};

} // namespace mree
