#include <doctest.h>

#include <cmath>
#include <random>

#include "mree/correspondences.hpp"
#include "mree/setval.hpp"
#include "support/fixtures.hpp"
#include "support/random_economy.hpp"

using namespace mree;
using namespace mree::testing;

namespace {

Economy single(const UtilitySpec &u, std::vector<double> a) {
    const std::size_t l = a.size();
    return make_economy(l, {1.0}, {1.0}, {u}, {{std::move(a)}});
}

PriceVector pv(std::vector<double> p) { return PriceVector(std::move(p)); }

// Best point of the budget line x1 p1 + x2 p2 = w on a step-`h` grid of x1.
std::vector<double> budget_line_oracle(const UtilitySpec &u, const PriceVector &p, double w, double h) {
    std::vector<double> best, x(2);
    double best_v = -INFINITY;
    for (double x1 = 0.0; x1 * p[0] <= w + 1e-15; x1 += h) {
        x[0] = x1;
        x[1] = std::max(0.0, (w - p[0] * x1) / p[1]);
        double v = utility_value(u, x);
        if (v > best_v) {
            best_v = v;
            best = x;
        }
    }
    return best;
}

} // namespace

TEST_CASE("delta_min goldens") {
    CHECK(delta_min(pv({0.5, 0.5})) == 0.5);
    CHECK(delta_min(pv({0.2, 0.3, 0.5})) == 0.2);
    CHECK(delta_min(PriceVector::uniform(4)) == 0.25);
}

TEST_CASE("truncation bound goldens") {
    auto b = truncation_bound(single(linear({1, 1}), {1, 1}), 0, 0, pv({0.5, 0.5}));
    CHECK(b.gamma == 4.0);
    CHECK(b.upper == std::vector<double>{4.0, 4.0});
    CHECK(truncation_bound(single(linear({1, 1}), {0, 0}), 0, 0, pv({0.3, 0.7})).upper == std::vector<double>{0, 0});
    auto c = truncation_bound(single(linear({1, 1, 1}), {2, 0, 1}), 0, 0, pv({0.2, 0.3, 0.5}));
    CHECK(c.gamma == doctest::Approx(15.0).epsilon(1e-14));
}

TEST_CASE("budget goldens") {
    auto e = single(linear({1, 1}), {1, 1});
    const auto p = pv({0.5, 0.5});
    CHECK(in_budget(e, 0, 0, p, std::vector<double>{1, 1}));
    CHECK(in_budget(e, 0, 0, p, std::vector<double>{0, 0}));
    CHECK_FALSE(in_budget(e, 0, 0, p, std::vector<double>{3, 0}));
}

TEST_CASE("demand goldens") {
    const auto p = pv({0.5, 0.5});
    auto cd = demand(single(cobb_douglas({0.5, 0.5}), {1, 1}), 0, 0, p);
    CHECK(cd[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cd[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(demand(single(linear({2, 1}), {1, 1}), 0, 0, p) == std::vector<double>{2.0, 0.0});
    auto ls = demand(single(log_shifted({0.5, 0.5}), {2, 0}), 0, 0, p);
    CHECK(ls[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ls[1] == doctest::Approx(1.0).epsilon(1e-12));
    // tied linear goods resolve to the lexicographically smallest corner
    CHECK(demand(single(linear({1, 1}), {1, 1}), 0, 0, p) == std::vector<double>{0.0, 2.0});
}

TEST_CASE("log_shifted demand matches the budget-line grid oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(0.2, 3.0), pr(0.1, 0.9), wealth_d(0.1, 4.0);
    for (int k = 0; k < 50; ++k) {
        UtilitySpec u = log_shifted({coef(rng), coef(rng)});
        double a = pr(rng);
        PriceVector p = pv({a, 1.0 - a});
        double w = wealth_d(rng);
        auto x = demand(u, p, w);
        auto o = budget_line_oracle(u, p, w, 1e-4);
        CHECK(std::abs(x[0] - o[0]) <= 2e-4);
        CHECK(utility_value(u, x) >= utility_value(u, o) - 1e-12);
    }
}

TEST_CASE("closed forms agree with the projected-gradient oracle") {
    std::mt19937_64 rng(17);
    std::vector<Family> fams{Family::log_shifted, Family::ces, Family::cobb_douglas_log};
    for (int k = 0; k < 60; ++k) {
        const std::size_t l = 2 + k % 3;
        UtilitySpec u = random_utility(rng, l, fams);
        PriceVector p = random_price(rng, l);
        const double w = 0.5 + k % 4;
        auto x = demand(u, p, w);
        auto y = demand_numeric(u, p, w);
        for (std::size_t h = 0; h < l; ++h) CHECK(std::abs(x[h] - y[h]) <= 1e-6 * (1.0 + x[h]));
        CHECK(utility_value(u, x) >= utility_value(u, y) - 1e-9);
    }
}

TEST_CASE("budget exhaustion and homogeneity of demand") {
    std::mt19937_64 rng(23);
    for (int seed = 1; seed <= 30; ++seed) {
        auto e = random_economy(seed);
        for (std::size_t t = 0; t < e.agents.size(); ++t)
            for (std::size_t s = 0; s < e.states.size(); ++s) {
                PriceVector p = random_price(rng, e.goods);
                auto x = demand(e, t, s, p);
                CHECK(std::abs(dot(p.span(), x) - dot(p.span(), e.endow(t, s))) <= 1e-10);
                std::vector<double> scaled(p.values());
                for (double &v : scaled) v *= 3.7;
                auto y = demand(e, t, s, PriceVector::normalized(scaled));
                for (std::size_t h = 0; h < e.goods; ++h) CHECK(std::abs(x[h] - y[h]) <= 1e-12 * (1.0 + x[h]));
            }
    }
}

TEST_CASE("preferred-set membership examples") {
    auto e = single(log_shifted({0.4, 0.6}), {1, 2});
    const auto p = pv({0.3, 0.7});
    PreferredSet c(e, 0, 0, p);
    auto d = c.demand_point();
    CHECK(c.contains(d));
    CHECK_FALSE(c.contains(std::vector<double>{0, 0}));
    std::vector<double> up{d[0] + 1, d[1] + 1};
    CHECK(up[0] <= c.box().gamma);
    CHECK(c.contains(up));
    std::vector<double> far{c.box().gamma + 1, d[1]};
    CHECK_FALSE(c.contains(far));
    CHECK(preferred_membership(e, 0, 0, p, far, {}, false));
}

TEST_CASE("sampled clouds") {
    SUBCASE("one good: the cloud is the endowment") {
        auto cloud = sample_preferred_set(single(linear({1}), {2}), 0, 0, PriceVector::uniform(1), 0.5);
        cloud.canonicalize();
        REQUIRE(cloud.size() == 1);
        CHECK(cloud.point(0)[0] == 2.0);
    }
    SUBCASE("linear c = (1,1) matches the membership predicate on the grid") {
        auto e = single(linear({1, 1}), {1, 1});
        const auto p = pv({0.5, 0.5});
        const double r = 0.25;
        auto cloud = sample_preferred_set(e, 0, 0, p, r);
        std::size_t expected = 0;
        for (int i = 0; i <= 16; ++i)
            for (int j = 0; j <= 16; ++j)
                if (i * r + j * r >= 2.0 - 1e-12) ++expected;
        CHECK(cloud.size() == expected); // the demand point is already a lattice point
        bool has_demand = false;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            auto x = cloud.point(i);
            CHECK(x[0] + x[1] >= 2.0 - 1e-9);
            CHECK(x[0] <= 4.0);
            CHECK(x[1] <= 4.0);
            has_demand = has_demand || (x[0] == 0.0 && x[1] == 2.0);
        }
        CHECK(has_demand);
    }
    SUBCASE("column extremes equal the hull-candidate sample") {
        auto e = random_economy(9);
        std::mt19937_64 rng(1);
        for (std::size_t t = 0; t < e.agents.size(); ++t) {
            PriceVector p = random_price(rng, e.goods, 0.2);
            auto full = sample_preferred_set(e, t, 0, p, 0.25, {}, SampleMode::full);
            auto hull = sample_preferred_set(e, t, 0, p, 0.25, {}, SampleMode::hull_candidates);
            auto ext = column_extremes(full);
            auto hc = column_extremes(hull);
            ext.canonicalize();
            hc.canonicalize();
            CHECK(ext.coords() == hc.coords());
        }
    }
    SUBCASE("too fine a resolution is refused with a suggestion") {
        Config cfg;
        cfg.max_points = 1000;
        auto e = single(linear({1, 1}), {1, 1});
        try {
            sample_preferred_set(e, 0, 0, pv({0.5, 0.5}), 0.01, cfg);
            FAIL("expected SamplingError");
        } catch (const SamplingError &err) {
            CHECK(err.suggested_resolution() > 0.01);
        }
    }
}

TEST_CASE("every sampled point costs at least the endowment and lies in the box") {
    std::mt19937_64 rng(29);
    std::size_t points = 0;
    for (int seed = 1; seed <= 12; ++seed) {
        auto e = random_economy(seed);
        for (std::size_t t = 0; t < e.agents.size(); ++t)
            for (std::size_t s = 0; s < e.states.size(); ++s) {
                PriceVector p = random_price(rng, e.goods, 0.15);
                auto box = truncation_bound(e, t, s, p);
                const double res = box.gamma / 12.0;
                auto cloud = sample_preferred_set(e, t, s, p, res);
                const double wealth_ts = dot(p.span(), e.endow(t, s));
                for (std::size_t i = 0; i < cloud.size(); ++i) {
                    auto x = cloud.point(i);
                    CHECK(dot(p.span(), x) >= wealth_ts - 1e-8);
                    for (double v : x) CHECK(v <= box.gamma * (1 + 1e-12));
                    ++points;
                }
            }
    }
    CHECK(points > 1000);
}

TEST_CASE("budget set lies inside the truncation box") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int seed = 1; seed <= 10; ++seed) {
        auto e = random_economy(seed);
        for (std::size_t t = 0; t < e.agents.size(); ++t) {
            PriceVector p = random_price(rng, e.goods);
            const double w = wealth(e, t, 0, p);
            auto box = truncation_bound(e, t, 0, p);
            for (int k = 0; k < 50; ++k) {
                // random point on the budget frontier
                std::vector<double> share(e.goods), x(e.goods);
                double tot = 0.0;
                for (double &v : share) tot += (v = unit(rng));
                for (std::size_t h = 0; h < e.goods; ++h) x[h] = share[h] / tot * w / p[h];
                REQUIRE(in_budget(e, t, 0, p, x));
                for (double v : x) CHECK(v <= box.gamma * (1 + 1e-12));
            }
        }
    }
}
