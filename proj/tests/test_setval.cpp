#include <doctest.h>

#include <cmath>
#include <random>

#include "mree/setval.hpp"
#include "support/fixtures.hpp"
#include "support/random_economy.hpp"

using namespace mree;
using namespace mree::testing;

namespace {

CompactSetApprox cloud(const std::vector<std::vector<double>> &pts, bool convex = false) {
    return CompactSetApprox::from_points(pts, 0.0, convex);
}

CompactSetApprox interval(double hi, double step) {
    CompactSetApprox c(1, step, true);
    const int n = static_cast<int>(std::lround(hi / step));
    for (int k = 0; k <= n; ++k) {
        double x = k * step;
        c.push(std::span<const double>(&x, 1));
    }
    return c;
}

CompactSetApprox random_cloud(std::mt19937_64 &rng, std::size_t dim, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 3.0);
    CompactSetApprox c(dim);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (double &v : x) v = u(rng);
        c.push(x);
    }
    return c;
}

double support(const CompactSetApprox &a, std::span<const double> u) {
    double best = -INFINITY;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, dot(a.point(i), u));
    return best;
}

bool same_points(CompactSetApprox a, CompactSetApprox b) {
    a.canonicalize();
    b.canonicalize();
    return a.size() == b.size() && hausdorff_distance(a, b) <= 1e-12;
}

} // namespace

TEST_CASE("hausdorff goldens") {
    auto a = cloud({{0, 0}, {1, 0}});
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(cloud({{0, 0}}), cloud({{1, 0}})) == 1.0);
    CHECK(hausdorff_distance(a, cloud({{0, 0}})) == 1.0);
    CHECK(directed_hausdorff(cloud({{0, 0}}), a) == 0.0);
}

TEST_CASE("hausdorff metric axioms on random clouds") {
    std::mt19937_64 rng(41);
    for (int k = 0; k < 200; ++k) {
        const std::size_t dim = 1 + k % 3;
        auto a = random_cloud(rng, dim, 1 + k % 9);
        auto b = random_cloud(rng, dim, 1 + k % 5);
        auto c = random_cloud(rng, dim, 2 + k % 7);
        const double ab = hausdorff_distance(a, b);
        CHECK(ab == hausdorff_distance(b, a));
        CHECK(ab > 0.0);
        CHECK(hausdorff_distance(a, a) == 0.0);
        CHECK(hausdorff_distance(a, c) <= ab + hausdorff_distance(b, c) + 1e-12);
    }
}

TEST_CASE("support distance") {
    auto dirs = direction_grid(2, 720);
    for (const auto &u : dirs) CHECK(std::abs(std::hypot(u[0], u[1]) - 1.0) <= 1e-14);
    auto a = cloud({{0, 0}, {1, 0}, {0, 1}}, true);
    CHECK(support_hausdorff(a, a, dirs) == 0.0);
    const double d = support_hausdorff(cloud({{0, 0}}), cloud({{3, 4}}), dirs);
    CHECK(d <= 5.0);
    CHECK(d >= 5.0 * std::cos(M_PI / 720.0));
    for (const auto &u : direction_grid(3, 200)) CHECK(std::abs(std::sqrt(dot(u, u)) - 1.0) <= 1e-14);
}

TEST_CASE("kuratowski goldens") {
    SUBCASE("constant sequence") {
        auto a = cloud({{0, 1}, {2, 0}});
        auto lim = kuratowski_limits({a, a, a, a}, 3, 1e-9);
        REQUIRE(lim.lower);
        REQUIRE(lim.upper);
        CHECK(same_points(*lim.lower, a));
        CHECK(same_points(*lim.upper, a));
    }
    SUBCASE("alternating singletons") {
        SetSequence seq;
        for (int n = 0; n < 10; ++n) seq.push_back(cloud({{static_cast<double>(n % 2)}}));
        auto lim = kuratowski_limits(seq, 6, 1e-6);
        CHECK_FALSE(lim.lower);
        REQUIRE(lim.upper);
        CHECK(same_points(*lim.upper, cloud({{0}, {1}})));
    }
    SUBCASE("convergent singletons") {
        SetSequence seq;
        for (int n = 1; n <= 1100; ++n) seq.push_back(cloud({{1.0 / n}}));
        auto lim = kuratowski_limits(seq, 101, 1e-2);
        REQUIRE(lim.lower);
        REQUIRE(lim.upper);
        for (const auto *c : {&*lim.lower, &*lim.upper})
            for (std::size_t i = 0; i < c->size(); ++i) CHECK(c->point(i)[0] <= 1e-2 + 1.0 / 1000);
        CHECK(hausdorff_distance(*lim.lower, *lim.upper) <= 1e-2);
    }
}

TEST_CASE("lower limit is contained in upper limit") {
    std::mt19937_64 rng(43);
    for (int k = 0; k < 60; ++k) {
        SetSequence seq;
        const std::size_t len = 3 + k % 6;
        for (std::size_t n = 0; n < len; ++n) seq.push_back(random_cloud(rng, 2, 2 + n % 3));
        auto lim = kuratowski_limits(seq, 1 + k % len, 0.5 + 0.1 * (k % 5));
        if (!lim.lower) continue;
        REQUIRE(lim.upper);
        CHECK(directed_hausdorff(*lim.lower, *lim.upper) == 0.0);
    }
}

TEST_CASE("aumann integral goldens") {
    auto a = cloud({{0, 1}, {2, 0}, {1, 1}});
    std::vector<double> one{1.0};
    CHECK(same_points(aumann_integral({a}, one), a));

    auto zero = cloud({{0, 0}});
    std::vector<double> w{0.3, 1.7};
    auto z = aumann_integral({zero, zero}, w);
    CHECK(same_points(z, zero));

    auto sum = aumann_integral({interval(1.0, 0.1), interval(2.0, 0.1)}, std::vector<double>{1.0, 1.0});
    CHECK(sum.method() == CloudMethod::exact);
    CHECK(same_points(sum, interval(3.0, 0.1)));
}

TEST_CASE("doubling the weights dilates the exact sum") {
    std::mt19937_64 rng(47);
    for (int k = 0; k < 30; ++k) {
        std::vector<CompactSetApprox> fam{random_cloud(rng, 2, 4), random_cloud(rng, 2, 3), random_cloud(rng, 2, 5)};
        std::vector<double> w{0.5, 1.25, 0.75}, w2{1.0, 2.5, 1.5};
        auto base = aumann_integral(fam, w), twice = aumann_integral(fam, w2);
        REQUIRE(base.method() == CloudMethod::exact);
        CompactSetApprox scaled(2);
        for (std::size_t i = 0; i < base.size(); ++i) scaled.push(std::vector<double>{2 * base.point(i)[0], 2 * base.point(i)[1]});
        CHECK(same_points(scaled, twice));
    }
}

TEST_CASE("support aggregation adds support functions") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    for (int k = 0; k < 20; ++k) {
        std::vector<CompactSetApprox> fam;
        for (int i = 0; i < 3; ++i) {
            auto c = random_cloud(rng, 2, 6);
            c.set_convex_hint(true);
            fam.push_back(c);
        }
        std::vector<double> w{1.0, 0.5, 2.0};
        AumannOptions opts;
        opts.force_support = true;
        auto agg = aumann_integral(fam, w, opts);
        CHECK(agg.method() == CloudMethod::support);
        CHECK(agg.convex_hint());
        for (const auto &u : direction_grid(2, opts.support_directions)) {
            double expect = 0.0;
            for (int i = 0; i < 3; ++i) expect += w[i] * support(fam[i], u);
            CHECK(std::abs(support(agg, u) - expect) <= 1e-12);
        }
        for (int j = 0; j < 50; ++j) {
            const double a = angle(rng), b = angle(rng);
            std::vector<double> u{std::cos(a), std::sin(a)}, v{std::cos(b), std::sin(b)}, uv{u[0] + v[0], u[1] + v[1]};
            CHECK(support(agg, uv) <= support(agg, u) + support(agg, v) + 1e-12);
        }
    }
}

TEST_CASE("selection route stays inside the exact sum") {
    std::mt19937_64 rng(59);
    std::vector<CompactSetApprox> fam{random_cloud(rng, 2, 8), random_cloud(rng, 2, 8), random_cloud(rng, 2, 8)};
    std::vector<double> w{1.0, 1.0, 1.0};
    auto exact = aumann_integral(fam, w);
    AumannOptions opts;
    opts.combo_budget = 100;
    opts.selection_samples = 300;
    auto sel = aumann_integral(fam, w, opts);
    CHECK(sel.method() == CloudMethod::selections);
    CHECK(directed_hausdorff(sel, exact) <= 1e-12);
    opts.allow_sampling = false;
    CHECK_THROWS_AS(aumann_integral(fam, w, opts), AumannError);
}

TEST_CASE("aggregate preferred set examples") {
    SUBCASE("one good collapses to the aggregate endowment") {
        auto e = make_economy(1, {1.0}, {0.5, 2.0}, {linear({1}), log_shifted({1})}, {{{1.0}}, {{3.0}}});
        auto agg = aggregate_preferred_set(e, 0, PriceVector::uniform(1), 0.1);
        CHECK(same_points(agg, cloud({{6.5}})));
    }
    SUBCASE("single agent gives its own cloud") {
        auto e = make_economy(2, {1.0}, {1.0}, {log_shifted({1, 2})}, {{{1.0, 1.0}}});
        PriceVector p(std::vector<double>{0.4, 0.6});
        CHECK(same_points(aggregate_preferred_set(e, 0, p, 0.1), sample_preferred_set(e, 0, 0, p, 0.1)));
    }
    SUBCASE("linear box matches brute-force selection pairs") {
        auto e = make_economy(2, {1.0}, {1.0, 1.0}, {linear({2, 1}), linear({1, 2})}, {{{1.0, 0.0}}, {{0.0, 1.0}}});
        PriceVector p(std::vector<double>{0.5, 0.5});
        auto agg = aggregate_preferred_set(e, 0, p, 0.25);
        REQUIRE(agg.method() == CloudMethod::exact);
        auto c1 = sample_preferred_set(e, 0, 0, p, 0.25), c2 = sample_preferred_set(e, 1, 0, p, 0.25);
        CompactSetApprox brute(2);
        for (std::size_t i = 0; i < c1.size(); ++i)
            for (std::size_t j = 0; j < c2.size(); ++j)
                brute.push(std::vector<double>{c1.point(i)[0] + c2.point(j)[0], c1.point(i)[1] + c2.point(j)[1]});
        CHECK(same_points(agg, brute));
    }
}

TEST_CASE("aggregate preferred set lies in the aggregate truncation box") {
    std::mt19937_64 rng(61);
    for (int seed = 1; seed <= 10; ++seed) {
        auto e = random_economy(seed);
        for (std::size_t s = 0; s < e.states.size(); ++s) {
            PriceVector p = random_price(rng, e.goods, 0.2);
            auto bound = aggregate_truncation_bound(e, s, p);
            double res = 0.0;
            for (double b : bound) res = std::max(res, b);
            auto agg = aggregate_preferred_set(e, s, p, res / 10);
            CHECK_FALSE(agg.empty());
            for (std::size_t i = 0; i < agg.size(); ++i)
                for (std::size_t h = 0; h < e.goods; ++h) {
                    CHECK(agg.point(i)[h] >= -1e-12);
                    CHECK(agg.point(i)[h] <= bound[h] * (1 + 1e-12));
                }
        }
    }
}

TEST_CASE("continuity probe degenerate cases") {
    auto e = edgeworth();
    PriceVector p(std::vector<double>{0.55, 0.45});
    for (double d : continuity_probe(e, 0, {p, p, p}, p, 0.05)) CHECK(d == 0.0);
    auto one = make_economy(1, {1.0}, {1.0, 1.0}, {linear({1}), linear({2})}, {{{1.0}}, {{2.0}}});
    auto u = PriceVector::uniform(1);
    for (double d : continuity_probe(one, 0, {u, u}, u, 0.1)) CHECK(d == 0.0);
}
