#include "mree/setval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace mree {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t h = 0; h < a.size(); ++h) {
        double t = a[h] - b[h];
        d += t * t;
    }
    return d;
}

void require_nonempty(const CompactSetApprox &a, const char *what) {
    if (a.empty()) throw std::invalid_argument(std::string(what) + " is empty");
}

} // namespace

double point_set_distance(std::span<const double> x, const CompactSetApprox &a) {
    require_nonempty(a, "set");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) best = std::min(best, squared_distance(x, a.point(i)));
    return std::sqrt(best);
}

double directed_hausdorff(const CompactSetApprox &a, const CompactSetApprox &b) {
    require_nonempty(a, "first set");
    require_nonempty(b, "second set");
    if (a.dim() != b.dim()) throw std::invalid_argument("hausdorff distance between sets of different dimension");
    // Early-break scan: a point of A whose running minimum already drops below
    // the current maximum cannot raise it. Exact; the shuffle only speeds it up.
    std::vector<std::size_t> order(a.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(0x5eed);
    std::shuffle(order.begin(), order.end(), rng);
    double cmax = 0.0;
    for (std::size_t i : order) {
        auto x = a.point(i);
        double cmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            double d = squared_distance(x, b.point(j));
            if (d < cmin) {
                cmin = d;
                if (cmin <= cmax) break;
            }
        }
        cmax = std::max(cmax, cmin);
    }
    return std::sqrt(cmax);
}

double hausdorff_distance(const CompactSetApprox &a, const CompactSetApprox &b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

KuratowskiLimits kuratowski_limits(const SetSequence &seq, std::size_t tail, double tol) {
    if (seq.empty()) throw std::invalid_argument("set sequence is empty");
    if (tail == 0 || tail > seq.size()) throw std::invalid_argument("tail must be in 1..sequence length");
    const std::size_t dim = seq.front().dim();
    CompactSetApprox candidates(dim);
    double res = 0.0;
    for (const auto &a : seq) {
        require_nonempty(a, "sequence member");
        for (std::size_t i = 0; i < a.size(); ++i) candidates.push(a.point(i));
        res = std::max(res, a.resolution());
    }
    candidates.canonicalize();

    CompactSetApprox li(dim, res), ls(dim, res);
    const std::size_t first = seq.size() - tail;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto x = candidates.point(i);
        double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
        for (std::size_t n = first; n < seq.size(); ++n) {
            double d = point_set_distance(x, seq[n]);
            dmax = std::max(dmax, d);
            dmin = std::min(dmin, d);
        }
        if (dmax <= tol) li.push(x);
        if (dmin <= tol) ls.push(x);
    }
    KuratowskiLimits out;
    if (!li.empty()) out.lower = std::move(li);
    if (!ls.empty()) out.upper = std::move(ls);
    return out;
}

AumannOptions AumannOptions::from(const Config &cfg) {
    AumannOptions o;
    o.combo_budget = cfg.combo_budget;
    o.support_directions = cfg.support_directions;
    o.selection_samples = cfg.selection_samples;
    o.seed = cfg.seed;
    return o;
}

std::vector<std::vector<double>> direction_grid(std::size_t dim, int count) {
    std::vector<std::vector<double>> dirs;
    if (dim == 1) return {{-1.0}, {1.0}};
    if (dim == 2) {
        for (int k = 0; k < count; ++k) {
            double th = 2.0 * std::numbers::pi * (k + 0.5) / count;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        return dirs;
    }
    if (dim == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            double z = 1.0 - (2.0 * k + 1.0) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double th = golden * k;
            dirs.push_back({r * std::cos(th), r * std::sin(th), z});
        }
        return dirs;
    }
    std::mt19937_64 rng(0xd1ec);
    std::normal_distribution<double> g;
    for (int k = 0; k < count; ++k) {
        std::vector<double> u(dim);
        double n2 = 0.0;
        for (double &v : u) {
            v = g(rng);
            n2 += v * v;
        }
        for (double &v : u) v /= std::sqrt(n2);
        dirs.push_back(std::move(u));
    }
    return dirs;
}

double support_hausdorff(const CompactSetApprox &a, const CompactSetApprox &b,
                         const std::vector<std::vector<double>> &dirs) {
    auto h = [](const CompactSetApprox &c, const std::vector<double> &u) {
        double v = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < c.size(); ++i) v = std::max(v, dot(u, c.point(i)));
        return v;
    };
    double d = 0.0;
    for (const auto &u : dirs) d = std::max(d, std::abs(h(a, u) - h(b, u)));
    return d;
}

CompactSetApprox column_extremes(const CompactSetApprox &a) {
    const std::size_t dim = a.dim(), n = a.size();
    CompactSetApprox out(dim, a.resolution(), a.convex_hint(), a.method());
    if (n == 0) return out;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto prefix_less = [&](std::size_t i, std::size_t j) {
        auto x = a.point(i), y = a.point(j);
        for (std::size_t h = 0; h + 1 < dim; ++h)
            if (x[h] != y[h]) return x[h] < y[h];
        return x[dim - 1] < y[dim - 1];
    };
    auto same_column = [&](std::size_t i, std::size_t j) {
        auto x = a.point(i), y = a.point(j);
        for (std::size_t h = 0; h + 1 < dim; ++h)
            if (x[h] != y[h]) return false;
        return true;
    };
    std::sort(order.begin(), order.end(), prefix_less);
    std::size_t k = 0;
    while (k < n) {
        std::size_t end = k;
        while (end + 1 < n && same_column(order[k], order[end + 1])) ++end;
        out.push(a.point(order[k]));
        if (end != k) out.push(a.point(order[end]));
        k = end + 1;
    }
    return out;
}

namespace {

CompactSetApprox exact_sum(const std::vector<CompactSetApprox> &family, std::span<const double> weights) {
    const std::size_t dim = family.front().dim();
    CompactSetApprox acc(dim);
    acc.push(std::vector<double>(dim, 0.0));
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < family.size(); ++i) {
        CompactSetApprox next(dim);
        next.reserve(acc.size() * family[i].size());
        for (std::size_t a = 0; a < acc.size(); ++a) {
            auto base = acc.point(a);
            for (std::size_t b = 0; b < family[i].size(); ++b) {
                auto f = family[i].point(b);
                for (std::size_t h = 0; h < dim; ++h) x[h] = base[h] + weights[i] * f[h];
                next.push(x);
            }
        }
        next.canonicalize();
        acc = std::move(next);
    }
    return acc;
}

CompactSetApprox support_sum(const std::vector<CompactSetApprox> &family, std::span<const double> weights,
                             const AumannOptions &opts) {
    const std::size_t dim = family.front().dim();
    std::vector<CompactSetApprox> reduced;
    reduced.reserve(family.size());
    for (const auto &f : family) reduced.push_back(f.size() > 64 ? column_extremes(f) : f);

    auto dirs = direction_grid(dim, opts.support_directions);
    dirs.insert(dirs.end(), opts.extra_directions.begin(), opts.extra_directions.end());

    CompactSetApprox out(dim);
    std::vector<double> x(dim);
    for (const auto &u : dirs) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < reduced.size(); ++i) {
            const auto &f = reduced[i];
            std::size_t best = 0;
            double best_v = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < f.size(); ++k) {
                double v = dot(u, f.point(k));
                if (v > best_v) {
                    best_v = v;
                    best = k;
                }
            }
            auto pt = f.point(best);
            for (std::size_t h = 0; h < dim; ++h) x[h] += weights[i] * pt[h];
        }
        out.push(x);
    }
    out.canonicalize();
    return out;
}

CompactSetApprox sampled_sum(const std::vector<CompactSetApprox> &family, std::span<const double> weights,
                             const AumannOptions &opts) {
    const std::size_t dim = family.front().dim();
    std::mt19937_64 rng(opts.seed);
    CompactSetApprox out(dim);
    std::vector<double> x(dim);
    for (int k = 0; k < opts.selection_samples; ++k) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < family.size(); ++i) {
            std::uniform_int_distribution<std::size_t> pick(0, family[i].size() - 1);
            auto pt = family[i].point(pick(rng));
            for (std::size_t h = 0; h < dim; ++h) x[h] += weights[i] * pt[h];
        }
        out.push(x);
    }
    out.canonicalize();
    return out;
}

} // namespace

CompactSetApprox aumann_integral(const std::vector<CompactSetApprox> &family, std::span<const double> weights,
                                 const AumannOptions &opts) {
    if (family.empty()) throw AumannError("aumann integral over an empty agent set");
    if (weights.size() != family.size()) throw AumannError("one weight per set required");
    const std::size_t dim = family.front().dim();
    double product = 1.0, res = 0.0;
    bool convex = true;
    for (const auto &f : family) {
        if (f.empty()) throw AumannError("aumann integral of an empty-valued correspondence");
        if (f.dim() != dim) throw AumannError("sets of different dimension");
        product *= static_cast<double>(f.size());
        res = std::max(res, f.resolution());
        convex = convex && f.convex_hint();
    }

    CompactSetApprox out;
    if (!opts.force_support && product <= static_cast<double>(opts.combo_budget)) {
        out = exact_sum(family, weights);
        out.set_method(CloudMethod::exact);
    } else if (convex) {
        out = support_sum(family, weights, opts);
        out.set_method(CloudMethod::support);
    } else if (opts.allow_sampling) {
        out = sampled_sum(family, weights, opts);
        out.set_method(CloudMethod::selections);
    } else {
        throw AumannError("non-convex inputs exceed the combination budget and sampling is disabled");
    }
    out.set_resolution(res);
    out.set_convex_hint(convex);
    return out;
}

bool aggregate_is_exact(const Economy &e, std::size_t s, const PriceVector &p, double resolution,
                        const Config &cfg) {
    double product = 1.0;
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        double n = lattice_size(e, t, s, p, resolution) + 1.0; // + appended demand point
        if (n > static_cast<double>(cfg.max_points)) return false;
        product *= n;
    }
    return product <= static_cast<double>(cfg.combo_budget);
}

CompactSetApprox aggregate_preferred_set(const Economy &e, std::size_t s, const PriceVector &p, double resolution,
                                         const Config &cfg) {
    const std::size_t m = e.agents.size();
    bool convex = true;
    for (std::size_t t = 0; t < m; ++t) {
        const auto &u = e.spec(t, s);
        convex = convex && !(u.family == Family::ces && u.rho > 1.0);
    }
    const bool exact = aggregate_is_exact(e, s, p, resolution, cfg);
    const SampleMode mode = (!exact && convex) ? SampleMode::hull_candidates : SampleMode::full;

    std::vector<CompactSetApprox> clouds;
    clouds.reserve(m);
    for (std::size_t t = 0; t < m; ++t) clouds.push_back(sample_preferred_set(e, t, s, p, resolution, cfg, mode));

    auto opts = AumannOptions::from(cfg);
    opts.force_support = !exact && convex;
    return aumann_integral(clouds, e.agents.weights, opts);
}

Bundle aggregate_truncation_bound(const Economy &e, std::size_t s, const PriceVector &p) {
    Bundle out(e.goods, 0.0);
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        auto box = truncation_bound(e, t, s, p);
        for (std::size_t h = 0; h < e.goods; ++h) out[h] += e.agents.weights[t] * box.upper[h];
    }
    return out;
}

std::vector<double> continuity_probe(const Economy &e, std::size_t s, const std::vector<PriceVector> &p_seq,
                                     const PriceVector &p, double resolution, const Config &cfg) {
    const auto base = aggregate_preferred_set(e, s, p, resolution, cfg);
    const auto dirs = direction_grid(e.goods, 4 * cfg.support_directions);
    auto one = [&](std::size_t n) {
        auto a = aggregate_preferred_set(e, s, p_seq[n], resolution, cfg);
        if (a.convex_hint() && base.convex_hint()) return support_hausdorff(column_extremes(a), column_extremes(base), dirs);
        return hausdorff_distance(a, base);
    };
    std::vector<double> out(p_seq.size());
    if (cfg.parallel) {
        std::vector<std::future<double>> jobs;
        for (std::size_t n = 0; n < p_seq.size(); ++n) jobs.push_back(std::async(std::launch::async, one, n));
        for (std::size_t n = 0; n < p_seq.size(); ++n) out[n] = jobs[n].get();
    } else {
        for (std::size_t n = 0; n < p_seq.size(); ++n) out[n] = one(n);
    }
    return out;
}

} // namespace mree
