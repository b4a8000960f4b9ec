#include "mree/min_norm.hpp"

#include "mree/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mree {

namespace {

double dotv(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Affine weights (summing to 1) of the min-norm point of aff{points[corral]}.
bool affine_min_norm(const std::vector<std::vector<double>> &pts, const std::vector<std::size_t> &corral,
                     std::vector<double> &alpha) {
    const std::size_t k = corral.size();
    std::vector<std::vector<double>> m(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> rhs(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) m[i][j] = dotv(pts[corral[i]], pts[corral[j]]);
        m[i][k] = 1.0;
        m[k][i] = 1.0;
    }
    rhs[k] = 1.0;
    std::vector<double> sol;
    if (!solve_dense(std::move(m), std::move(rhs), sol)) return false;
    alpha.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(k));
    return true;
}

} // namespace

bool solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs, std::vector<double> &x) {
    const std::size_t n = rhs.size();
    double mmax = 0.0;
    for (const auto &row : m)
        for (double v : row) mmax = std::max(mmax, std::abs(v));
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) <= 1e-13 * mmax) return false;
        std::swap(m[c], m[piv]);
        std::swap(rhs[c], rhs[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t c = n; c-- > 0;) {
        double v = rhs[c];
        for (std::size_t k = c + 1; k < n; ++k) v -= m[c][k] * x[k];
        x[c] = v / m[c][c];
    }
    return true;
}

std::vector<double> min_norm_point(const std::vector<std::vector<double>> &points, int max_iter) {
    if (points.empty()) throw std::invalid_argument("min_norm_point needs at least one point");
    const std::size_t n = points.size(), dim = points.front().size();
    double scale = 0.0;
    for (const auto &p : points) scale = std::max(scale, dotv(p, p));
    const double eps = 1e-14 * std::max(scale, 1e-300);

    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (dotv(points[i], points[i]) < dotv(points[start], points[start])) start = i;
    std::vector<std::size_t> corral{start};
    std::vector<double> lambda{1.0};
    std::vector<double> x = points[start];

    auto weights = [&] {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < corral.size(); ++i) w[corral[i]] += lambda[i];
        return w;
    };
    auto rebuild_x = [&] {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < corral.size(); ++i)
            for (std::size_t h = 0; h < dim; ++h) x[h] += lambda[i] * points[corral[i]][h];
    };

    for (int major = 0; major < max_iter; ++major) {
        std::size_t j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double v = dotv(x, points[i]);
            if (v < best) {
                best = v;
                j = i;
            }
        }
        if (dotv(x, x) - best <= eps || std::find(corral.begin(), corral.end(), j) != corral.end()) break;
        corral.push_back(j);
        lambda.push_back(0.0);

        for (int minor = 0; minor < 100; ++minor) {
            std::vector<double> alpha;
            if (!affine_min_norm(points, corral, alpha)) {
                // affinely dependent corral: drop the newest point and stop
                corral.pop_back();
                lambda.pop_back();
                return weights();
            }
            if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a > 1e-15; })) {
                lambda = alpha;
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < alpha.size(); ++i)
                if (alpha[i] <= 1e-15) theta = std::min(theta, lambda[i] / (lambda[i] - alpha[i]));
            for (std::size_t i = 0; i < alpha.size(); ++i) lambda[i] = theta * alpha[i] + (1.0 - theta) * lambda[i];
            std::vector<std::size_t> c2;
            std::vector<double> l2;
            for (std::size_t i = 0; i < corral.size(); ++i)
                if (lambda[i] > 1e-15) {
                    c2.push_back(corral[i]);
                    l2.push_back(lambda[i]);
                }
            corral = std::move(c2);
            lambda = std::move(l2);
        }
        double total = 0.0;
        for (double l : lambda) total += l;
        for (double &l : lambda) l /= total;
        rebuild_x();
    }

    return weights();
}

} // namespace mree
