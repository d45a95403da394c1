#include "orient/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "orient/error.hpp"

namespace orient {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Reference {
    std::vector<double> x;
    std::vector<double> w;
};

// Newton iteration on the Legendre three-term recursion.
Reference compute_reference(int n) {
    Reference r;
    r.x.resize(n);
    r.w.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        r.x[n / 2] = 0.0;
    }
    return r;
}

const Reference& reference(int n) {
    thread_local std::map<int, Reference> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, compute_reference(n)).first;
    }
    return it->second;
}

}  // namespace

QuadratureRule gauss_legendre(int order, double a, double b) {
    if (order < 1) {
        throw ConfigError("Gauss-Legendre order must be positive");
    }
    const Reference& r = reference(order);
    QuadratureRule q;
    q.nodes.resize(order);
    q.weights.resize(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
        q.nodes[i] = mid + half * r.x[i];
        q.weights[i] = half * r.w[i];
    }
    return q;
}

QuadratureRule cosine_gauss_legendre(int order, double a, double b) {
    const QuadratureRule t = gauss_legendre(order, 0.0, kPi);
    QuadratureRule q;
    q.nodes.resize(order);
    q.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        const double th = t.nodes[i];
        q.nodes[i] = a + (b - a) * 0.5 * (1.0 - std::cos(th));
        q.weights[i] = t.weights[i] * (b - a) * 0.5 * std::sin(th);
    }
    return q;
}

QuadratureRule split_cosine_gauss_legendre(int order, double a, double b, std::vector<double> breaks) {
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double x) { return !(x > a + 1e-14 && x < b - 1e-14); }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                 breaks.end());
    std::vector<double> edges{a};
    edges.insert(edges.end(), breaks.begin(), breaks.end());
    edges.push_back(b);
    QuadratureRule out;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const QuadratureRule piece = cosine_gauss_legendre(order, edges[p], edges[p + 1]);
        out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
    }
    return out;
}

QuadratureRule periodic_trapezoid(int n, double a, double period) {
    if (n < 1) {
        throw ConfigError("trapezoid rule needs at least one point");
    }
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.assign(n, period / n);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = a + period * i / n;
    }
    return q;
}

}  // namespace orient
