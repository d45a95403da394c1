#include "orient/series.hpp"

#include <algorithm>
#include <cmath>

namespace orient {

namespace {

double levin_at(const std::vector<double>& s, const std::vector<double>& a, int n, int k) {
    constexpr double beta = 1.0;
    double num = 0.0;
    double den = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
        const double omega = (beta + n + j) * a[n + j];
        const double ratio = std::pow((beta + n + j) / (beta + n + k), k - 1);
        const double c = ((j % 2 == 0) ? 1.0 : -1.0) * binom * ratio / omega;
        num += c * s[n + j];
        den += c;
        binom = binom * (k - j) / (j + 1);
    }
    return num / den;
}

}  // namespace

SeriesEstimate levin_u(const std::vector<double>& s, int order) {
    SeriesEstimate out;
    if (s.empty()) {
        return out;
    }
    out.raw = s.back();
    out.value = s.back();
    const int N = static_cast<int>(s.size()) - 1;
    if (N < order + 3 || order < 3) {
        return out;
    }
    std::vector<double> a(s.size());
    a[0] = s[0];
    for (int i = 1; i <= N; ++i) {
        a[i] = s[i] - s[i - 1];
    }
    double scale = 0.0;
    for (double v : s) {
        scale = std::max(scale, std::abs(v));
    }
    double tail = 0.0;
    for (int i = N - order; i <= N; ++i) {
        tail = std::max(tail, std::abs(a[i]));
        if (a[i] == 0.0) {
            return out;
        }
    }
    if (tail <= 1e-15 * std::max(scale, 1e-300)) {
        return out;
    }
    const double t1 = levin_at(s, a, N - order, order);
    const double t2 = levin_at(s, a, N - order + 2, order - 2);
    if (!std::isfinite(t1) || !std::isfinite(t2)) {
        return out;
    }
    out.value = t1;
    out.uncertainty = std::abs(t1 - t2);
    out.extrapolated = true;
    return out;
}

SeriesEstimate window_sum(const std::vector<double>& values, int order) {
    const int n = static_cast<int>(values.size());
    SeriesEstimate out;
    double raw = 0.0;
    for (double v : values) {
        raw += v;
    }
    out.raw = raw;
    out.value = raw;
    if (n < 2 * order + 16) {
        return out;
    }
    // Partial sums grow from the middle outward so that the last terms are the window ends.
    std::vector<double> partial;
    const int half = n / 2;
    double acc = 0.0;
    int lo = half;
    int hi = half;
    if (n % 2 == 1) {
        acc = values[half];
        lo = half - 1;
        hi = half + 1;
    } else {
        lo = half - 1;
        hi = half;
    }
    partial.reserve(half + 1);
    partial.push_back(acc);
    while (lo >= 0 && hi < n) {
        acc += values[lo] + values[hi];
        partial.push_back(acc);
        --lo;
        ++hi;
    }
    SeriesEstimate est = levin_u(partial, order);
    est.raw = raw;
    if (!est.extrapolated) {
        est.value = raw;
        return est;
    }
    // Accept only if earlier truncations of the same sequence extrapolate to the same limit.
    double scale = 0.0;
    for (double v : values) {
        scale = std::max(scale, std::abs(v));
    }
    double spread = 0.0;
    bool consistent = true;
    for (int drop : {4, 8, 16}) {
        if (static_cast<int>(partial.size()) - drop < order + 4) {
            break;
        }
        std::vector<double> shorter(partial.begin(), partial.end() - drop);
        const SeriesEstimate check = levin_u(shorter, order);
        spread = std::max(spread, std::abs(check.value - est.value));
        consistent = consistent && check.extrapolated;
    }
    if (!consistent || spread > 1e-2 * std::abs(est.value - raw) + 1e-14 * scale) {
        est.value = raw;
        est.extrapolated = false;
    }
    est.uncertainty = std::max(est.uncertainty, spread);
    return est;
}

}  // namespace orient
