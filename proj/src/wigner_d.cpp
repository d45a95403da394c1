#include "orient/wigner_d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "orient/error.hpp"

namespace orient {

namespace {

void check_args(int J, int M, int K) {
    if (J < 0 || std::abs(M) > J || std::abs(K) > J) {
        throw DomainError("invalid d-matrix indices J=" + std::to_string(J) + " M=" + std::to_string(M) +
                          " K=" + std::to_string(K));
    }
}

double log_fact(int n) { return std::lgamma(n + 1.0); }

// base^exponent with 0^0 = 1, accumulated in log space.
bool log_power(double base, int exponent, double& acc) {
    if (exponent == 0) {
        return true;
    }
    if (base == 0.0) {
        return false;
    }
    acc += exponent * std::log(std::abs(base));
    return true;
}

}  // namespace

double wigner_small_d_sum(int J, int M, int K, double beta) {
    check_args(J, M, K);
    const double c = std::cos(0.5 * beta);
    const double s = std::sin(0.5 * beta);
    const int s_min = std::max(0, K - M);
    const int s_max = std::min(J + K, J - M);
    const double log_norm = 0.5 * (log_fact(J + M) + log_fact(J - M) + log_fact(J + K) + log_fact(J - K));
    double total = 0.0;
    for (int n = s_min; n <= s_max; ++n) {
        double lg = log_norm - log_fact(J + K - n) - log_fact(n) - log_fact(M - K + n) - log_fact(J - M - n);
        const int pc = 2 * J + K - M - 2 * n;
        const int ps = M - K + 2 * n;
        if (!log_power(c, pc, lg) || !log_power(s, ps, lg)) {
            continue;
        }
        double term = std::exp(lg);
        if ((pc % 2 != 0) && c < 0.0) {
            term = -term;
        }
        if ((ps % 2 != 0) && s < 0.0) {
            term = -term;
        }
        total += ((M - K + n) % 2 == 0) ? term : -term;
    }
    return total;
}

std::vector<double> wigner_small_d_column(int j_max, int M, int K, double beta) {
    std::vector<double> d(std::max(j_max, 0) + 1, 0.0);
    const int j0 = std::max(std::abs(M), std::abs(K));
    if (j_max < j0) {
        return d;
    }
    const double cb = std::cos(beta);
    int j_start = j0;
    if (j0 == 0) {
        d[0] = 1.0;
        if (j_max == 0) {
            return d;
        }
        d[1] = cb;
        j_start = 1;
    } else {
        d[j0] = wigner_small_d_sum(j0, M, K, beta);
    }
    const double mm = static_cast<double>(M) * M;
    const double kk = static_cast<double>(K) * K;
    for (int j = j_start; j < j_max; ++j) {
        const double jj = static_cast<double>(j);
        const double prev = (j - 1 >= j0) ? d[j - 1] : 0.0;
        const double a = (2.0 * jj + 1.0) * (jj * (jj + 1.0) * cb - static_cast<double>(M) * K);
        const double b = (jj + 1.0) * std::sqrt(std::max(0.0, (jj * jj - mm) * (jj * jj - kk)));
        const double den = jj * std::sqrt(((jj + 1.0) * (jj + 1.0) - mm) * ((jj + 1.0) * (jj + 1.0) - kk));
        d[j + 1] = (a * d[j] - b * prev) / den;
    }
    return d;
}

double wigner_small_d_recursive(int J, int M, int K, double beta) {
    check_args(J, M, K);
    return wigner_small_d_column(J, M, K, beta)[J];
}

double wigner_small_d(int J, int M, int K, double beta) {
    check_args(J, M, K);
    if (J == 0) {
        return 1.0;
    }
    if (J == 1 && M == 0 && K == 0) {
        return std::cos(beta);
    }
    if (J <= 6) {
        return wigner_small_d_sum(J, M, K, beta);
    }
    return wigner_small_d_recursive(J, M, K, beta);
}

}  // namespace orient
