#pragma once

#include <vector>

namespace orient {

/// Wigner small-d element d^J_{MK}(beta).
/// Sum formula with log-factorials for J <= 6, three-term recursion in J above.
double wigner_small_d(int J, int M, int K, double beta);

/// Sum formula, any J (kept for cross-checks).
double wigner_small_d_sum(int J, int M, int K, double beta);

/// Recursion in J from J0 = max(|M|, |K|).
double wigner_small_d_recursive(int J, int M, int K, double beta);

/// d^J_{MK}(beta) for J = 0..j_max at fixed (M, K); entries with J < max(|M|,|K|) are zero.
std::vector<double> wigner_small_d_column(int j_max, int M, int K, double beta);

}  // namespace orient
