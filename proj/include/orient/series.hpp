#pragma once

#include <vector>

namespace orient {

struct SeriesEstimate {
    double value = 0.0;      // extrapolated infinite sum
    double raw = 0.0;        // plain sum of the supplied terms
    double uncertainty = 0.0;  // spread between two transform orders
    bool extrapolated = false;
};

/// Levin u-transform estimate of lim s_n from partial sums s_0..s_N.
SeriesEstimate levin_u(const std::vector<double>& partial_sums, int order = 10);

/// Sum over all integers of a sequence known on a contiguous window, pairing the two
/// window ends symmetrically and extrapolating the tails with a Levin u-transform.
/// The extrapolation is kept only when a shorter truncation agrees with it; otherwise, and
/// for windows narrower than 2*order+16 terms, the plain sum is returned.
SeriesEstimate window_sum(const std::vector<double>& values, int order = 10);

}  // namespace orient
