#pragma once

#include <array>
#include <vector>

#include "orient/phase_space.hpp"

namespace orient {

/// Gaussian amplitude exp(-(m - center_m)^2 / sigma^2) displaced to (center_angle, center_m) along one axis.
struct CoherentSpec {
    double sigma = 1.0;
    double center_angle = 0.0;
    int center_m = 0;
    Axis axis = Axis::alpha;
    std::array<int, 3> bystander{0, 0, 0};  // momenta on the two other axes, indexed by axis
};

/// theta_3(0, q) = 1 + 2 sum q^{n^2}, truncated once terms fall below 1e-17.
double theta3(double q);

/// Smallest m_max on the coherent axis accepted for a spec.
int required_window(const CoherentSpec& spec);

RotorState coherent_state(const CoherentSpec& spec, const MBasisSpec& basis);

/// Normalized weighted sum of pure states on one basis.
RotorState superpose(const std::vector<RotorState>& states, const std::vector<cplx>& weights);

/// Local maxima of W along alpha at a momentum slice, circular, with prominence >= 10% of max |W|.
int count_fringes(const PhaseSpaceGrid& grid, const MomentumTriple& slice_m, int beta_index = 0,
                  int gamma_index = 0);

/// Same rule on an arbitrary periodic sequence.
int count_prominent_maxima(const std::vector<double>& values, double relative_prominence = 0.1);

struct NegativityReport {
    double volume = 0.0;          // int dOmega sum_m max(0, -W)
    double min_over_max = 0.0;    // min W / max W
};

NegativityReport negativity_volume(const PhaseSpaceGrid& grid);

}  // namespace orient
