#include "orient/states.hpp"

#include <algorithm>
#include <cmath>

#include "orient/error.hpp"

namespace orient {

double theta3(double q) {
    if (!(q >= 0.0 && q < 1.0)) {
        throw DomainError("theta3 needs 0 <= q < 1");
    }
    double sum = 0.0;
    for (long n = 1;; ++n) {
        const double t = std::pow(q, static_cast<double>(n) * n);
        sum += t;
        if (t < 1e-17 * (1.0 + sum)) {
            break;
        }
    }
    return 1.0 + 2.0 * sum;
}

int required_window(const CoherentSpec& spec) {
    return std::abs(spec.center_m) + static_cast<int>(std::ceil(6.0 * spec.sigma));
}

RotorState coherent_state(const CoherentSpec& spec, const MBasisSpec& basis) {
    if (!(spec.sigma > 0.0)) {
        throw DomainError("sigma must be positive");
    }
    const Axis ax = spec.axis;
    if (basis.m_max(ax) < required_window(spec)) {
        throw ConfigError("coherent state needs m_max(" + std::string(axis_name(ax)) + ") >= " +
                          std::to_string(required_window(spec)) + ", window is " + std::to_string(basis.m_max(ax)));
    }
    MomentumTriple fixed{spec.bystander[0], spec.bystander[1], spec.bystander[2]};
    for (Axis other : kAxes) {
        if (other != ax && std::abs(fixed[other]) > basis.m_max(other)) {
            throw ConfigError("bystander momentum outside the window on " + std::string(axis_name(other)));
        }
    }
    const double sigma2 = spec.sigma * spec.sigma;
    const double norm = 1.0 / std::sqrt(theta3(std::exp(-2.0 / sigma2)));
    const double phi = axis_phase_factor(ax);
    CVector c = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    const int L = basis.m_max(ax);
    for (int m = -L - spec.center_m; m <= L - spec.center_m; ++m) {
        MomentumTriple t = fixed;
        t[ax] = m + spec.center_m;
        if (std::abs(t[ax]) > L) continue;
        const double amp = norm * std::exp(-static_cast<double>(m) * m / sigma2);
        c[static_cast<Eigen::Index>(basis.index(t))] = std::polar(amp, -phi * spec.center_angle * m);
    }
    return RotorState::normalized(basis, std::move(c));
}

RotorState superpose(const std::vector<RotorState>& states, const std::vector<cplx>& weights) {
    if (states.empty() || states.size() != weights.size()) {
        throw DomainError("superpose needs matching non-empty state and weight lists");
    }
    if (std::all_of(weights.begin(), weights.end(), [](cplx w) { return w == 0.0; })) {
        throw DomainError("all superposition weights are zero");
    }
    CVector sum = CVector::Zero(static_cast<Eigen::Index>(states.front().dimension()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!(states[i].basis() == states.front().basis())) {
            throw DomainError("superposed states live on different bases");
        }
        if (!states[i].is_pure()) {
            throw DomainError("superpose needs pure states");
        }
        sum += weights[i] * states[i].coefficients();
    }
    return RotorState::normalized(states.front().basis(), std::move(sum));
}

int count_prominent_maxima(const std::vector<double>& v, double relative_prominence) {
    const std::size_t n = v.size();
    if (n == 0) {
        throw DomainError("empty slice");
    }
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0 || n < 3) {
        return 0;
    }
    const double threshold = relative_prominence * scale;
    const double global_min = *std::min_element(v.begin(), v.end());
    auto at = [&](long i) { return v[static_cast<std::size_t>(((i % static_cast<long>(n)) + n) % n)]; };
    int count = 0;
    for (long i = 0; i < static_cast<long>(n); ++i) {
        if (!(v[i] > at(i - 1) && v[i] >= at(i + 1))) continue;
        // Walk both ways until a strictly higher sample; the saddle is the higher of the two minima.
        double left_min = v[i], right_min = v[i];
        bool left_higher = false, right_higher = false;
        for (long s = 1; s < static_cast<long>(n); ++s) {
            const double x = at(i - s);
            if (x > v[i]) {
                left_higher = true;
                break;
            }
            left_min = std::min(left_min, x);
        }
        for (long s = 1; s < static_cast<long>(n); ++s) {
            const double x = at(i + s);
            if (x > v[i]) {
                right_higher = true;
                break;
            }
            right_min = std::min(right_min, x);
        }
        const double saddle = (left_higher || right_higher) ? std::max(left_higher ? left_min : global_min,
                                                                       right_higher ? right_min : global_min)
                                                            : global_min;
        if (v[i] - saddle >= threshold) {
            ++count;
        }
    }
    return count;
}

int count_fringes(const PhaseSpaceGrid& grid, const MomentumTriple& slice_m, int beta_index, int gamma_index) {
    const GridSpec& s = grid.spec();
    const auto m = s.momenta.find(slice_m);
    if (!m || beta_index < 0 || beta_index >= s.angles.n_beta || gamma_index < 0 ||
        gamma_index >= s.angles.n_gamma) {
        throw DomainError("momentum slice or angle index outside the grid");
    }
    std::vector<double> line(static_cast<std::size_t>(s.angles.n_alpha));
    for (int a = 0; a < s.angles.n_alpha; ++a) {
        line[a] = grid.at(s.angles.index(a, beta_index, gamma_index), *m);
    }
    return count_prominent_maxima(line, 0.1);
}

NegativityReport negativity_volume(const PhaseSpaceGrid& grid) {
    NegativityReport r;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (double w : grid.values()) {
        if (w < 0.0) r.volume -= w;
        if (first) {
            lo = hi = w;
            first = false;
        }
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    r.volume *= angle_cell(grid.spec().angles);
    r.min_over_max = hi != 0.0 ? lo / hi : 0.0;
    return r;
}

}  // namespace orient
