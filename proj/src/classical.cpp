#include "orient/classical.hpp"

#include <cmath>
#include <limits>

#include "orient/error.hpp"
#include "orient/ode.hpp"

namespace orient {

double classical_hamiltonian(const ClassicalState& s, const TopConstants& k) {
    const double sb = std::sin(s.beta);
    if (!(std::abs(sb) > kPoleGuard)) {
        throw SingularityError("classical Hamiltonian at the beta pole");
    }
    const double u = s.p_alpha - s.p_gamma * std::cos(s.beta);
    return u * u / (2.0 * k.I1() * sb * sb) + s.p_beta * s.p_beta / (2.0 * k.I1()) +
           s.p_gamma * s.p_gamma / (2.0 * k.I3());
}

ClassicalDerivative classical_vector_field(const ClassicalState& s, const TopConstants& k) {
    const double sb = std::sin(s.beta);
    if (!(sb > kPoleGuard)) {
        throw SingularityError("sin(beta) = " + std::to_string(sb) + " below the pole guard");
    }
    const double cb = std::cos(s.beta);
    const double I1 = k.I1();
    const double u = s.p_alpha - s.p_gamma * cb;
    ClassicalDerivative d;
    d.alpha = u / (I1 * sb * sb);
    d.beta = s.p_beta / I1;
    d.gamma = (s.p_gamma * cb * cb - s.p_alpha * cb) / (I1 * sb * sb) + s.p_gamma / k.I3();
    d.p_beta = -(s.p_gamma - s.p_alpha * cb) * u / (I1 * sb * sb * sb);
    return d;
}

ClassicalPath classical_trajectory(const ClassicalState& initial, double t_span, const TopConstants& k,
                                   double tol) {
    k.check();
    if (!(std::sin(initial.beta) > kPoleGuard) || !(initial.beta > 0.0 && initial.beta < kPi)) {
        throw SingularityError("initial beta outside the pole guard");
    }
    using V4 = Eigen::Vector4d;
    const double pa = initial.p_alpha;
    const double pg = initial.p_gamma;
    auto unpack = [&](const V4& y) {
        ClassicalState s;
        s.alpha = y[0];
        s.beta = y[1];
        s.gamma = y[2];
        s.p_beta = y[3];
        s.p_alpha = pa;
        s.p_gamma = pg;
        return s;
    };
    std::function<V4(double, const V4&)> rhs = [&](double, const V4& y) -> V4 {
        if (!(std::sin(y[1]) > kPoleGuard)) {
            return V4::Constant(std::numeric_limits<double>::quiet_NaN());
        }
        const ClassicalDerivative d = classical_vector_field(unpack(y), k);
        return V4(d.alpha, d.beta, d.gamma, d.p_beta);
    };
    std::function<bool(const V4&)> valid = [](const V4& y) {
        return y[1] > 0.0 && y[1] < kPi && std::sin(y[1]) > kPoleGuard;
    };
    ClassicalPath path;
    const double e0 = classical_hamiltonian(initial, k);
    const double escale = std::max(std::abs(e0), 1e-300);
    std::function<void(double, const V4&)> observe = [&](double t, const V4& y) {
        const ClassicalState s = unpack(y);
        path.t.push_back(t);
        path.states.push_back(s);
        path.max_energy_drift = std::max(path.max_energy_drift, std::abs(classical_hamiltonian(s, k) - e0) / escale);
    };
    path.t.push_back(0.0);
    path.states.push_back(initial);
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    opt.min_step = 1e-12;
    OdeStats stats;
    const V4 y0(initial.alpha, initial.beta, initial.gamma, initial.p_beta);
    integrate_dp5<V4>(rhs, 0.0, t_span, y0, opt, &stats, valid, observe);
    path.truncated = stats.stopped;
    return path;
}

}  // namespace orient
