#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "orient/error.hpp"

namespace orient {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double initial_step = 0.0;  // 0 picks a step from the derivative scale
    double min_step = 1e-14;
    long max_steps = 10'000'000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    bool stopped = false;  // the validity predicate refused every step size
    double t_reached = 0.0;
};

/// Dormand-Prince 5(4) with local extrapolation and a mixed absolute/relative max-norm.
/// `valid(y)` may veto a trial state; the step is then shrunk until `min_step`, after which
/// integration stops with stats.stopped set. Non-finite stage values count as a veto.
/// `observer(t, y)` sees every accepted step.
template <class Vec>
Vec integrate_dp5(const std::function<Vec(double, const Vec&)>& f, double t0, double t1, Vec y,
                  const OdeOptions& opt, OdeStats* stats = nullptr,
                  const std::function<bool(const Vec&)>& valid = nullptr,
                  const std::function<void(double, const Vec&)>& observer = nullptr) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                     e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

    OdeStats local;
    OdeStats& st = stats ? *stats : local;
    st = OdeStats{};
    st.t_reached = t0;
    const double span = t1 - t0;
    if (span == 0.0) {
        return y;
    }
    const double dir = span > 0 ? 1.0 : -1.0;
    Vec k1 = f(t0, y);
    double h = opt.initial_step;
    if (h <= 0.0) {
        const double d0 = y.cwiseAbs().maxCoeff();
        const double d1 = k1.cwiseAbs().maxCoeff();
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, std::abs(span));
    }
    double t = t0;
    long steps = 0;
    while (dir * (t1 - t) > 0.0) {
        if (++steps > opt.max_steps) {
            throw IntegrationError("step limit exceeded");
        }
        h = std::min(h, std::abs(t1 - t));
        const double hs = dir * h;
        const Vec k2 = f(t + c2 * hs, y + hs * (a21 * k1));
        const Vec k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const Vec k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec y6 = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        const Vec k6 = f(t + hs, y6);
        const Vec yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        bool ok = yn.allFinite() && (!valid || valid(yn));
        Vec k7 = k1;
        double err = 2.0;
        if (ok) {
            k7 = f(t + hs, yn);
            const Vec e = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            err = 0.0;
            for (Eigen::Index i = 0; i < e.size(); ++i) {
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
                err = std::max(err, std::abs(e[i]) / sc);
            }
            ok = std::isfinite(err);
        }
        if (ok && err <= 1.0) {
            t += hs;
            y = yn;
            k1 = k7;
            ++st.accepted;
            st.t_reached = t;
            if (observer) {
                observer(t, y);
            }
            const double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            h *= fac;
        } else {
            ++st.rejected;
            h *= ok ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.25;
            if (h < opt.min_step) {
                if (!ok) {
                    st.stopped = true;
                    return y;
                }
                throw IntegrationError("step size underflow at t = " + std::to_string(t));
            }
        }
    }
    return y;
}

}  // namespace orient
