#pragma once

#include <vector>

namespace orient {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [a, b]. Nodes for a given order are cached per thread.
QuadratureRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Gauss-Legendre in theta after x = a + (b - a)(1 - cos theta)/2, theta in [0, pi].
/// The Jacobian (b - a) sin(theta)/2 is folded into the weights, so integrands with
/// square-root behaviour at either endpoint are integrated spectrally.
QuadratureRule cosine_gauss_legendre(int order, double a, double b);

/// Composite cosine-substituted rule over [a, b] split at the given interior breakpoints.
QuadratureRule split_cosine_gauss_legendre(int order, double a, double b, std::vector<double> breaks);

/// Uniform trapezoid (periodic) rule on [a, a + period).
QuadratureRule periodic_trapezoid(int n, double a, double period);

}  // namespace orient
