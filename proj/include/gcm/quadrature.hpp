#pragma once

#include <functional>
#include <vector>

namespace gcm {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule with weight exp(-x^2) (physicists' convention),
// computed by Golub-Welsch. Cached per node count; thread-safe.
const QuadratureRule& gauss_hermite(int n);

// Gauss-Legendre rule on [-1, 1]. Cached per node count; thread-safe.
const QuadratureRule& gauss_legendre(int n);

// E_{xi ~ N(0,1)}[f(xi)] via n-node Gauss-Hermite.
double gaussian_expectation(int n, const std::function<double(double)>& f);

// E_{xi ~ N(0,1)}[f(xi)] for f that is smooth between the given breakpoints
// but may kink or jump across them. Integrates exp(-xi^2/2)/sqrt(2*pi) * f
// with composite Gauss-Legendre (n nodes per segment) on [-tail_cut, tail_cut]
// split at the interior breakpoints. Used by the hinge channel, whose
// integrands are only piecewise smooth.
double gaussian_expectation_piecewise(int n, const std::vector<double>& breakpoints,
                                      const std::function<double(double)>& f,
                                      double tail_cut = 10.0);

}  // namespace gcm
