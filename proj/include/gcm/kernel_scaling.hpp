#pragma once

#include "gcm/types.hpp"

#include <cstdint>
#include <vector>

namespace gcm {

// Source/capacity power-law spectrum in the infinite-dimensional limit:
// omega_i ~ i^{-b} (capacity), teacher component theta~_i ~ i^{-a} (source).
struct PowerLawSpec {
    double a = 2.0;  // teacher decay exponent, > 1
    double b = 1.5;  // capacity exponent, > 1
    std::int64_t cutoff = 0;  // series truncation M; 0 = max(1e6, 100 * max n)
    double lambda = 1e-3;
    std::vector<std::int64_t> n_values;

    std::int64_t effective_cutoff() const;
    void validate() const;
};

// Unique positive root of z = lambda + (z/n) sum_{i<=M} 1/(1 + (z/n) i^b),
// by monotone bisection; z >= lambda always, residual < 1e-12 at return.
double solve_z(const PowerLawSpec& spec, std::int64_t n);

// eps_g = [sum_i i^-a / (1 + (n/z) i^-b)^2] /
//         [1 - (n/z^2) sum_i i^-2b / (1 + (n/z) i^-b)^2],
// truncated at the cutoff. Throws DenominatorNonPositive when the
// denominator is not positive (truncation too small or invalid regime).
double generalization_error_powerlaw(const PowerLawSpec& spec, std::int64_t n, double z);

// Bound on the truncated numerator tail: integral_M^inf x^-a dx.
double powerlaw_tail_bound(const PowerLawSpec& spec);

// Regime relative to the threshold n* = lambda^{-1/(b-1)}, with a factor-10
// buffer flagged as crossover.
enum class ScalingRegime { EffectiveRegularization, LambdaDominated, Crossover };
const char* to_string(ScalingRegime r);
ScalingRegime classify_regime(const PowerLawSpec& spec, std::int64_t n);

struct PowerLawPoint {
    std::int64_t n = 0;
    double z = 0.0;
    double eps_g = 0.0;
    ScalingRegime regime = ScalingRegime::Crossover;
};

// Evaluates (z, eps_g, regime) over spec.n_values, sharing the power tables
// across points.
std::vector<PowerLawPoint> powerlaw_curve(const PowerLawSpec& spec);

// OLS slope of log e against log n, excluding the two extreme points.
double fit_loglog_slope(const std::vector<double>& n_values, const std::vector<double>& e_values);

// Finite-dimensional kernel ridge curve on a diagonal model: solves
// z = lambda + (z/n) sum_i w_i / (z/alpha + w_i) per n, then evaluates the
// coupled generalization-error formula. Algebraically equivalent to the
// ridge state evolution on the same model. Rows come out sorted by n.
LearningCurve finite_d_kernel_curve(const SpectralModel& model, double lambda,
                                    std::vector<std::int64_t> n_values);

}  // namespace gcm
