#pragma once

#include "gcm/types.hpp"

#include <cstdint>
#include <optional>

namespace gcm {

enum class Nonlinearity { Erf, Tanh, Sign, Relu };

const char* to_string(Nonlinearity nl);
Nonlinearity nonlinearity_from_string(const std::string& s);

struct RandomFeatureSpec {
    Index p = 1;  // teacher (input) dimension
    Index d = 1;  // feature dimension
    Nonlinearity nonlinearity = Nonlinearity::Erf;
    std::uint64_t seed = 0;

    void validate() const;
};

// Gaussian-equivalence constants of a scalar nonlinearity:
//   kappa0 = E[sigma(z)], kappa1 = E[z sigma(z)],
//   kappa_star^2 = E[sigma(z)^2] - kappa0^2 - kappa1^2,
// computed by 129-node Gauss-Hermite quadrature.
struct KappaConstants {
    double kappa0 = 0.0;
    double kappa1 = 0.0;
    double kappa_star = 0.0;
};

KappaConstants kappa_constants(Nonlinearity nl);

// Identity covariances, u = v: eigenvalues all one, teacher projection
// theta0, rho = ||theta0||^2 / d (rescaled to rho_target when given),
// gamma = 1.
SpectralModel vanilla_model(Index d, const VectorXd& theta0,
                            std::optional<double> rho_target = std::nullopt);

// Random kitchen sink: F is d x p with i.i.d. N(0, 1/p) entries (so the rows
// of F x have unit scale), deterministic in the seed, and
//   Psi = I_p,  Phi = kappa1 F^T,
//   Omega = kappa0^2 11^T + kappa1^2 F F^T + kappa_star^2 I_d.
// The teacher vector is drawn N(0, I_p) from a derived stream of the same
// seed. kappa_override substitutes the constants (test hook for exactly
// linear feature maps).
CovarianceTriple random_features_triple(const RandomFeatureSpec& spec,
                                        std::optional<KappaConstants> kappa_override = std::nullopt);

// Kernel methods in the feature basis: Psi = Phi = Omega = diag(omega), so
// teacher_projection_i = omega_i theta0_i, rho = sum_i omega_i theta0_i^2 / d,
// gamma = 1.
SpectralModel kernel_diagonal_model(const VectorXd& omega, const VectorXd& theta0);

// Kernel diagonal model under the source/capacity power-law ansatz
// omega_i = d i^{-b}, theta0_i^2 omega_i = d i^{-a}.
SpectralModel powerlaw_kernel_model(Index d, double a, double b);

struct EmpiricalModel {
    SpectralModel model;
    Index n_tot = 0;  // predictions are reliable only for n << n_tot
};

// Builds the solver input from data alone, using the universality of
// interpolating linear teachers: rho = mean(y^2), Phi^T theta0 = mean(y v),
// Omega = empirical covariance of the (centered) features. Eigenvalues below
// 1e-12 of the largest are zeroed together with their projections; gamma = 1
// by convention (the teacher dimension is unobservable). No theta0 is ever
// materialized.
EmpiricalModel estimate_from_data(const MatrixXd& features, const VectorXd& labels);

// Inflates rho by noise_variance, emulating additive label noise
// y = theta0^T u / sqrt(p) + sqrt(noise_variance) * xi: the equations depend
// on the labels only through their second moment.
SpectralModel with_label_noise(SpectralModel model, double noise_variance);

}  // namespace gcm
