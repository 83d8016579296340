#pragma once

#include "gcm/types.hpp"

namespace gcm {

struct ErrorReport {
    double e_gen = 0.0;
    double e_train = 0.0;
    Metric metric = Metric::MSE;
};

// Linear teacher, square loss:
//   E_gen = rho + q - 2m,   E_train = E_gen / (1+V)^2.
// Both are mean squared residuals (no 1/2 factor); the identity between them
// holds exactly at a converged fixed point.
ErrorReport mse_errors(const Overlaps& overlaps, double rho);

// Mean squared residual against +-1 labels from a sign teacher:
//   E_gen = 1 + q - 2 m sqrt(2/(pi rho)),   E_train = E_gen / (1+V)^2
// (square loss only; same residual convention as mse_errors).
ErrorReport sign_teacher_mse_errors(const Overlaps& overlaps, double rho);

// Zero-one generalization error of sign(w^T v): (1/pi) arccos(m / sqrt(rho q)).
double classification_error(const Overlaps& overlaps, double rho);

// Expected training loss at the proximal point, by quadrature:
//   E[(y - prox)^2]        for the square loss (matching the reported
//                          residual-squared convention), and
//   E[loss(y, prox)]       for logistic and hinge.
// Linear teachers use a 2-D tensor Gauss-Hermite rule over (s, h); sign
// teachers reduce to the 1-D xi rule plus the exact two-term label sum,
// matching the hat-channel decomposition.
double training_loss_quadrature(const Overlaps& overlaps, double rho, const TaskSpec& task,
                                const SolverOptions& opts);

// Adds the regularizer to a per-sample training objective:
// lambda*norm_sq/alpha for the square loss (residual-squared convention,
// i.e. twice the minimized objective), lambda*norm_sq/(2 alpha) otherwise.
// norm_sq is estimator_norm_sq(...) from the state evolution module.
double training_objective_with_regularizer(double e_train, Loss loss, double lambda,
                                           double norm_sq, double alpha);

}  // namespace gcm
