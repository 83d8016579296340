#pragma once

#include "gcm/types.hpp"

namespace gcm {

struct StateEvolutionResult {
    Overlaps overlaps;
    ConjugateOverlaps hats;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;  // max absolute update at exit
};

// Spectral ("variance") channel, evaluated in the eigenbasis of Omega:
//   V = (1/d) sum_i w_i / (lambda + V^ w_i)
//   q = (1/d) sum_i (q^ w_i^2 + m^2_hat t_i^2 w_i) / (lambda + V^ w_i)^2
//   m = (m^ / (sqrt(gamma) d)) sum_i t_i^2 / (lambda + V^ w_i)
Overlaps variance_channel(const ConjugateOverlaps& hats, const SpectralModel& model, double lambda);

// Ridge (linear teacher, square loss), closed form:
//   V^ = alpha/(1+V),  q^ = alpha (rho + q - 2m)/(1+V)^2,
//   m^ = alpha / (sqrt(gamma) (1+V)).
ConjugateOverlaps hat_channel_ridge(const Overlaps& overlaps, double rho, double alpha,
                                    double gamma);

// Sign teacher fitted with the square loss, closed form:
//   V^ = alpha/(1+V),  q^ = alpha (1 + q - 2 m sqrt(2/(pi rho)))/(1+V)^2,
//   m^ = sqrt(2/(pi rho)) alpha/(1+V).
ConjugateOverlaps hat_channel_square_classification(const Overlaps& overlaps, double rho,
                                                    double alpha, double gamma);

// Sign teacher with logistic or hinge loss. The xi-expectation uses
// Gauss-Hermite with opts.quad_nodes nodes (breakpoint-split Gauss-Legendre
// for the hinge, whose integrands are only piecewise smooth); the label
// integral is the exact two-term sum over y = +-1 with teacher measure
//   Z0(y, w0, Veff) = (1 + erf(y w0 / sqrt(2 Veff))) / 2,
// w0 = (m/sqrt(q)) xi and Veff = rho - m^2/q, and f_g evaluated at
// (sqrt(q) xi, V).
ConjugateOverlaps hat_channel_quadrature(const Overlaps& overlaps, double rho, double alpha,
                                         double gamma, const TaskSpec& task,
                                         const SolverOptions& opts);

// Hat channel dispatch for the supported (teacher, loss) pairs.
ConjugateOverlaps hat_channel(const Overlaps& overlaps, const SpectralModel& model,
                              const TaskSpec& task, double alpha, const SolverOptions& opts);

// Damped alternation of the two channels until the six order parameters move
// by less than opts.tol. Non-convergence is reported through the flag, not
// thrown. Pure function of its inputs.
StateEvolutionResult solve(const SpectralModel& model, const TaskSpec& task, double alpha,
                           const SolverOptions& opts);

// As solve(), but starting from a caller-supplied state (used by warm-started
// sweeps and lambda -> 0+ sequences).
StateEvolutionResult solve_from(const SpectralModel& model, const TaskSpec& task, double alpha,
                                const SolverOptions& opts, const Overlaps& init,
                                const ConjugateOverlaps& init_hats);

// (1/d) E||w*||^2 at a fixed point: (1/d) sum_i (m^2_hat t_i^2 + q^ w_i) /
// (lambda + V^ w_i)^2. Bookkeeping for the regularizer term of the training
// objective.
double estimator_norm_sq(const ConjugateOverlaps& hats, const SpectralModel& model, double lambda);

}  // namespace gcm
