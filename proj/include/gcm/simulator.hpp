#pragma once

#include "gcm/rng.hpp"
#include "gcm/types.hpp"

namespace gcm {

struct SimulationConfig {
    Index d = 100;
    Index n = 100;
    int trials = 10;
    std::uint64_t seed = 0;
    TaskSpec task;

    void validate() const;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct SimulationReport {
    Estimate e_gen;
    Estimate e_train;
    Estimate q_emp;
    Estimate m_emp;
    Estimate norm_sq;  // ||w||^2 / d bookkeeping
    SimulationConfig config;
};

// One finite-size draw from the Gaussian covariate model: design rows
// v ~ N(0, Omega) (in the eigenbasis for the spectral form); the scalar
// teacher field nu = theta0^T u / sqrt(p) is drawn from its exact
// conditional law given v, so u itself is never materialized; labels are
// f0(nu).
struct Instance {
    MatrixXd design;        // n x d, rows are raw samples v
    VectorXd teacher_field; // nu
    VectorXd labels;        // f0(nu)
};

Instance sample_instance(const SpectralModel& model, Index n, TeacherFn teacher_fn,
                         GaussianSampler& rng);
Instance sample_instance(const CovarianceTriple& triple, Index n, TeacherFn teacher_fn,
                         GaussianSampler& rng);

// Exact l2-regularized least squares on the sqrt(d)-normalized design:
// primal normal equations for n >= d, the dual form for n < d.
VectorXd ridge_fit(const MatrixXd& design, const VectorXd& labels, double lambda);

// Minimizes sum_mu log(1 + exp(-y_mu w^T v_mu / sqrt(d))) + (lambda/2)||w||^2
// by damped Newton with step halving; gradient-norm tolerance 1e-9.
VectorXd logistic_fit(const MatrixXd& design, const VectorXd& labels, double lambda);

// Full oracle run: per trial samples an instance, fits, measures empirical
// overlaps, and computes the generalization error analytically from the
// overlaps (exact for Gaussian fresh samples, no holdout noise). Trials use
// derived RNG streams (seed, trial), so results do not depend on the thread
// count (GCM_THREADS, default 1).
SimulationReport run(const SimulationConfig& config, const SpectralModel& model);
SimulationReport run(const SimulationConfig& config, const CovarianceTriple& triple);

}  // namespace gcm
