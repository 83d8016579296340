#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types for the Gaussian covariate teacher-student solver.
//
// The model: jointly Gaussian features (u, v) with block covariance
// (Psi, Phi; Phi^T, Omega), labels y = f0(theta0^T u / sqrt(p)), and a
// student trained by l2-regularized ERM on v. Everything the asymptotic
// theory needs is carried by a SpectralModel: the spectrum of Omega, the
// teacher projection rotated into its eigenbasis, rho and gamma.

namespace gcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Error types

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPositiveV : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RootFindingFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateOverlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateLabels : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeConditionalVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MismatchedGrids : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DenominatorNonPositive : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoBracket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Task description

enum class Loss { Square, Logistic, Hinge };
enum class TeacherFn { Linear, Sign };
enum class Metric { MSE, ZeroOne };

const char* to_string(Loss l);
const char* to_string(TeacherFn f);
const char* to_string(Metric m);
Loss loss_from_string(const std::string& s);
TeacherFn teacher_from_string(const std::string& s);
Metric metric_from_string(const std::string& s);

struct TaskSpec {
    Loss loss = Loss::Square;
    TeacherFn teacher_fn = TeacherFn::Linear;
    double lambda = 1e-2;  // l2 strength, strictly positive
    Metric metric = Metric::MSE;

    // Throws std::invalid_argument on violated invariants.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Order parameters

// (V, q, m): effective variance, student self-overlap through Omega, and
// teacher-student alignment. m^2 <= rho*q holds at any valid state.
struct Overlaps {
    double v = 0.0;
    double q = 0.0;
    double m = 0.0;
};

// Conjugate parameters (V^, q^, m^) entering the resolvent spectral sums.
struct ConjugateOverlaps {
    double v_hat = 0.0;
    double q_hat = 0.0;
    double m_hat = 0.0;
};

struct SolverOptions {
    double damping = 0.5;  // in [0, 1)
    double tol = 1e-8;
    int max_iter = 10000;
    int quad_nodes = 127;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Model inputs

// Full covariance description (Psi, Phi, Omega) plus the teacher vector.
// Psi is p x p, Phi is p x d, Omega is d x d.
struct CovarianceTriple {
    MatrixXd psi;
    MatrixXd phi;
    MatrixXd omega;
    VectorXd theta0;

    Index p() const { return psi.rows(); }
    Index d() const { return omega.rows(); }

    // Relative eigenvalue floor below which a covariance counts as singular.
    static constexpr double kPdFloor = 1e-12;

    // Checks shapes, symmetry, positive definiteness of Psi and Omega, the
    // positive semi-definiteness of the Schur complement
    // Omega - Phi^T Psi^{-1} Phi, and that theta0 has finite nonzero norm.
    void validate() const;
};

// Spectral reduction: everything the fixed-point equations consume.
// eigenvalues[i] is omega_i >= 0; teacher_projection[i] is the i-th
// component of S Phi^T theta0 with S the orthonormal eigenbasis of Omega.
struct SpectralModel {
    VectorXd eigenvalues;
    VectorXd teacher_projection;
    double rho = 1.0;    // theta0^T Psi theta0 / p
    double gamma = 1.0;  // p / d

    Index d() const { return eigenvalues.size(); }
    Index p() const { return static_cast<Index>(std::llround(gamma * static_cast<double>(d()))); }

    void validate() const;
};

// ---------------------------------------------------------------------------
// Sweep output

// One learning-curve row. `x` is the sweep variable (alpha = n/d, or n for
// kernel curves).
struct LearningCurveRow {
    double x = 0.0;
    double e_gen = 0.0;
    double e_train = 0.0;
    double v = 0.0;
    double q = 0.0;
    double m = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct LearningCurve {
    std::string sweep_variable = "alpha";  // "alpha" or "n"
    std::vector<LearningCurveRow> rows;

    bool all_converged() const;
};

}  // namespace gcm
