#include "gcm/types.hpp"

#include <Eigen/Eigenvalues>

namespace gcm {

const char* to_string(Loss l) {
    switch (l) {
        case Loss::Square: return "square";
        case Loss::Logistic: return "logistic";
        case Loss::Hinge: return "hinge";
    }
    return "?";
}

const char* to_string(TeacherFn f) {
    return f == TeacherFn::Linear ? "linear" : "sign";
}

const char* to_string(Metric m) {
    return m == Metric::MSE ? "mse" : "zero_one";
}

Loss loss_from_string(const std::string& s) {
    if (s == "square") return Loss::Square;
    if (s == "logistic") return Loss::Logistic;
    if (s == "hinge") return Loss::Hinge;
    throw std::invalid_argument("unknown loss: " + s);
}

TeacherFn teacher_from_string(const std::string& s) {
    if (s == "linear") return TeacherFn::Linear;
    if (s == "sign") return TeacherFn::Sign;
    throw std::invalid_argument("unknown teacher: " + s);
}

Metric metric_from_string(const std::string& s) {
    if (s == "mse") return Metric::MSE;
    if (s == "zero_one") return Metric::ZeroOne;
    throw std::invalid_argument("unknown metric: " + s);
}

void TaskSpec::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("TaskSpec: lambda must be > 0 (take the lambda->0+ limit along a sequence)");
    if (metric == Metric::ZeroOne && teacher_fn != TeacherFn::Sign)
        throw std::invalid_argument("TaskSpec: zero-one metric requires a sign teacher");
}

void SolverOptions::validate() const {
    if (!(damping >= 0.0 && damping < 1.0))
        throw std::invalid_argument("SolverOptions: damping must lie in [0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("SolverOptions: tol must be > 0");
    if (max_iter <= 0) throw std::invalid_argument("SolverOptions: max_iter must be positive");
    if (quad_nodes <= 0) throw std::invalid_argument("SolverOptions: quad_nodes must be positive");
}

namespace {

void check_symmetric(const MatrixXd& m, const char* name) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NotPositiveDefinite(std::string(name) + " is not symmetric");
}

// Smallest eigenvalue must exceed kPdFloor times the largest.
void check_positive_definite(const MatrixXd& m, const char* name) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo <= CovarianceTriple::kPdFloor * hi)
        throw NotPositiveDefinite(std::string(name) + " fails the positive-definiteness floor");
}

}  // namespace

void CovarianceTriple::validate() const {
    if (psi.rows() != psi.cols() || omega.rows() != omega.cols())
        throw DimensionMismatch("psi and omega must be square");
    if (phi.rows() != psi.rows() || phi.cols() != omega.rows())
        throw DimensionMismatch("phi must be p x d");
    if (theta0.size() != psi.rows())
        throw DimensionMismatch("theta0 must have length p");

    check_symmetric(psi, "psi");
    check_symmetric(omega, "omega");
    check_positive_definite(psi, "psi");
    check_positive_definite(omega, "omega");

    const double norm2 = theta0.squaredNorm();
    if (!(norm2 > 0.0) || !std::isfinite(norm2))
        throw std::invalid_argument("theta0 must have finite nonzero norm");

    // Schur complement Omega - Phi^T Psi^{-1} Phi must be PSD (within
    // tolerance) for the joint Gaussian to exist.
    const MatrixXd schur = omega - phi.transpose() * psi.ldlt().solve(phi);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(schur, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * scale)
        throw NotPositiveDefinite("Schur complement omega - phi^T psi^{-1} phi is not PSD");
}

void SpectralModel::validate() const {
    if (eigenvalues.size() != teacher_projection.size())
        throw DimensionMismatch("eigenvalues and teacher_projection must have equal length");
    if (eigenvalues.size() == 0) throw DimensionMismatch("empty spectral model");
    if (eigenvalues.minCoeff() < 0.0)
        throw std::invalid_argument("eigenvalues must be nonnegative");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be > 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
}

bool LearningCurve::all_converged() const {
    for (const auto& r : rows)
        if (!r.converged) return false;
    return true;
}

}  // namespace gcm
