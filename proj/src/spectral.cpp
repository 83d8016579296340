#include "gcm/spectral.hpp"

#include <Eigen/Eigenvalues>

namespace gcm {

SpectralModel spectral_reduce(const CovarianceTriple& triple) {
    triple.validate();

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(triple.omega);
    if (es.info() != Eigen::Success)
        throw NotPositiveDefinite("spectral_reduce: eigendecomposition of omega failed");

    const Index d = triple.d();
    const VectorXd proj = es.eigenvectors().transpose() * (triple.phi.transpose() * triple.theta0);

    // Eigen returns ascending order; flip to descending.
    SpectralModel model;
    model.eigenvalues.resize(d);
    model.teacher_projection.resize(d);
    for (Index i = 0; i < d; ++i) {
        model.eigenvalues(i) = es.eigenvalues()(d - 1 - i);
        model.teacher_projection(i) = proj(d - 1 - i);
    }
    model.rho = triple.theta0.dot(triple.psi * triple.theta0) / static_cast<double>(triple.p());
    model.gamma = static_cast<double>(triple.p()) / static_cast<double>(d);
    model.validate();
    return model;
}

}  // namespace gcm
