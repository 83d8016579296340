#include "gcm/feature_models.hpp"

#include "gcm/quadrature.hpp"
#include "gcm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>

namespace gcm {

namespace {

constexpr int kKappaNodes = 129;

double apply_nonlinearity(Nonlinearity nl, double z) {
    switch (nl) {
        case Nonlinearity::Erf: return std::erf(z);
        case Nonlinearity::Tanh: return std::tanh(z);
        case Nonlinearity::Sign: return z >= 0.0 ? 1.0 : -1.0;
        case Nonlinearity::Relu: return z > 0.0 ? z : 0.0;
    }
    return 0.0;
}

}  // namespace

const char* to_string(Nonlinearity nl) {
    switch (nl) {
        case Nonlinearity::Erf: return "erf";
        case Nonlinearity::Tanh: return "tanh";
        case Nonlinearity::Sign: return "sign";
        case Nonlinearity::Relu: return "relu";
    }
    return "?";
}

Nonlinearity nonlinearity_from_string(const std::string& s) {
    if (s == "erf") return Nonlinearity::Erf;
    if (s == "tanh") return Nonlinearity::Tanh;
    if (s == "sign") return Nonlinearity::Sign;
    if (s == "relu") return Nonlinearity::Relu;
    throw std::invalid_argument("unknown nonlinearity: " + s);
}

void RandomFeatureSpec::validate() const {
    if (p < 1 || d < 1) throw std::invalid_argument("RandomFeatureSpec: p, d must be >= 1");
}

KappaConstants kappa_constants(Nonlinearity nl) {
    // Split the Gaussian expectation at the origin: sign and relu are not
    // smooth there, and a plain Hermite rule stalls at a few digits.
    auto expect = [nl](auto&& f) {
        return gaussian_expectation_piecewise(kKappaNodes, {0.0}, f);
    };
    auto sigma = [nl](double z) { return apply_nonlinearity(nl, z); };
    KappaConstants k;
    k.kappa0 = expect(sigma);
    k.kappa1 = expect([&](double z) { return z * sigma(z); });
    const double second = expect([&](double z) {
        const double s = sigma(z);
        return s * s;
    });
    k.kappa_star = std::sqrt(std::max(second - k.kappa0 * k.kappa0 - k.kappa1 * k.kappa1, 0.0));
    return k;
}

SpectralModel vanilla_model(Index d, const VectorXd& theta0, std::optional<double> rho_target) {
    if (d < 1 || theta0.size() != d)
        throw DimensionMismatch("vanilla_model: theta0 must have length d");
    SpectralModel model;
    model.eigenvalues = VectorXd::Ones(d);
    model.teacher_projection = theta0;
    model.rho = theta0.squaredNorm() / static_cast<double>(d);
    model.gamma = 1.0;
    if (rho_target) {
        const double scale = std::sqrt(*rho_target / model.rho);
        model.teacher_projection *= scale;
        model.rho = *rho_target;
    }
    model.validate();
    return model;
}

CovarianceTriple random_features_triple(const RandomFeatureSpec& spec,
                                        std::optional<KappaConstants> kappa_override) {
    spec.validate();
    const KappaConstants k = kappa_override ? *kappa_override : kappa_constants(spec.nonlinearity);

    GaussianSampler fstream(derive_stream(spec.seed, 0));
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.p));
    MatrixXd f(spec.d, spec.p);
    for (Index i = 0; i < spec.d; ++i)
        for (Index j = 0; j < spec.p; ++j) f(i, j) = scale * fstream();

    GaussianSampler tstream(derive_stream(spec.seed, 1));
    VectorXd theta0(spec.p);
    for (Index j = 0; j < spec.p; ++j) theta0(j) = tstream();

    CovarianceTriple triple;
    triple.psi = MatrixXd::Identity(spec.p, spec.p);
    triple.phi = k.kappa1 * f.transpose();
    triple.omega = k.kappa1 * k.kappa1 * (f * f.transpose());
    triple.omega.diagonal().array() += k.kappa_star * k.kappa_star;
    if (k.kappa0 != 0.0)
        triple.omega.array() += k.kappa0 * k.kappa0;  // rank-one all-ones spike
    triple.theta0 = theta0;
    return triple;
}

SpectralModel kernel_diagonal_model(const VectorXd& omega, const VectorXd& theta0) {
    if (omega.size() != theta0.size())
        throw DimensionMismatch("kernel_diagonal_model: omega and theta0 lengths differ");
    if (omega.size() == 0) throw DimensionMismatch("kernel_diagonal_model: empty spectrum");
    if (omega.minCoeff() < 0.0)
        throw std::invalid_argument("kernel_diagonal_model: omega_i must be >= 0");
    SpectralModel model;
    model.eigenvalues = omega;
    model.teacher_projection = omega.cwiseProduct(theta0);
    model.rho = omega.dot(theta0.cwiseProduct(theta0)) / static_cast<double>(omega.size());
    model.gamma = 1.0;
    model.validate();
    return model;
}

SpectralModel powerlaw_kernel_model(Index d, double a, double b) {
    if (d < 1) throw std::invalid_argument("powerlaw_kernel_model: d must be >= 1");
    VectorXd omega(d), theta0(d);
    const double dd = static_cast<double>(d);
    for (Index i = 0; i < d; ++i) {
        const double idx = static_cast<double>(i + 1);
        omega(i) = dd * std::pow(idx, -b);
        // theta0_i^2 = (d i^-a) / omega_i = i^{b-a}
        theta0(i) = std::pow(idx, 0.5 * (b - a));
    }
    return kernel_diagonal_model(omega, theta0);
}

EmpiricalModel estimate_from_data(const MatrixXd& features, const VectorXd& labels) {
    const Index n_tot = features.rows();
    const Index d = features.cols();
    if (labels.size() != n_tot)
        throw DimensionMismatch("estimate_from_data: one label per feature row required");
    if (n_tot < 2) throw std::invalid_argument("estimate_from_data: need n_tot >= 2");
    if (labels.maxCoeff() == labels.minCoeff())
        throw DegenerateLabels("estimate_from_data: all labels are equal");

    const MatrixXd centered = features.rowwise() - features.colwise().mean();
    const double inv_n = 1.0 / static_cast<double>(n_tot);
    const MatrixXd omega = inv_n * (centered.transpose() * centered);
    const VectorXd proj = inv_n * (centered.transpose() * labels);  // Phi^T theta0
    const double rho = inv_n * labels.squaredNorm();

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(omega);
    const double floor = 1e-12 * std::max(es.eigenvalues().maxCoeff(), 0.0);

    EmpiricalModel out;
    out.n_tot = n_tot;
    out.model.eigenvalues.resize(d);
    out.model.teacher_projection.resize(d);
    for (Index i = 0; i < d; ++i) {
        const Index src = d - 1 - i;  // descending
        double w = es.eigenvalues()(src);
        double t = es.eigenvectors().col(src).dot(proj);
        if (w <= floor) {  // rank-deficient feature maps are expected
            w = 0.0;
            t = 0.0;
        }
        out.model.eigenvalues(i) = w;
        out.model.teacher_projection(i) = t;
    }
    out.model.rho = rho;
    out.model.gamma = 1.0;  // teacher dimension unobservable and irrelevant
    out.model.validate();
    std::cerr << "estimate_from_data: empirical covariances from n_tot=" << n_tot
              << " samples; predictions are reliable only for n << n_tot\n";
    return out;
}

SpectralModel with_label_noise(SpectralModel model, double noise_variance) {
    if (noise_variance < 0.0)
        throw std::invalid_argument("with_label_noise: noise_variance must be >= 0");
    model.rho += noise_variance;
    return model;
}

}  // namespace gcm
