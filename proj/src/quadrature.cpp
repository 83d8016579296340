#include "gcm/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gcm {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const std::vector<double>& offdiag, double mu0) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        jacobi(k, k + 1) = offdiag[static_cast<std::size_t>(k)];
        jacobi(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}

const QuadratureRule& cached_rule(std::map<int, QuadratureRule>& cache, std::mutex& mutex, int n,
                                  QuadratureRule (*build)(int)) {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build(n)).first;
    return it->second;
}

QuadratureRule build_hermite(int n) {
    std::vector<double> off(static_cast<std::size_t>(n - 1));
    for (int k = 1; k < n; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(0.5 * k);
    return golub_welsch(off, kSqrtPi);
}

QuadratureRule build_legendre(int n) {
    std::vector<double> off(static_cast<std::size_t>(n - 1));
    for (int k = 1; k < n; ++k)
        off[static_cast<std::size_t>(k - 1)] = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(off, 2.0);
}

}  // namespace

const QuadratureRule& gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    return cached_rule(cache, mutex, n, build_hermite);
}

const QuadratureRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    return cached_rule(cache, mutex, n, build_legendre);
}

double gaussian_expectation(int n, const std::function<double(double)>& f) {
    const QuadratureRule& rule = gauss_hermite(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(kSqrt2 * rule.nodes[i]);
    return acc / kSqrtPi;
}

double gaussian_expectation_piecewise(int n, const std::vector<double>& breakpoints,
                                      const std::function<double(double)>& f, double tail_cut) {
    std::vector<double> pts;
    pts.push_back(-tail_cut);
    for (double b : breakpoints)
        if (b > -tail_cut && b < tail_cut) pts.push_back(b);
    pts.push_back(tail_cut);
    std::sort(pts.begin(), pts.end());

    const QuadratureRule& rule = gauss_legendre(n);
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        const double mid = 0.5 * (pts[s] + pts[s + 1]);
        const double half = 0.5 * (pts[s + 1] - pts[s]);
        if (half <= 0.0) continue;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double xi = mid + half * rule.nodes[i];
            acc += half * rule.weights[i] * kInvSqrt2Pi * std::exp(-0.5 * xi * xi) * f(xi);
        }
    }
    return acc;
}

}  // namespace gcm
