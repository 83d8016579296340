#include "gcm/kernel_scaling.hpp"

#include "gcm/errors.hpp"
#include "gcm/feature_models.hpp"
#include "gcm/rng.hpp"
#include "gcm/state_evolution.hpp"

#include <doctest.h>

#include <cmath>

using namespace gcm;

namespace {

PowerLawSpec make_spec(double a, double b, double lambda, std::vector<std::int64_t> ns) {
    PowerLawSpec spec;
    spec.a = a;
    spec.b = b;
    spec.lambda = lambda;
    spec.n_values = std::move(ns);
    return spec;
}

std::vector<std::int64_t> log_grid(double lo, double hi, int count) {
    std::vector<std::int64_t> ns;
    for (int i = 0; i < count; ++i) {
        const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
        const std::int64_t n = static_cast<std::int64_t>(std::llround(x));
        if (ns.empty() || ns.back() != n) ns.push_back(n);
    }
    return ns;
}

}  // namespace

TEST_CASE("solve_z residual and lower bound") {
    const PowerLawSpec spec = make_spec(2.0, 2.0, 0.1, {100});
    const double z = solve_z(spec, 100);
    CHECK(z >= spec.lambda);
    // Residual is its own oracle.
    double rhs = spec.lambda;
    const std::int64_t m = spec.effective_cutoff();
    for (std::int64_t i = 1; i <= m; ++i)
        rhs += (z / 100.0) / (1.0 + (z / 100.0) * std::pow(static_cast<double>(i), spec.b));
    CHECK(std::abs(z - rhs) < 1e-12 * std::max(1.0, z));

    const double z1 = solve_z(spec, 1);
    CHECK(z1 > spec.lambda);
}

TEST_CASE("z is strictly increasing in lambda") {
    double prev = 0.0;
    for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        const PowerLawSpec spec = make_spec(2.0, 1.5, lambda, {500});
        const double z = solve_z(spec, 500);
        CHECK(z > prev);
        prev = z;
    }
}

TEST_CASE("z scales as n^(1-b) in the effective-regularization regime") {
    // lambda = 1e-6, b = 2: threshold lambda^{-1/(b-1)} = 1e6 >> 5000.
    const auto ns = log_grid(50, 5000, 10);
    PowerLawSpec spec = make_spec(2.0, 2.0, 1e-6, std::vector<std::int64_t>(ns));
    std::vector<double> xs, zs;
    for (auto n : ns) {
        xs.push_back(static_cast<double>(n));
        zs.push_back(solve_z(spec, n));
        CHECK(classify_regime(spec, n) == ScalingRegime::EffectiveRegularization);
    }
    const double slope = fit_loglog_slope(xs, zs);
    CHECK(std::abs(slope - (1.0 - spec.b)) < 0.05);
}

TEST_CASE("generalization error approaches the no-data limit") {
    // As n/z -> 0 the numerator tends to the truncated zeta(a) and the
    // denominator to one.
    PowerLawSpec spec = make_spec(2.0, 1.5, 1.0, {1});
    spec.cutoff = 200000;
    double zeta_a = 0.0;
    for (std::int64_t i = 1; i <= spec.cutoff; ++i)
        zeta_a += std::pow(static_cast<double>(i), -spec.a);
    const double eps = generalization_error_powerlaw(spec, 1, 1e9);
    CHECK(eps == doctest::Approx(zeta_a).epsilon(1e-4));
    CHECK(powerlaw_tail_bound(spec) ==
          doctest::Approx(std::pow(200000.0, -1.0) / 1.0).epsilon(1e-12));
}

TEST_CASE("effective-regularization regime: eps_g slope is -min(a-1, 2b)") {
    // a = 2, b = 1.5, lambda = 1e-3: threshold = 1e6, so n in [1e2, 1e4] sits
    // deep inside the first regime and the slope is -1 within +-0.1.
    PowerLawSpec spec = make_spec(2.0, 1.5, 1e-3, log_grid(100, 10000, 10));
    const auto points = powerlaw_curve(spec);
    std::vector<double> xs, es;
    for (const auto& pt : points) {
        xs.push_back(static_cast<double>(pt.n));
        es.push_back(pt.eps_g);
        CHECK(pt.regime == ScalingRegime::EffectiveRegularization);
    }
    const double slope = fit_loglog_slope(xs, es);
    CHECK(std::abs(slope - (-1.0)) < 0.1);
}

TEST_CASE("lambda-dominated regime: eps_g slope is -min(a-1, 2b)/b") {
    // a = 2, b = 1.5, lambda = 0.5: threshold = 4, so n in [1e4, 1e5] is deep
    // inside the second regime; expected slope -2/3 within +-0.1 (finite-n
    // corrections decay like n^(-1/3), hence the late window).
    PowerLawSpec spec = make_spec(2.0, 1.5, 0.5, log_grid(10000, 100000, 7));
    const auto points = powerlaw_curve(spec);
    std::vector<double> xs, es;
    for (const auto& pt : points) {
        xs.push_back(static_cast<double>(pt.n));
        es.push_back(pt.eps_g);
        CHECK(pt.regime == ScalingRegime::LambdaDominated);
    }
    const double slope = fit_loglog_slope(xs, es);
    CHECK(std::abs(slope - (-2.0 / 3.0)) < 0.1);
}

TEST_CASE("crossover window: measured slope is bracketed by the two regime exponents") {
    // lambda = 1e-2, threshold = 1e4: fit across the transition window and
    // check the slope sits between -min(a-1,2b) and -min(a-1,2b)/b.
    PowerLawSpec spec = make_spec(2.0, 1.5, 1e-2, log_grid(2000, 50000, 8));
    const auto points = powerlaw_curve(spec);
    bool saw_crossover = false;
    std::vector<double> xs, es;
    for (const auto& pt : points) {
        xs.push_back(static_cast<double>(pt.n));
        es.push_back(pt.eps_g);
        saw_crossover = saw_crossover || pt.regime == ScalingRegime::Crossover;
    }
    CHECK(saw_crossover);
    const double slope = fit_loglog_slope(xs, es);
    CHECK(slope > -1.0);
    CHECK(slope < -2.0 / 3.0);
}

TEST_CASE("eps_g decreases in n on a fixed spec") {
    PowerLawSpec spec = make_spec(2.0, 1.5, 1e-2, log_grid(100, 3000, 6));
    const auto points = powerlaw_curve(spec);
    for (std::size_t i = 1; i < points.size(); ++i) CHECK(points[i].eps_g < points[i - 1].eps_g);
}

TEST_CASE("finite-d kernel curve agrees with the state evolution solver") {
    GaussianSampler rng(131);
    for (int rep = 0; rep < 10; ++rep) {
        const Index d = 64;
        VectorXd omega(d), theta(d);
        for (Index i = 0; i < d; ++i) {
            omega(i) = 0.05 + 2.0 * rng.uniform();
            theta(i) = rng();
        }
        const SpectralModel model = kernel_diagonal_model(omega, theta);
        const double lambda = 0.05;
        const std::vector<std::int64_t> ns = {32, 64, 128, 256};
        const LearningCurve kernel = finite_d_kernel_curve(model, lambda, ns);

        TaskSpec task;
        task.lambda = lambda;
        SolverOptions opts;
        opts.tol = 1e-13;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const double alpha = static_cast<double>(ns[i]) / static_cast<double>(d);
            const StateEvolutionResult r = solve(model, task, alpha, opts);
            REQUIRE(r.converged);
            const double e_se = mse_errors(r.overlaps, model.rho).e_gen;
            CHECK(std::abs(kernel.rows[i].e_gen - e_se) / e_se < 1e-6);
        }
    }
}

TEST_CASE("finite-d kernel curve: large lambda shrinks the estimator to zero") {
    const SpectralModel model = powerlaw_kernel_model(128, 2.0, 1.5);
    const LearningCurve curve = finite_d_kernel_curve(model, 1e7, {64});
    CHECK(curve.rows[0].e_gen == doctest::Approx(model.rho).epsilon(1e-3));
}

TEST_CASE("flat spectrum reduces to the vanilla ridge curve") {
    const Index d = 32;
    const SpectralModel kernel = kernel_diagonal_model(VectorXd::Ones(d), VectorXd::Ones(d));
    const SpectralModel vanilla = vanilla_model(d, VectorXd::Ones(d));
    const LearningCurve a = finite_d_kernel_curve(kernel, 0.1, {16, 32, 64});

    TaskSpec task;
    task.lambda = 0.1;
    SolverOptions opts;
    opts.tol = 1e-13;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const double alpha = a.rows[i].x / static_cast<double>(d);
        const StateEvolutionResult r = solve(vanilla, task, alpha, opts);
        CHECK(a.rows[i].e_gen ==
              doctest::Approx(mse_errors(r.overlaps, 1.0).e_gen).epsilon(1e-8));
    }
}

TEST_CASE("power-law spec validation") {
    PowerLawSpec spec = make_spec(2.0, 1.0, 0.1, {10});
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);  // b must exceed 1
    spec.b = 1.5;
    spec.cutoff = 5;  // below max n
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
