#include "gcm/errors.hpp"

#include "gcm/feature_models.hpp"
#include "gcm/prox.hpp"
#include "gcm/rng.hpp"
#include "gcm/state_evolution.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gcm;

TEST_CASE("mse error plug-ins") {
    Overlaps o;
    SUBCASE("null estimator") {
        CHECK(mse_errors(o, 1.0).e_gen == doctest::Approx(1.0));
    }
    SUBCASE("perfect recovery") {
        o.v = 1.0;
        o.q = 1.0;
        o.m = 1.0;
        const ErrorReport rep = mse_errors(o, 1.0);
        CHECK(rep.e_gen == doctest::Approx(0.0));
        CHECK(rep.e_train == doctest::Approx(0.0));
    }
    SUBCASE("arithmetic plug-in") {
        o.v = 0.3;
        o.q = 0.64;
        o.m = 0.7;
        const ErrorReport rep = mse_errors(o, 1.0);
        CHECK(rep.e_gen == doctest::Approx(0.24));
        CHECK(rep.e_train == doctest::Approx(0.24 / 1.69));
    }
    SUBCASE("inconsistent overlaps rejected") {
        o.q = 0.0;
        o.m = 1.0;
        CHECK_THROWS_AS(mse_errors(o, 1.0), NegativeError);
    }
}

TEST_CASE("classification error plug-ins") {
    Overlaps o;
    o.q = 0.49;
    SUBCASE("perfect alignment") {
        o.m = std::sqrt(1.0 * o.q);
        CHECK(classification_error(o, 1.0) == doctest::Approx(0.0));
    }
    SUBCASE("no alignment") {
        o.m = 0.0;
        CHECK(classification_error(o, 1.0) == doctest::Approx(0.5));
    }
    SUBCASE("half alignment") {
        o.m = 0.5 * std::sqrt(o.q);
        CHECK(classification_error(o, 1.0) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("degenerate q") {
        o.q = 0.0;
        CHECK_THROWS_AS(classification_error(o, 1.0), DegenerateOverlap);
    }
}

TEST_CASE("classification error is scale-free in (m, q) -> (c m, c^2 q)") {
    GaussianSampler rng(71);
    for (int i = 0; i < 100; ++i) {
        Overlaps o;
        o.q = 0.2 + rng.uniform();
        const double rho = 0.5 + rng.uniform();
        o.m = (2.0 * rng.uniform() - 1.0) * std::sqrt(rho * o.q);
        const double base = classification_error(o, rho);
        const double c = 0.1 + 3.0 * rng.uniform();
        Overlaps scaled;
        scaled.q = c * c * o.q;
        scaled.m = c * o.m;
        CHECK(classification_error(scaled, rho) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("square-loss training quadrature equals the closed form") {
    // The prox expectation reduces analytically for the square loss; the
    // quadrature route must reproduce mse_errors.e_train to 1e-8 on random
    // states with m^2 <= rho q.
    GaussianSampler rng(73);
    TaskSpec task;
    task.lambda = 0.1;
    SolverOptions opts;
    for (int i = 0; i < 50; ++i) {
        Overlaps o;
        o.v = 2.0 * rng.uniform();
        o.q = 0.1 + 1.5 * rng.uniform();
        const double rho = 0.5 + rng.uniform();
        o.m = (2.0 * rng.uniform() - 1.0) * 0.95 * std::sqrt(rho * o.q);
        const double quad = training_loss_quadrature(o, rho, task, opts);
        CHECK(quad == doctest::Approx(mse_errors(o, rho).e_train).epsilon(1e-8));
    }
}

TEST_CASE("square-loss training quadrature at converged ridge fixed points") {
    VectorXd omega(16), theta(16);
    GaussianSampler rng(79);
    for (Index i = 0; i < 16; ++i) {
        omega(i) = 0.2 + 2.0 * rng.uniform();
        theta(i) = rng();
    }
    const SpectralModel model = kernel_diagonal_model(omega, theta);
    TaskSpec task;
    task.lambda = 0.07;
    SolverOptions opts;
    opts.tol = 1e-11;
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
        const StateEvolutionResult r = solve(model, task, alpha, opts);
        REQUIRE(r.converged);
        const double quad = training_loss_quadrature(r.overlaps, model.rho, task, opts);
        CHECK(quad == doctest::Approx(mse_errors(r.overlaps, model.rho).e_train).epsilon(1e-8));
    }
}

TEST_CASE("hinge training loss against a 1e7-sample Monte Carlo oracle") {
    Overlaps o;
    o.v = 1.0;
    o.q = 1.0;
    o.m = 0.0;
    TaskSpec task;
    task.loss = Loss::Hinge;
    task.teacher_fn = TeacherFn::Sign;
    task.lambda = 0.1;
    SolverOptions opts;
    const double quad = training_loss_quadrature(o, 1.0, task, opts);

    const double mc = oracles::mc_expectation_2d(10'000'000, 1234, [&](double xi, double eps) {
        const double w = xi;  // sqrt(q) = 1
        const double y = eps >= 0.0 ? 1.0 : -1.0;  // m = 0: nu = sqrt(veff) eps
        return loss_value(Loss::Hinge, y, prox_hinge(w, y, o.v).prox);
    });
    CHECK(quad == doctest::Approx(mc).epsilon(1.5e-3));
}

TEST_CASE("logistic training loss decreases toward zero along a lambda sequence") {
    // Noiseless sign-teacher data is separable, so the max-margin limit
    // drives the training loss to zero as lambda -> 0+ (warm-started).
    const Index d = 8;
    SpectralModel model;
    model.eigenvalues = VectorXd::Ones(d);
    model.teacher_projection = VectorXd::Ones(d);
    model.rho = 1.0;
    model.gamma = 1.0;
    TaskSpec task;
    task.loss = Loss::Logistic;
    task.teacher_fn = TeacherFn::Sign;
    SolverOptions opts;

    double prev = std::numeric_limits<double>::infinity();
    Overlaps warm;
    ConjugateOverlaps warm_hats;
    bool have_warm = false;
    for (double lambda : {1.0, 0.3, 0.1, 0.03, 0.01}) {
        task.lambda = lambda;
        const StateEvolutionResult r = have_warm
                                           ? solve_from(model, task, 1.0, opts, warm, warm_hats)
                                           : solve(model, task, 1.0, opts);
        REQUIRE(r.converged);
        warm = r.overlaps;
        warm_hats = r.hats;
        have_warm = true;
        const double train = training_loss_quadrature(r.overlaps, model.rho, task, opts);
        CHECK(train > 0.0);
        CHECK(train < prev);
        prev = train;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("regularized training objective bookkeeping") {
    // For ridge the (lambda-weighted) norm bookkeeping adds
    // lambda * ||w||^2 / (alpha d) to the residual-squared training error.
    CHECK(training_objective_with_regularizer(0.5, Loss::Square, 0.1, 2.0, 4.0) ==
          doctest::Approx(0.5 + 0.1 * 2.0 / 4.0));
    CHECK(training_objective_with_regularizer(0.5, Loss::Logistic, 0.1, 2.0, 4.0) ==
          doctest::Approx(0.5 + 0.05 * 2.0 / 4.0));
}
