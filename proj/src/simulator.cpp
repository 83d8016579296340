#include "gcm/simulator.hpp"

#include "gcm/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gcm {

namespace {

double apply_teacher(TeacherFn f, double nu) {
    if (f == TeacherFn::Linear) return nu;
    return nu >= 0.0 ? 1.0 : -1.0;
}

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

int thread_count() {
    if (const char* env = std::getenv("GCM_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

Estimate summarize(const std::vector<double>& xs) {
    Estimate e;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) e.mean += x;
    e.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return e;
}

struct TrialResult {
    double e_gen, e_train, q_emp, m_emp, norm_sq;
};

double train_error(const MatrixXd& design, const VectorXd& labels, const VectorXd& w,
                   Loss loss) {
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(design.cols()));
    const VectorXd z = inv_sqrt_d * (design * w);
    double acc = 0.0;
    for (Index i = 0; i < z.size(); ++i) {
        if (loss == Loss::Square) {
            const double r = labels(i) - z(i);
            acc += r * r;
        } else {
            acc += softplus(-labels(i) * z(i));
        }
    }
    return acc / static_cast<double>(z.size());
}

double analytic_e_gen(const TaskSpec& task, double rho, double q, double m) {
    Overlaps o;
    o.q = q;
    o.m = m;
    if (task.metric == Metric::ZeroOne) return classification_error(o, rho);
    if (task.teacher_fn == TeacherFn::Linear) return rho + q - 2.0 * m;
    return sign_teacher_mse_errors(o, rho).e_gen;
}

}  // namespace

void SimulationConfig::validate() const {
    if (d < 2) throw std::invalid_argument("SimulationConfig: d must be >= 2");
    if (n < 1) throw std::invalid_argument("SimulationConfig: n must be >= 1");
    if (trials < 1) throw std::invalid_argument("SimulationConfig: trials must be >= 1");
    task.validate();
}

Instance sample_instance(const SpectralModel& model, Index n, TeacherFn teacher_fn,
                         GaussianSampler& rng) {
    model.validate();
    if (n < 1) throw std::invalid_argument("sample_instance: n must be >= 1");
    const Index d = model.d();
    const double p = static_cast<double>(model.p());

    // Conditional variance of nu given v (the Schur scalar).
    double s2 = 0.0;
    for (Index i = 0; i < d; ++i) {
        const double w = model.eigenvalues(i);
        const double t = model.teacher_projection(i);
        if (w == 0.0) {
            if (t != 0.0)
                throw NegativeConditionalVariance(
                    "sample_instance: teacher correlated with a null direction");
            continue;
        }
        s2 += t * t / w;
    }
    double cond_var = model.rho - s2 / p;
    if (cond_var < -1e-10)
        throw NegativeConditionalVariance("sample_instance: rho - (1/p) t^T diag(w)^-1 t < 0");
    cond_var = std::max(cond_var, 0.0);
    const double cond_sd = std::sqrt(cond_var);

    Instance inst;
    inst.design.resize(n, d);
    inst.teacher_field.resize(n);
    inst.labels.resize(n);
    for (Index mu = 0; mu < n; ++mu) {
        double mean = 0.0;
        for (Index i = 0; i < d; ++i) {
            const double g = rng();
            const double w = model.eigenvalues(i);
            inst.design(mu, i) = std::sqrt(w) * g;
            if (w > 0.0) mean += model.teacher_projection(i) * g / std::sqrt(w);
        }
        mean /= std::sqrt(p);
        const double nu = mean + cond_sd * rng();
        inst.teacher_field(mu) = nu;
        inst.labels(mu) = apply_teacher(teacher_fn, nu);
    }
    return inst;
}

Instance sample_instance(const CovarianceTriple& triple, Index n, TeacherFn teacher_fn,
                         GaussianSampler& rng) {
    triple.validate();
    if (n < 1) throw std::invalid_argument("sample_instance: n must be >= 1");
    const Index d = triple.d();
    const double p = static_cast<double>(triple.p());

    Eigen::LLT<MatrixXd> llt(triple.omega);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("sample_instance: omega has no Cholesky factor");
    const MatrixXd chol = llt.matrixL();

    const VectorXd proj = triple.phi.transpose() * triple.theta0;  // Phi^T theta0
    const VectorXd omega_inv_proj = llt.solve(proj);
    const double rho = triple.theta0.dot(triple.psi * triple.theta0) / p;
    double cond_var = rho - proj.dot(omega_inv_proj) / p;
    if (cond_var < -1e-10)
        throw NegativeConditionalVariance("sample_instance: negative conditional variance");
    cond_var = std::max(cond_var, 0.0);
    const double cond_sd = std::sqrt(cond_var);

    Instance inst;
    inst.design.resize(n, d);
    inst.teacher_field.resize(n);
    inst.labels.resize(n);
    VectorXd g(d);
    for (Index mu = 0; mu < n; ++mu) {
        for (Index i = 0; i < d; ++i) g(i) = rng();
        const VectorXd v = chol * g;
        inst.design.row(mu) = v.transpose();
        const double nu = omega_inv_proj.dot(v) / std::sqrt(p) + cond_sd * rng();
        inst.teacher_field(mu) = nu;
        inst.labels(mu) = apply_teacher(teacher_fn, nu);
    }
    return inst;
}

VectorXd ridge_fit(const MatrixXd& design, const VectorXd& labels, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("ridge_fit: lambda must be > 0");
    if (design.rows() != labels.size())
        throw DimensionMismatch("ridge_fit: one label per design row required");
    const Index n = design.rows();
    const Index d = design.cols();
    const MatrixXd x = design / std::sqrt(static_cast<double>(d));
    if (n >= d) {
        MatrixXd a = x.transpose() * x;
        a.diagonal().array() += lambda;
        return a.ldlt().solve(x.transpose() * labels);
    }
    MatrixXd a = x * x.transpose();
    a.diagonal().array() += lambda;
    return x.transpose() * a.ldlt().solve(labels);
}

VectorXd logistic_fit(const MatrixXd& design, const VectorXd& labels, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("logistic_fit: lambda must be > 0");
    if (design.rows() != labels.size())
        throw DimensionMismatch("logistic_fit: one label per design row required");
    for (Index i = 0; i < labels.size(); ++i)
        if (labels(i) != 1.0 && labels(i) != -1.0)
            throw std::invalid_argument("logistic_fit: labels must be +-1");

    const Index n = design.rows();
    const Index d = design.cols();
    const MatrixXd x = design / std::sqrt(static_cast<double>(d));

    auto objective = [&](const VectorXd& w) {
        const VectorXd z = x * w;
        double acc = 0.5 * lambda * w.squaredNorm();
        for (Index i = 0; i < n; ++i) acc += softplus(-labels(i) * z(i));
        return acc;
    };

    VectorXd w = VectorXd::Zero(d);
    for (int it = 0; it < 500; ++it) {
        const VectorXd z = x * w;
        VectorXd sig(n), dsig(n);
        for (Index i = 0; i < n; ++i) {
            const double t = labels(i) * z(i);
            const double s = t > 0.0 ? std::exp(-t) / (1.0 + std::exp(-t))
                                     : 1.0 / (1.0 + std::exp(t));
            sig(i) = s;
            dsig(i) = s * (1.0 - s);
        }
        const VectorXd grad = -x.transpose() * labels.cwiseProduct(sig) + lambda * w;
        if (grad.norm() < 1e-9) return w;

        MatrixXd h = x.transpose() * dsig.asDiagonal() * x;
        h.diagonal().array() += lambda;
        const VectorXd step = h.llt().solve(grad);

        // Step halving with a floating-point slack: near the optimum the
        // objective decrease drops below machine noise and full Newton steps
        // are safe under strong convexity.
        const double f0 = objective(w);
        const double slack = 1e-12 * (1.0 + std::abs(f0));
        double scale = 1.0;
        VectorXd wn = w - step;
        for (int half = 0; half < 60 && objective(wn) > f0 + slack; ++half) {
            scale *= 0.5;
            wn = w - scale * step;
        }
        w = wn;
    }
    throw SolverBudgetExceeded("logistic_fit: gradient tolerance not reached");
}

namespace {

template <typename SampleFn, typename OverlapFn>
SimulationReport run_impl(const SimulationConfig& config, double rho, SampleFn sample,
                          OverlapFn measure) {
    config.validate();
    const int trials = config.trials;
    std::vector<TrialResult> results(static_cast<std::size_t>(trials));

    auto run_trial = [&](int trial) {
        GaussianSampler rng(derive_stream(config.seed, static_cast<std::uint64_t>(trial)));
        const Instance inst = sample(rng);
        VectorXd w;
        switch (config.task.loss) {
            case Loss::Square:
                w = ridge_fit(inst.design, inst.labels, config.task.lambda);
                break;
            case Loss::Logistic:
                w = logistic_fit(inst.design, inst.labels, config.task.lambda);
                break;
            case Loss::Hinge:
                throw std::invalid_argument(
                    "simulator: finite-size hinge training is out of scope; use logistic with a "
                    "decreasing lambda sequence");
        }
        TrialResult r;
        measure(w, r.q_emp, r.m_emp);
        r.norm_sq = w.squaredNorm() / static_cast<double>(config.d);
        r.e_gen = analytic_e_gen(config.task, rho, r.q_emp, r.m_emp);
        r.e_train = train_error(inst.design, inst.labels, w, config.task.loss);
        results[static_cast<std::size_t>(trial)] = r;
    };

    const int threads = std::min(thread_count(), trials);
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int k = 0; k < threads; ++k)
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_trial(t);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<double> ge, te, qe, me, ns;
    for (const auto& r : results) {
        ge.push_back(r.e_gen);
        te.push_back(r.e_train);
        qe.push_back(r.q_emp);
        me.push_back(r.m_emp);
        ns.push_back(r.norm_sq);
    }
    SimulationReport rep;
    rep.e_gen = summarize(ge);
    rep.e_train = summarize(te);
    rep.q_emp = summarize(qe);
    rep.m_emp = summarize(me);
    rep.norm_sq = summarize(ns);
    rep.config = config;
    return rep;
}

}  // namespace

SimulationReport run(const SimulationConfig& config, const SpectralModel& model) {
    model.validate();
    if (model.d() != config.d)
        throw DimensionMismatch("run: config.d must match the model dimension");
    const double dd = static_cast<double>(config.d);
    const double denom_m = dd * std::sqrt(model.gamma);  // sqrt(d p) = d sqrt(gamma)
    return run_impl(
        config, model.rho,
        [&](GaussianSampler& rng) {
            return sample_instance(model, config.n, config.task.teacher_fn, rng);
        },
        [&](const VectorXd& w, double& q_emp, double& m_emp) {
            q_emp = model.eigenvalues.dot(w.cwiseProduct(w)) / dd;
            m_emp = model.teacher_projection.dot(w) / denom_m;
        });
}

SimulationReport run(const SimulationConfig& config, const CovarianceTriple& triple) {
    triple.validate();
    if (triple.d() != config.d)
        throw DimensionMismatch("run: config.d must match the triple dimension");
    const double dd = static_cast<double>(config.d);
    const double rho = triple.theta0.dot(triple.psi * triple.theta0) /
                       static_cast<double>(triple.p());
    const VectorXd proj = triple.phi.transpose() * triple.theta0;
    const double denom_m = std::sqrt(dd * static_cast<double>(triple.p()));
    return run_impl(
        config, rho,
        [&](GaussianSampler& rng) {
            return sample_instance(triple, config.n, config.task.teacher_fn, rng);
        },
        [&](const VectorXd& w, double& q_emp, double& m_emp) {
            q_emp = w.dot(triple.omega * w) / dd;
            m_emp = proj.dot(w) / denom_m;
        });
}

}  // namespace gcm
