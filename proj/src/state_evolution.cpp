#include "gcm/state_evolution.hpp"

#include "gcm/prox.hpp"
#include "gcm/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace gcm {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct SignTeacherMeasure {
    double w0;    // conditional mean of the teacher field given xi
    double veff;  // conditional variance rho - m^2/q

    // Z0(y, w0, veff): probability of label y given the student field.
    double z0(double y) const { return 0.5 * (1.0 + std::erf(y * w0 / std::sqrt(2.0 * veff))); }
    // d Z0 / d w0, analytic.
    double dz0(double y) const {
        return y * std::exp(-0.5 * w0 * w0 / veff) / std::sqrt(2.0 * kPi * veff);
    }
};

}  // namespace

Overlaps variance_channel(const ConjugateOverlaps& hats, const SpectralModel& model,
                          double lambda) {
    model.validate();
    const Index d = model.d();
    double sv = 0.0, sq = 0.0, sm = 0.0;
    for (Index i = 0; i < d; ++i) {
        const double w = model.eigenvalues(i);
        const double t2 = model.teacher_projection(i) * model.teacher_projection(i);
        if (w == 0.0 && t2 == 0.0) continue;  // null directions contribute nothing
        const double den = lambda + hats.v_hat * w;
        if (!(den > 0.0))
            throw SingularDenominator("variance_channel: lambda + V^ w_i <= 0");
        sv += w / den;
        sq += (hats.q_hat * w * w + hats.m_hat * hats.m_hat * t2 * w) / (den * den);
        sm += t2 / den;
    }
    Overlaps out;
    const double dd = static_cast<double>(d);
    out.v = sv / dd;
    out.q = sq / dd;
    out.m = hats.m_hat / std::sqrt(model.gamma) * sm / dd;
    return out;
}

ConjugateOverlaps hat_channel_ridge(const Overlaps& overlaps, double rho, double alpha,
                                    double gamma) {
    if (!(overlaps.v > -1.0)) throw std::invalid_argument("hat_channel_ridge: V must be > -1");
    if (alpha < 0.0) throw std::invalid_argument("hat_channel_ridge: alpha must be >= 0");
    ConjugateOverlaps hats;
    const double c = 1.0 + overlaps.v;
    hats.v_hat = alpha / c;
    hats.q_hat = alpha * (rho + overlaps.q - 2.0 * overlaps.m) / (c * c);
    hats.m_hat = alpha / (std::sqrt(gamma) * c);
    return hats;
}

ConjugateOverlaps hat_channel_square_classification(const Overlaps& overlaps, double rho,
                                                    double alpha, double gamma) {
    (void)gamma;
    if (!(rho > 0.0)) throw std::invalid_argument("hat_channel_square_classification: rho <= 0");
    ConjugateOverlaps hats;
    const double c = 1.0 + overlaps.v;
    const double k = std::sqrt(2.0 / (kPi * rho));
    hats.v_hat = alpha / c;
    hats.q_hat = alpha * (1.0 + overlaps.q - 2.0 * overlaps.m * k) / (c * c);
    hats.m_hat = k * alpha / c;
    return hats;
}

ConjugateOverlaps hat_channel_quadrature(const Overlaps& overlaps, double rho, double alpha,
                                         double gamma, const TaskSpec& task,
                                         const SolverOptions& opts) {
    if (task.teacher_fn != TeacherFn::Sign || task.loss == Loss::Square)
        throw std::invalid_argument("hat_channel_quadrature: sign teacher with logistic or hinge loss only");
    if (!(overlaps.q > 0.0) || !(rho * overlaps.q - overlaps.m * overlaps.m > 0.0))
        throw DegenerateOverlap("hat_channel_quadrature: need q > 0 and m^2 < rho q");

    const double sq = std::sqrt(overlaps.q);
    const double mq = overlaps.m / sq;
    const double veff = rho - overlaps.m * overlaps.m / overlaps.q;
    const double v = overlaps.v;

    double acc_v = 0.0, acc_q = 0.0, acc_m = 0.0;
    for (double y : {1.0, -1.0}) {
        auto integrand = [&](int which) {
            return [&, which, y](double xi) {
                const SignTeacherMeasure teacher{mq * xi, veff};
                const ProxResult pr = prox_loss(task.loss, sq * xi, y, v);
                switch (which) {
                    case 0: return teacher.z0(y) * pr.f_g_prime;
                    case 1: return teacher.z0(y) * pr.f_g * pr.f_g;
                    default: return teacher.dz0(y) * pr.f_g;
                }
            };
        };
        // f_g bends at omega*y near 1-V and 1 (exact kinks for the hinge,
        // high localized curvature for the logistic at large V); splitting
        // there keeps the rule accurate with the same node budget.
        const std::vector<double> bps = {(1.0 - v) / (sq * y), 1.0 / (sq * y)};
        acc_v += gaussian_expectation_piecewise(opts.quad_nodes, bps, integrand(0));
        acc_q += gaussian_expectation_piecewise(opts.quad_nodes, bps, integrand(1));
        acc_m += gaussian_expectation_piecewise(opts.quad_nodes, bps, integrand(2));
    }

    ConjugateOverlaps hats;
    hats.v_hat = -alpha * acc_v;
    hats.q_hat = alpha * acc_q;
    hats.m_hat = alpha / std::sqrt(gamma) * acc_m;
    return hats;
}

ConjugateOverlaps hat_channel(const Overlaps& overlaps, const SpectralModel& model,
                              const TaskSpec& task, double alpha, const SolverOptions& opts) {
    if (task.teacher_fn == TeacherFn::Linear) {
        if (task.loss != Loss::Square)
            throw std::invalid_argument("hat_channel: linear teacher supported with square loss only");
        return hat_channel_ridge(overlaps, model.rho, alpha, model.gamma);
    }
    if (task.loss == Loss::Square)
        return hat_channel_square_classification(overlaps, model.rho, alpha, model.gamma);
    return hat_channel_quadrature(overlaps, model.rho, alpha, model.gamma, task, opts);
}

StateEvolutionResult solve(const SpectralModel& model, const TaskSpec& task, double alpha,
                           const SolverOptions& opts) {
    // Small positive m breaks the spurious m = 0 symmetry for sign teachers.
    Overlaps init;
    init.v = 1.0;
    init.q = model.rho / 2.0;
    init.m = 0.01 * std::sqrt(model.rho * init.q);
    return solve_from(model, task, alpha, opts, init, ConjugateOverlaps{});
}

StateEvolutionResult solve_from(const SpectralModel& model, const TaskSpec& task, double alpha,
                                const SolverOptions& opts, const Overlaps& init,
                                const ConjugateOverlaps& init_hats) {
    model.validate();
    task.validate();
    opts.validate();
    if (alpha < 0.0) throw std::invalid_argument("solve: alpha must be >= 0");

    Overlaps x = init;
    ConjugateOverlaps h = init_hats;
    const double eta = opts.damping;
    // Only the sign-teacher quadrature channel needs rho q - m^2 > 0 (the
    // effective variance of the teacher measure); ridge fixed points may sit
    // arbitrarily close to m^2 = rho q and must not be clipped.
    const bool clip_alignment = task.teacher_fn == TeacherFn::Sign && task.loss != Loss::Square;
    StateEvolutionResult res;

    for (int it = 1; it <= opts.max_iter; ++it) {
        const ConjugateOverlaps hu =
            alpha == 0.0 ? ConjugateOverlaps{} : hat_channel(x, model, task, alpha, opts);
        ConjugateOverlaps hn;
        hn.v_hat = eta * h.v_hat + (1.0 - eta) * hu.v_hat;
        hn.q_hat = eta * h.q_hat + (1.0 - eta) * hu.q_hat;
        hn.m_hat = eta * h.m_hat + (1.0 - eta) * hu.m_hat;

        const Overlaps xu = variance_channel(hn, model, task.lambda);
        Overlaps xn;
        xn.v = eta * x.v + (1.0 - eta) * xu.v;
        xn.q = eta * x.q + (1.0 - eta) * xu.q;
        xn.m = eta * x.m + (1.0 - eta) * xu.m;
        if (clip_alignment) {
            // Keep the teacher measure's effective variance positive;
            // inactive at convergence (sign teachers cap m well below
            // sqrt(rho q)).
            const double bound = 0.999 * std::sqrt(model.rho * std::max(xn.q, 0.0));
            if (std::abs(xn.m) > bound) xn.m = std::copysign(bound, xn.m);
        }

        const double residual = std::max({std::abs(xn.v - x.v), std::abs(xn.q - x.q),
                                          std::abs(xn.m - x.m), std::abs(hn.v_hat - h.v_hat),
                                          std::abs(hn.q_hat - h.q_hat),
                                          std::abs(hn.m_hat - h.m_hat)});
        x = xn;
        h = hn;
        res.iterations = it;
        res.residual = residual;
        if (residual < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.overlaps = x;
    res.hats = h;
    return res;
}

double estimator_norm_sq(const ConjugateOverlaps& hats, const SpectralModel& model,
                         double lambda) {
    double acc = 0.0;
    for (Index i = 0; i < model.d(); ++i) {
        const double w = model.eigenvalues(i);
        const double t2 = model.teacher_projection(i) * model.teacher_projection(i);
        if (w == 0.0 && t2 == 0.0) continue;
        const double den = lambda + hats.v_hat * w;
        if (!(den > 0.0)) throw SingularDenominator("estimator_norm_sq: lambda + V^ w_i <= 0");
        acc += (hats.m_hat * hats.m_hat * t2 + hats.q_hat * w) / (den * den);
    }
    return acc / static_cast<double>(model.d());
}

}  // namespace gcm
