#include "gcm/errors.hpp"

#include "gcm/prox.hpp"
#include "gcm/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace gcm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp_error(double e, const char* what) {
    if (e < -1e-10) throw NegativeError(std::string(what) + ": negative error signals inconsistent overlaps");
    return std::max(e, 0.0);
}

// Reported training loss at the prox point. The square loss reports the
// squared residual so that the ridge identity E_train = E_gen/(1+V)^2 holds
// with E_gen = rho + q - 2m.
double reported_loss(Loss loss, double y, double prox) {
    if (loss == Loss::Square) return (y - prox) * (y - prox);
    return loss_value(loss, y, prox);
}

}  // namespace

ErrorReport mse_errors(const Overlaps& overlaps, double rho) {
    ErrorReport rep;
    rep.metric = Metric::MSE;
    rep.e_gen = clamp_error(rho + overlaps.q - 2.0 * overlaps.m, "mse_errors");
    const double c = 1.0 + overlaps.v;
    rep.e_train = rep.e_gen / (c * c);
    return rep;
}

ErrorReport sign_teacher_mse_errors(const Overlaps& overlaps, double rho) {
    ErrorReport rep;
    rep.metric = Metric::MSE;
    const double k = std::sqrt(2.0 / (kPi * rho));
    rep.e_gen = clamp_error(1.0 + overlaps.q - 2.0 * overlaps.m * k, "sign_teacher_mse_errors");
    const double c = 1.0 + overlaps.v;
    rep.e_train = rep.e_gen / (c * c);
    return rep;
}

double classification_error(const Overlaps& overlaps, double rho) {
    if (!(overlaps.q > 0.0)) throw DegenerateOverlap("classification_error: q <= 0");
    // Clip against floating-point drift at perfect alignment |m| = sqrt(rho q).
    const double arg = std::clamp(overlaps.m / std::sqrt(rho * overlaps.q), -1.0, 1.0);
    return std::acos(arg) / kPi;
}

double training_loss_quadrature(const Overlaps& overlaps, double rho, const TaskSpec& task,
                                const SolverOptions& opts) {
    if (!(overlaps.q > 0.0) || overlaps.m * overlaps.m > rho * overlaps.q * (1.0 + 1e-12))
        throw DegenerateOverlap("training_loss_quadrature: need q > 0 and m^2 <= rho q");

    const double v = overlaps.v;
    if (task.teacher_fn == TeacherFn::Linear) {
        // y = sqrt(rho) s, omega = (m/sqrt(rho)) s + sqrt(q - m^2/rho) h.
        const double ms = overlaps.m / std::sqrt(rho);
        const double sd = std::sqrt(std::max(overlaps.q - ms * ms, 0.0));
        return gaussian_expectation(opts.quad_nodes, [&](double s) {
            const double y = std::sqrt(rho) * s;
            return gaussian_expectation(opts.quad_nodes, [&](double h) {
                const double w = ms * s + sd * h;
                return reported_loss(task.loss, y, prox_loss(task.loss, w, y, v).prox);
            });
        });
    }

    // Sign teacher: 1-D xi rule + exact two-term label sum with weights
    // Z0(y, (m/sqrt(q)) xi, rho - m^2/q).
    const double sq = std::sqrt(overlaps.q);
    const double mq = overlaps.m / sq;
    const double veff = std::max(rho - overlaps.m * overlaps.m / overlaps.q, 0.0);
    if (!(veff > 0.0))
        throw DegenerateOverlap("training_loss_quadrature: degenerate teacher measure");

    double acc = 0.0;
    for (double y : {1.0, -1.0}) {
        auto f = [&, y](double xi) {
            const double z0 = 0.5 * (1.0 + std::erf(y * mq * xi / std::sqrt(2.0 * veff)));
            const ProxResult pr = prox_loss(task.loss, sq * xi, y, v);
            return z0 * reported_loss(task.loss, y, pr.prox);
        };
        if (task.loss == Loss::Square) {
            acc += gaussian_expectation(opts.quad_nodes, f);
        } else {
            // Split where the prox bends (exact hinge kinks, steep logistic
            // curvature at large V).
            const std::vector<double> bps = {(1.0 - v) / (sq * y), 1.0 / (sq * y)};
            acc += gaussian_expectation_piecewise(opts.quad_nodes, bps, f);
        }
    }
    return acc;
}

double training_objective_with_regularizer(double e_train, Loss loss, double lambda,
                                           double norm_sq, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("training objective needs alpha > 0");
    const double reg = lambda * norm_sq / alpha;
    return e_train + (loss == Loss::Square ? reg : 0.5 * reg);
}

}  // namespace gcm
