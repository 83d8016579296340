#include "gcm/prox.hpp"

#include <algorithm>
#include <cmath>

namespace gcm {

namespace {

// 1 / (1 + exp(t)) without overflow.
double inv_one_plus_exp(double t) {
    if (t > 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

void require_positive_v(double v) {
    if (!(v > 0.0)) throw NonPositiveV("prox: V must be > 0");
}

void require_binary(double y) {
    if (y != 1.0 && y != -1.0)
        throw std::invalid_argument("prox: y must be -1 or +1 for this loss");
}

}  // namespace

double loss_value(Loss loss, double y, double z) {
    switch (loss) {
        case Loss::Square: return 0.5 * (y - z) * (y - z);
        case Loss::Logistic: return softplus(-y * z);
        case Loss::Hinge: return std::max(0.0, 1.0 - y * z);
    }
    return 0.0;
}

ProxResult prox_square(double omega_arg, double y, double v) {
    require_positive_v(v);
    ProxResult r;
    r.prox = (omega_arg + v * y) / (1.0 + v);
    r.f_g = (y - omega_arg) / (1.0 + v);
    r.f_g_prime = -1.0 / (1.0 + v);
    r.envelope = loss_value(Loss::Square, y, r.prox) + 0.5 * v * r.f_g * r.f_g;
    return r;
}

ProxResult prox_logistic(double omega_arg, double y, double v) {
    require_positive_v(v);
    require_binary(y);

    // Stationarity in terms of f = (z - omega)/V:
    //   g(f) = f - y / (1 + exp(y (V f + omega))) = 0,
    // strictly increasing in f, with the root inside [min(0,y), max(0,y)].
    // Safeguarded Newton: fall back to bisection whenever the Newton step
    // leaves the bracket or fails to shrink it fast enough (for large V the
    // raw iteration ping-pongs across the steep sigmoid).
    double lo = std::min(0.0, y);
    double hi = std::max(0.0, y);
    double f = 0.5 * (lo + hi);
    double step_prev = hi - lo;
    bool done = false;
    for (int it = 0; it < 200; ++it) {
        const double s = inv_one_plus_exp(y * (v * f + omega_arg));
        const double residual = f - y * s;
        if (std::abs(residual) < 1e-13) {
            done = true;
            break;
        }
        if (residual > 0.0)
            hi = f;
        else
            lo = f;
        if (hi - lo < 4e-16 * std::max(1.0, std::abs(f))) {
            done = true;  // bracket at machine resolution
            break;
        }
        const double ds = s * (1.0 - s);  // y^2 = 1
        const double slope = 1.0 + v * ds;
        const double fnext = f - residual / slope;
        if (fnext > lo && fnext < hi && 2.0 * std::abs(residual) < step_prev * slope) {
            step_prev = std::abs(residual) / slope;
            f = fnext;
        } else {
            step_prev = 0.5 * (hi - lo);
            f = lo + step_prev;
        }
    }
    if (!done) throw RootFindingFailed("prox_logistic: iteration budget exceeded");

    // Polish: with |g| already < 1e-13 and g' >= 1 these steps stay put for
    // interior roots and snap saturated roots onto the residual floor.
    for (int polish = 0; polish < 2; ++polish) {
        const double s = inv_one_plus_exp(y * (v * f + omega_arg));
        f -= (f - y * s) / (1.0 + v * s * (1.0 - s));
    }

    ProxResult r;
    r.f_g = f;
    r.prox = omega_arg + v * f;
    const double s = inv_one_plus_exp(y * r.prox);
    const double ds = s * (1.0 - s);
    r.f_g_prime = -ds / (1.0 + v * ds);  // implicit differentiation of g(f) = 0
    r.envelope = loss_value(Loss::Logistic, y, r.prox) + 0.5 * v * f * f;
    return r;
}

ProxResult prox_hinge(double omega_arg, double y, double v) {
    require_positive_v(v);
    require_binary(y);

    const double t = omega_arg * y;
    ProxResult r;
    if (t >= 1.0) {
        r.f_g = 0.0;
        r.f_g_prime = 0.0;
    } else if (t < 1.0 - v) {
        r.f_g = y;
        r.f_g_prime = 0.0;
    } else {
        r.f_g = (y - omega_arg) / v;  // prox pinned at the kink z = y
        r.f_g_prime = -1.0 / v;
    }
    r.prox = omega_arg + v * r.f_g;
    r.envelope = loss_value(Loss::Hinge, y, r.prox) + 0.5 * v * r.f_g * r.f_g;
    return r;
}

ProxResult prox_loss(Loss loss, double omega_arg, double y, double v) {
    switch (loss) {
        case Loss::Square: return prox_square(omega_arg, y, v);
        case Loss::Logistic: return prox_logistic(omega_arg, y, v);
        case Loss::Hinge: return prox_hinge(omega_arg, y, v);
    }
    throw std::invalid_argument("prox_loss: unknown loss");
}

}  // namespace gcm
