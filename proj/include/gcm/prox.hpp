#pragma once

#include "gcm/types.hpp"

namespace gcm {

// Scalar proximal operator of V*loss(y, .) evaluated at omega_arg, together
// with the quantities the saddle-point equations consume:
//
//   prox      = argmin_z [ (z - omega)^2 / (2V) + loss(y, z) ]
//   envelope  = the attained minimum (Moreau envelope of V*loss at omega)
//   f_g       = (prox - omega) / V   (the negative omega-derivative of the
//                                     envelope, by the envelope theorem)
//   f_g_prime = d f_g / d omega
struct ProxResult {
    double prox = 0.0;
    double envelope = 0.0;
    double f_g = 0.0;
    double f_g_prime = 0.0;
};

// loss(y, z) for the three supported losses: square 0.5*(y-z)^2,
// logistic log(1+exp(-y z)), hinge max(0, 1 - y z).
double loss_value(Loss loss, double y, double z);

// Closed form: prox = (omega + V y) / (1 + V).
ProxResult prox_square(double omega_arg, double y, double v);

// Solves f = y / (1 + exp(y (V f + omega))) by safeguarded Newton on the
// bracket f in [min(0,y), max(0,y)]; stationarity residual < 1e-13.
ProxResult prox_logistic(double omega_arg, double y, double v);

// Three branches split at omega*y = 1 - V and omega*y = 1. Ties resolve to
// the zero branch at omega*y == 1 and to the middle branch at
// omega*y == 1 - V.
ProxResult prox_hinge(double omega_arg, double y, double v);

ProxResult prox_loss(Loss loss, double omega_arg, double y, double v);

}  // namespace gcm
