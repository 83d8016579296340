#pragma once

#include "gcm/types.hpp"

namespace gcm {

// Reduces a covariance triple to the spectral data the fixed-point equations
// need: eigenvalues of Omega in descending order, the projection
// S Phi^T theta0 in the matching eigenbasis, rho = theta0^T Psi theta0 / p
// and gamma = p/d. Validates the triple first.
SpectralModel spectral_reduce(const CovarianceTriple& triple);

}  // namespace gcm
