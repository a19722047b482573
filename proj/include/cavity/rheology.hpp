#pragma once

#include <cmath>
#include <limits>

#include "cavity/errors.hpp"

namespace cavity {

/// Power-law rheology for ice,
///
///   eta(s) = 1/2 A^(-1/n) (s^2/2 + delta_reg)^((1-n)/(2n)),
///
/// where s = |eps(u)| is the Frobenius norm of the strain rate. The
/// regularization delta_reg keeps the viscosity finite at zero strain rate
/// when n > 1. All quantities are nondimensional.
struct GlenRheology {
  double A = 0.5;           ///< rate factor, > 0
  double n = 1.0;           ///< flow exponent, >= 1
  double delta_reg = 1e-10; ///< strain-invariant regularization, >= 0

  bool newtonian() const { return n == 1.0; }
};

/// Effective viscosity at strain-rate norm s >= 0.
template <typename Scalar>
Scalar viscosity(const GlenRheology& rheo, Scalar s) {
  const Scalar half_s2 = Scalar(0.5) * s * s;
  if (!std::isfinite(static_cast<double>(half_s2)))
    throw NumericError("viscosity: strain-rate invariant overflow");
  const double expo = (1.0 - rheo.n) / (2.0 * rheo.n);
  const Scalar prefactor = Scalar(0.5) * std::pow(rheo.A, -1.0 / rheo.n);
  if (rheo.n == 1.0) return prefactor;
  return prefactor * std::pow(half_s2 + Scalar(rheo.delta_reg), Scalar(expo));
}

/// Derivative of the viscosity with respect to the invariant I = s^2/2.
/// Zero for a Newtonian fluid; needed for the consistent Newton tangent of
/// the viscous operator.
template <typename Scalar>
Scalar viscosity_derivative(const GlenRheology& rheo, Scalar s) {
  if (rheo.n == 1.0) return Scalar(0);
  const double expo = (1.0 - rheo.n) / (2.0 * rheo.n);
  const Scalar prefactor = Scalar(0.5) * std::pow(rheo.A, -1.0 / rheo.n);
  const Scalar base = Scalar(0.5) * s * s + Scalar(rheo.delta_reg);
  return prefactor * Scalar(expo) * std::pow(base, Scalar(expo - 1.0));
}

}  // namespace cavity
