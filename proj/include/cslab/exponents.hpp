#pragma once

#include <cmath>

#include "cslab/errors.hpp"
#include "cslab/params.hpp"

namespace cslab {

/// Characteristic exponent d(t) = sqrt(((N-2s)/2)^2 + t) - (N-2s)/2: the
/// homogeneity degree whose d-homogeneous extension of a t-eigenfunction is
/// harmonic for the weighted operator. Strictly increasing, d(0) = 0.
inline double characteristic_exponent(double t, const FractionalParams& p) {
  if (t < 0.0) throw ValidationError("characteristic_exponent: t must be >= 0");
  const double half = 0.5 * (p.dim_n - 2.0 * p.s);
  return std::sqrt(half * half + t) - half;
}

/// Inverse map lambda = d (d + N - 1 + a) = d (d + N - 2s).
inline double exponent_to_eigenvalue(double d, const FractionalParams& p) {
  if (d < 0.0) throw ValidationError("exponent_to_eigenvalue: d must be >= 0");
  return d * (d + p.dim_n - 2.0 * p.s);
}

/// lambda of the empty boundary region, attained by y^{2s}: d = 2s.
inline double lambda_empty(const FractionalParams& p) {
  return exponent_to_eigenvalue(2.0 * p.s, p);
}

}  // namespace cslab
