#pragma once

#include <cmath>

#include "cslab/errors.hpp"

namespace cslab {

/// Order s of the fractional operator together with the ambient dimension N.
/// The extension weight exponent a = 1 - 2s is always recomputed from s so the
/// two can never drift apart.
struct FractionalParams {
  double s = 0.5;
  int dim_n = 2;

  double a() const { return 1.0 - 2.0 * s; }

  static FractionalParams make(double s, int dim_n = 2) {
    if (!(s > 0.0 && s < 1.0)) {
      throw ValidationError("FractionalParams: s must lie in (0,1), got " + std::to_string(s));
    }
    if (dim_n < 2) {
      throw ValidationError("FractionalParams: dimension N must be >= 2, got " +
                            std::to_string(dim_n));
    }
    return FractionalParams{s, dim_n};
  }
};

}  // namespace cslab
