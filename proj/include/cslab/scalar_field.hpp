#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "cslab/errors.hpp"
#include "cslab/grid_hemisphere.hpp"

namespace cslab {

/// Nodal values of one scalar quantity on a hemisphere grid, stored row-major
/// (theta outer, phi inner). The pole row is kept constant (one averaged
/// degree of freedom materialized to n_phi copies).
struct ScalarField {
  std::uint64_t grid_uid = 0;
  int n_theta = 0;
  int n_phi = 0;
  Eigen::ArrayXd values;

  double& at(int j, int i) { return values[j * n_phi + i]; }
  double at(int j, int i) const { return values[j * n_phi + i]; }

  bool finite() const { return values.isFinite().all(); }
};

inline ScalarField make_field(const HemisphereGrid& grid, double fill = 0.0) {
  ScalarField f;
  f.grid_uid = grid.uid;
  f.n_theta = grid.n_theta();
  f.n_phi = grid.n_phi;
  f.values = Eigen::ArrayXd::Constant(static_cast<Eigen::Index>(f.n_theta) * f.n_phi, fill);
  return f;
}

template <typename Fn>
ScalarField make_field_from(const HemisphereGrid& grid, Fn&& fn) {
  ScalarField f = make_field(grid);
  for (int j = 0; j < f.n_theta; ++j) {
    for (int i = 0; i < f.n_phi; ++i) f.at(j, i) = fn(grid.theta[j], grid.phi(i));
  }
  // single pole value
  double pole = fn(grid.theta.back(), 0.0);
  for (int i = 0; i < f.n_phi; ++i) f.at(f.n_theta - 1, i) = pole;
  return f;
}

inline void require_same_grid(const ScalarField& f, const HemisphereGrid& grid) {
  if (f.grid_uid != grid.uid) throw ValidationError("field does not belong to this grid");
}

/// Weighted L2 inner product sum(node_measure * f * g).
///
/// Accumulation is permutation-invariant per theta level (products are sorted
/// before summing), so rearrangements that permute values within levels
/// conserve norms bitwise.
inline double weighted_l2_inner(const ScalarField& f, const ScalarField& g,
                                const HemisphereGrid& grid) {
  require_same_grid(f, grid);
  require_same_grid(g, grid);
  const int nt = grid.n_theta(), np = grid.n_phi;
  std::vector<double> buf(np);
  double total = 0.0;
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < np; ++i) buf[i] = f.at(j, i) * g.at(j, i);
    std::sort(buf.begin(), buf.end());
    double row = 0.0;
    for (double v : buf) row += v;
    total += grid.node_measure(j) * row;
  }
  return total;
}

inline double weighted_l2_norm(const ScalarField& f, const HemisphereGrid& grid) {
  return std::sqrt(weighted_l2_inner(f, f, grid));
}

/// Quadrature of y^a [ (d_theta f)^2 + (d_phi f)^2 / cos^2(theta) ] with
/// finite-difference tangential derivatives. The phi term is dropped on the
/// pole row (single degree of freedom there); the optional k factor scales the
/// phi derivative for the folded-gradient operator.
inline double weighted_dirichlet_energy(const ScalarField& f, const HemisphereGrid& grid,
                                        int k_fold = 1) {
  require_same_grid(f, grid);
  const int nt = grid.n_theta(), np = grid.n_phi;
  const double dphi = grid.dphi();
  double acc = 0.0;
  for (int j = 0; j + 1 < nt; ++j) {
    const double dth = grid.theta[j + 1] - grid.theta[j];
    const double c = grid.stiff_theta[j] / (dth * dth) * dphi;
    for (int i = 0; i < np; ++i) {
      const double d = f.at(j + 1, i) - f.at(j, i);
      acc += c * d * d;
    }
  }
  const double kk = static_cast<double>(k_fold) * k_fold;
  for (int j = 0; j + 1 < nt; ++j) {
    const double c = kk * grid.stiff_phi[j] / dphi;
    for (int i = 0; i < np; ++i) {
      const double d = f.at(j, (i + 1) % np) - f.at(j, i);
      acc += c * d * d;
    }
  }
  return acc;
}

/// f composed with the reflection across plane m (exact node permutation).
inline ScalarField reflect_field(const ScalarField& f, const HemisphereGrid& grid, int m) {
  require_same_grid(f, grid);
  ScalarField out = f;
  for (int j = 0; j < f.n_theta; ++j) {
    for (int i = 0; i < f.n_phi; ++i) out.at(j, i) = f.at(j, grid.reflect_index(i, m));
  }
  return out;
}

/// f composed with the rotation by 2*pi/k (exact node permutation).
inline ScalarField rotate_field(const ScalarField& f, const HemisphereGrid& grid, int k) {
  require_same_grid(f, grid);
  ScalarField out = f;
  for (int j = 0; j < f.n_theta; ++j) {
    for (int i = 0; i < f.n_phi; ++i) out.at(j, i) = f.at(j, grid.rotate_index(i, k));
  }
  return out;
}

struct FieldPair {
  ScalarField u;
  ScalarField v;
};

}  // namespace cslab
