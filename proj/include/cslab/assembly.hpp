#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "cslab/grid_hemisphere.hpp"
#include "cslab/scalar_field.hpp"

namespace cslab::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Discrete pencil (K, M) of the weighted spherical operator on the free
/// degrees of freedom.
///
/// Supports three variants through the same assembly:
///  - plain problem: k_sym = k_fold = 1, Dirichlet outside omega;
///  - equivariant problem: k_sym = k reduces phi to the fundamental domain
///    [0, 2*pi/k) with periodic wrap (integrals cover the fundamental domain,
///    which leaves Rayleigh quotients unchanged);
///  - folded-gradient problem: k_fold multiplies the phi stiffness by k^2.
/// The pole is one degree of freedom coupled to every column of the last row.
struct HemisphereSystem {
  int n_theta = 0;
  int n_phi_r = 0;  // phi nodes in the (possibly reduced) domain
  int k_sym = 1;
  int k_fold = 1;
  std::vector<int> dof;  // node -> free dof id, -1 if Dirichlet; pole last
  int n_free = 0;
  SpMat K;
  Eigen::VectorXd Mdiag;

  int node_id(int j, int i) const { return j * n_phi_r + i; }
  int pole_node() const { return (n_theta - 1) * n_phi_r; }
};

/// dirichlet[i] refers to equator nodes of the (reduced) phi domain.
inline HemisphereSystem assemble_hemisphere(const HemisphereGrid& grid,
                                            const std::vector<bool>& dirichlet, int k_sym = 1,
                                            int k_fold = 1) {
  const int nt = grid.n_theta();
  const int np_r = grid.n_phi / k_sym;
  const double dphi = grid.dphi();

  HemisphereSystem sys;
  sys.n_theta = nt;
  sys.n_phi_r = np_r;
  sys.k_sym = k_sym;
  sys.k_fold = k_fold;
  sys.dof.assign(static_cast<size_t>(nt - 1) * np_r + 1, -1);

  int next = 0;
  for (int j = 0; j + 1 < nt; ++j) {
    for (int i = 0; i < np_r; ++i) {
      if (j == 0 && dirichlet[i]) continue;
      sys.dof[sys.node_id(j, i)] = next++;
    }
  }
  sys.dof[sys.pole_node()] = next++;
  sys.n_free = next;

  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(nt) * np_r * 8);
  auto add_edge = [&](int node_p, int node_q, double c) {
    const int p = sys.dof[node_p], q = sys.dof[node_q];
    if (p >= 0) trips.emplace_back(p, p, c);
    if (q >= 0) trips.emplace_back(q, q, c);
    if (p >= 0 && q >= 0) {
      trips.emplace_back(p, q, -c);
      trips.emplace_back(q, p, -c);
    }
  };

  for (int j = 0; j + 1 < nt; ++j) {
    const double dth = grid.theta[j + 1] - grid.theta[j];
    const double c = grid.stiff_theta[j] / (dth * dth) * dphi;
    const bool to_pole = (j + 2 == nt);
    for (int i = 0; i < np_r; ++i) {
      add_edge(sys.node_id(j, i), to_pole ? sys.pole_node() : sys.node_id(j + 1, i), c);
    }
  }
  const double kk = static_cast<double>(k_fold) * k_fold;
  for (int j = 0; j + 1 < nt; ++j) {
    const double c = kk * grid.stiff_phi[j] / dphi;
    for (int i = 0; i < np_r; ++i) {
      add_edge(sys.node_id(j, i), sys.node_id(j, (i + 1) % np_r), c);
    }
  }

  sys.K.resize(sys.n_free, sys.n_free);
  sys.K.setFromTriplets(trips.begin(), trips.end());

  sys.Mdiag = Eigen::VectorXd::Zero(sys.n_free);
  for (int j = 0; j + 1 < nt; ++j) {
    for (int i = 0; i < np_r; ++i) {
      const int p = sys.dof[sys.node_id(j, i)];
      if (p >= 0) sys.Mdiag[p] = grid.mass_cell[j] * dphi;
    }
  }
  sys.Mdiag[sys.dof[sys.pole_node()]] = grid.mass_pole * np_r * dphi;
  return sys;
}

/// Expand a coefficient vector into a full-grid field: Dirichlet nodes are 0,
/// the reduced domain is extended periodically, the pole row is constant.
inline ScalarField materialize(const HemisphereSystem& sys, const HemisphereGrid& grid,
                               const Eigen::VectorXd& x) {
  ScalarField f = make_field(grid);
  for (int j = 0; j + 1 < sys.n_theta; ++j) {
    for (int i = 0; i < grid.n_phi; ++i) {
      const int d = sys.dof[sys.node_id(j, i % sys.n_phi_r)];
      f.at(j, i) = d >= 0 ? x[d] : 0.0;
    }
  }
  const double pole = x[sys.dof[sys.pole_node()]];
  for (int i = 0; i < grid.n_phi; ++i) f.at(sys.n_theta - 1, i) = pole;
  return f;
}

}  // namespace cslab::detail
