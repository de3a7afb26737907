#pragma once

#include <vector>

#include "cslab/eigensolve.hpp"

namespace cslab {

/// A beta-regularized competing pair on the hemisphere: both components are
/// weighted-L2 normalized, coupled through the boundary reaction
/// beta u^2 v^2 on the equator circle, and tied by the exact grid symmetry
/// v = u o sigma_i.
struct SphereBetaPair {
  ScalarField u;
  ScalarField v;
  double beta = 0.0;
  double lambda_beta = 0.0;
  double interaction = 0.0;  // int_{S^1} beta u^2 v^2
  bool converged = false;
  int iterations = 0;
  std::vector<double> j_trace;  // J_beta after each outer iteration
};

struct SphereBetaOptions {
  int max_outer = 500;
  double tol_rel = 1e-10;
};

/// Minimizes J_beta(u,v) = 1/2 int y^a (|grad u|^2 + |grad v|^2)
///                       + 1/2 int_{S^1} beta u^2 v^2
/// over the k-equivariant symmetric class (v = u o sigma throughout). Each
/// iteration solves the linear eigenproblem with frozen boundary reaction
/// beta v^2 and moves toward its ground state with a backtracking step, so
/// J_beta is nonincreasing across iterations. The undamped update (step 1)
/// two-cycles at strong coupling, which is why the line search is there.
inline SphereBetaPair sphere_beta_pair(const HemisphereGrid& grid, int k, double beta,
                                       SphereBetaOptions opts = {}) {
  if (beta <= 0.0) throw ValidationError("sphere_beta_pair: beta must be > 0");
  if (k < 1 || (grid.n_phi / 2) % k != 0) {
    throw ValidationError("sphere_beta_pair: k must divide n_phi/2");
  }
  const int np_r = grid.n_phi / k;
  const double dphi = grid.dphi();

  std::vector<bool> no_dirichlet(np_r, false);
  auto sys = detail::assemble_hemisphere(grid, no_dirichlet, k);

  // equator dofs of the reduced domain and the pairing reflection on it
  // (half-cell shifted, so it has no fixed equator nodes)
  std::vector<int> equator_dof(np_r);
  for (int i = 0; i < np_r; ++i) equator_dof[i] = sys.dof[sys.node_id(0, i)];
  auto reflected = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size());
    for (int j = 0; j + 1 < sys.n_theta; ++j) {
      for (int i = 0; i < np_r; ++i) {
        out[sys.dof[sys.node_id(j, i)]] = x[sys.dof[sys.node_id(j, (np_r - 1 - i + np_r) % np_r)]];
      }
    }
    out[sys.dof[sys.pole_node()]] = x[sys.dof[sys.pole_node()]];
    return out;
  };

  // Seed with the segregated eigen-pair (u_k, u_k o sigma). A phi-symmetric
  // start (such as constants) would stay phi-symmetric under block descent and
  // converge to the axisymmetric critical pair instead of the segregating
  // minimizer.
  EigenResult seed = first_eigenvalue_symmetric(grid, k);
  Eigen::VectorXd xu(sys.n_free);
  for (int j = 0; j + 1 < sys.n_theta; ++j) {
    for (int i = 0; i < np_r; ++i) xu[sys.dof[sys.node_id(j, i)]] = seed.eigenfunction.at(j, i);
  }
  xu[sys.dof[sys.pole_node()]] = seed.eigenfunction.at(sys.n_theta - 1, 0);
  xu /= std::sqrt(static_cast<double>(k) * xu.dot(sys.Mdiag.cwiseProduct(xu)));
  Eigen::VectorXd xv = reflected(xu);

  auto interaction_of = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    double inter = 0.0;
    for (int i = 0; i < np_r; ++i) {
      const double uu = u[equator_dof[i]], vv = v[equator_dof[i]];
      inter += uu * uu * vv * vv;
    }
    return inter * k * beta * dphi;
  };
  auto j_symmetric = [&](const Eigen::VectorXd& u) {
    return k * u.dot(sys.K * u) + 0.5 * interaction_of(u, reflected(u));
  };
  auto normalized = [&](Eigen::VectorXd x) {
    x = x.cwiseMax(0.0);
    return (x / std::sqrt(static_cast<double>(k) * x.dot(sys.Mdiag.cwiseProduct(x)))).eval();
  };

  SphereBetaPair result;
  result.beta = beta;
  double j_prev = j_symmetric(xu);
  result.j_trace.push_back(j_prev);
  int it = 0;
  for (; it < opts.max_outer; ++it) {
    detail::SpMat A = sys.K;
    for (int i = 0; i < np_r; ++i) {
      const double vv = xv[equator_dof[i]];
      A.coeffRef(equator_dof[i], equator_dof[i]) += beta * vv * vv * dphi;
    }
    auto pair = detail::smallest_eigenpair(A, sys.Mdiag, 300, 1e-12, &xu);
    if (pair.x.dot(sys.Mdiag.cwiseProduct(Eigen::VectorXd::Ones(pair.x.size()))) < 0) {
      pair.x = -pair.x;
    }
    const Eigen::VectorXd target = normalized(pair.x);

    double tau = 1.0;
    Eigen::VectorXd cand = target;
    double j_now = j_symmetric(cand);
    while (j_now > j_prev + 1e-14 * std::abs(j_prev) && tau > 1e-4) {
      tau *= 0.5;
      cand = normalized((1.0 - tau) * xu + tau * target);
      j_now = j_symmetric(cand);
    }
    if (j_now > j_prev + 1e-14 * std::abs(j_prev)) {
      result.converged = true;  // no descent direction left
      break;
    }
    xu = cand;
    xv = reflected(xu);
    result.j_trace.push_back(j_now);
    if (std::abs(j_prev - j_now) < opts.tol_rel * std::max(j_now, 1e-30)) {
      result.converged = true;
      ++it;
      break;
    }
    j_prev = j_now;
  }
  result.iterations = it;

  result.lambda_beta = k * xu.dot(sys.K * xu) + interaction_of(xu, xv);
  result.interaction = interaction_of(xu, xv);
  result.u = detail::materialize(sys, grid, xu);
  result.v = detail::materialize(sys, grid, xv);
  return result;
}

}  // namespace cslab
