#pragma once

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cslab/assembly.hpp"
#include "cslab/exponents.hpp"

namespace cslab {

struct EigenResult {
  double lambda = 0.0;
  ScalarField eigenfunction;  // nonnegative, weighted-L2 normalized
  double exponent_d = 0.0;
  ArcSet omega;
  double residual = 0.0;
  int iterations = 0;
};

struct SweepRow {
  int k = 0;
  double lambda = 0.0;
  double d = 0.0;
  double residual = 0.0;
};

namespace detail {

inline std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

struct PencilEigenpair {
  double lambda = 0.0;
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest eigenpair of the SPD pencil (K, diag(M)) by shifted inverse power
/// iteration with a sparse direct factorization. Deterministic all-ones start;
/// the shift starts below the spectrum and is refreshed from the Rayleigh
/// quotient when convergence stalls.
inline PencilEigenpair smallest_eigenpair(const SpMat& K, const Eigen::VectorXd& Mdiag,
                                          int max_iter = 300, double tol = 1e-12,
                                          const Eigen::VectorXd* x0 = nullptr) {
  const Eigen::Index n = K.rows();
  Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Ones(n);
  x /= std::sqrt(x.dot(Mdiag.cwiseProduct(x)));
  double rho = x.dot(K * x);

  // The pencils of this problem family have O(1) smallest eigenvalues
  // (0 <= lambda_1 <= lambda_empty), so a unit negative shift keeps K - sigma M
  // positive definite with a usable contraction ratio; Rayleigh refreshes take
  // over when levels cluster.
  double sigma = -1.0;
  Eigen::SimplicialLDLT<SpMat> solver;
  auto refactor = [&](double shift) {
    SpMat A = K;
    for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) -= shift * Mdiag[i];
    solver.compute(A);
    if (solver.info() != Eigen::Success) {
      throw SolverError("eigensolver: factorization of shifted pencil failed");
    }
  };
  refactor(sigma);

  const double floor_tol = 1e-13 * K.coeffs().cwiseAbs().maxCoeff();
  const double eff_tol = std::max(tol, floor_tol);
  double resid = std::numeric_limits<double>::max();
  double prev_resid = resid;
  int stall = 0;
  int refreshes = 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::VectorXd y = solver.solve(Mdiag.cwiseProduct(x));
    y /= std::sqrt(y.dot(Mdiag.cwiseProduct(y)));
    x = y;
    rho = x.dot(K * x) / x.dot(Mdiag.cwiseProduct(x));
    Eigen::VectorXd r = K * x - rho * Mdiag.cwiseProduct(x);
    resid = r.norm() / Mdiag.cwiseProduct(x).norm();
    if (resid <= eff_tol) break;
    if (resid > 0.5 * prev_resid && refreshes < 8) {
      if (++stall >= 3) {
        sigma = rho - std::max(10.0 * resid, 1e-8 * std::max(1.0, std::abs(rho)));
        refactor(sigma);
        ++refreshes;
        stall = 0;
      }
    } else {
      stall = 0;
    }
    prev_resid = resid;
  }
  if (resid > 1e-8) {
    throw SolverError("eigensolver: residual " + fmt_sci(resid) + " above 1e-8 after " +
                      std::to_string(it) + " iterations (rho = " + std::to_string(rho) + ")");
  }
  return {rho, std::move(x), resid, it};
}

inline EigenResult finalize_eigenresult(const detail::HemisphereSystem& sys,
                                        const HemisphereGrid& grid, detail::PencilEigenpair pair,
                                        ArcSet omega) {
  // Sign-fix: the first eigenfunction of the irreducible pencil is signed;
  // flip so the weighted mean is positive, then verify nonnegativity.
  const double mean = pair.x.dot(sys.Mdiag.cwiseProduct(Eigen::VectorXd::Ones(pair.x.size())));
  if (mean < 0) pair.x = -pair.x;
  const double maxval = pair.x.cwiseAbs().maxCoeff();
  if (pair.x.minCoeff() < -1e-8 * maxval) {
    throw SolverError("eigensolver: first eigenfunction is not signed (residual " +
                      std::to_string(pair.residual) + ")");
  }
  pair.x = pair.x.cwiseMax(0.0);

  EigenResult res;
  res.eigenfunction = detail::materialize(sys, grid, pair.x);
  const double nrm = weighted_l2_inner(res.eigenfunction, res.eigenfunction, grid);
  res.eigenfunction.values /= std::sqrt(nrm);
  res.lambda = pair.lambda;
  res.exponent_d = characteristic_exponent(pair.lambda, grid.params);
  res.omega = std::move(omega);
  res.residual = pair.residual;
  res.iterations = pair.iterations;

  if (res.lambda < -1e-10 || res.lambda > lambda_empty(grid.params) * 1.10 + 1e-10) {
    throw PropertyViolation("first eigenvalue " + std::to_string(res.lambda) +
                            " escapes [0, lambda_empty] beyond discretization slack");
  }
  return res;
}

}  // namespace detail

/// First eigenvalue of the weighted spherical operator with Dirichlet
/// condition on the equator outside omega and the natural (weighted Neumann)
/// condition on omega.
inline EigenResult first_eigenvalue(const HemisphereGrid& grid, const ArcSet& omega) {
  require_aligned(grid, omega);
  std::vector<bool> in_omega = omega_node_mask(grid, omega);
  std::vector<bool> dirichlet(grid.n_phi);
  for (int i = 0; i < grid.n_phi; ++i) dirichlet[i] = !in_omega[i];
  auto sys = detail::assemble_hemisphere(grid, dirichlet);
  auto pair = detail::smallest_eigenpair(sys.K, sys.Mdiag);
  return detail::finalize_eigenresult(sys, grid, std::move(pair), omega);
}

/// lambda_1^s(k): minimization over the rotation-equivariant class with
/// Dirichlet data outside the canonical k-symmetric region. Solved on the
/// fundamental domain [0, 2*pi/k) and extended periodically, so the
/// equivariance holds exactly on the grid.
inline EigenResult first_eigenvalue_symmetric(const HemisphereGrid& grid, int k) {
  if (k < 1) throw ValidationError("first_eigenvalue_symmetric: k must be >= 1");
  if ((grid.n_phi / 2) % k != 0) {
    throw ValidationError("first_eigenvalue_symmetric: k must divide n_phi/2 (k=" +
                          std::to_string(k) + ", n_phi=" + std::to_string(grid.n_phi) + ")");
  }
  const int np_r = grid.n_phi / k;
  std::vector<bool> dirichlet(np_r);
  for (int i = 0; i < np_r; ++i) dirichlet[i] = (2 * i >= np_r);  // phi_local >= T_k/2
  auto sys = detail::assemble_hemisphere(grid, dirichlet, k);
  auto pair = detail::smallest_eigenpair(sys.K, sys.Mdiag);
  return detail::finalize_eigenresult(sys, grid, std::move(pair), canonical_omega_k(k));
}

/// The same eigenvalue through the folded-gradient formulation: half-circle
/// Dirichlet geometry with the phi stiffness scaled by k^2. Cross-checking
/// against the equivariant solve is the module's strongest self-validation.
inline EigenResult first_eigenvalue_folded(const HemisphereGrid& grid, int k) {
  if (k < 1) throw ValidationError("first_eigenvalue_folded: k must be >= 1");
  if ((grid.n_phi / 2) % k != 0) {
    throw ValidationError("first_eigenvalue_folded: k must divide n_phi/2");
  }
  std::vector<bool> dirichlet(grid.n_phi);
  for (int i = 0; i < grid.n_phi; ++i) dirichlet[i] = (2 * i >= grid.n_phi);
  auto sys = detail::assemble_hemisphere(grid, dirichlet, 1, k);
  auto pair = detail::smallest_eigenpair(sys.K, sys.Mdiag);
  return detail::finalize_eigenresult(sys, grid, std::move(pair), canonical_omega_k(1));
}

/// Eigenvalue chain over the symmetry orders admissible on this grid
/// (k | n_phi/2), k <= k_max, in increasing order.
inline std::vector<SweepRow> sweep_k(const HemisphereGrid& grid, int k_max) {
  if (k_max < 1) throw ValidationError("sweep_k: k_max must be >= 1");
  std::vector<SweepRow> rows;
  for (int k = 1; k <= k_max; ++k) {
    if ((grid.n_phi / 2) % k != 0) continue;
    EigenResult res = first_eigenvalue_symmetric(grid, k);
    rows.push_back({k, res.lambda, res.exponent_d, res.residual});
  }
  return rows;
}

}  // namespace cslab
