#pragma once

#include <fftw3.h>

#include <Eigen/SparseCholesky>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "cslab/eigensolve.hpp"
#include "cslab/grid_half_ball.hpp"

namespace cslab {

namespace detail {

/// Discrete weighted Dirichlet form on the half ball over the free interior
/// shells (the outermost shell carries Dirichlet data). One degree of freedom
/// per node plus one pole per shell.
struct BallSystem {
  const HalfBallGrid* grid = nullptr;
  int n_rf = 0;      // free shells (n_r - 1)
  int n_tf = 0;      // regular theta rows (n_theta - 1)
  int np = 0;
  int row_dofs = 0;  // n_tf*np + 1 per shell
  int n_free = 0;
  SpMat K_ff;
  SpMat K_fd;  // couplings of free dofs to the Dirichlet shell (row_dofs wide)
  std::vector<double> disk_w;  // per shell: int over radial cell of r dr

  int dof(int l, int j, int i) const { return l * row_dofs + j * np + i; }
  int pole(int l) const { return l * row_dofs + n_tf * np; }
};

inline BallSystem assemble_ball(const HalfBallGrid& grid) {
  const HemisphereGrid& s = grid.sphere;
  const double a = s.params.a();
  const int dim_n = s.params.dim_n;
  const int nr = grid.n_r(), nt = s.n_theta(), np = s.n_phi;
  const double dphi = s.dphi();

  BallSystem sys;
  sys.grid = &grid;
  sys.n_rf = nr - 1;
  sys.n_tf = nt - 1;
  sys.np = np;
  sys.row_dofs = sys.n_tf * np + 1;
  sys.n_free = sys.n_rf * sys.row_dofs;

  std::vector<Triplet> ff, fd;
  auto add = [&](int p, int q, double c, bool q_dirichlet) {
    ff.emplace_back(p, p, c);
    if (q_dirichlet) {
      fd.emplace_back(p, q, -c);
    } else {
      ff.emplace_back(q, q, c);
      ff.emplace_back(p, q, -c);
      ff.emplace_back(q, p, -c);
    }
  };

  // radial edges: int r^{N+a} (d_r u)^2 against the angular mass
  for (int l = 0; l + 1 < nr; ++l) {
    const double dr = grid.r[l + 1] - grid.r[l];
    const double wr = grid.radial_edge(dim_n + a, l) / (dr * dr);
    const bool up_dirichlet = (l + 1 == nr - 1);
    for (int j = 0; j < sys.n_tf; ++j) {
      const double c = wr * s.mass_cell[j] * dphi;
      for (int i = 0; i < np; ++i) {
        const int q = up_dirichlet ? sys.dof(0, j, i) : sys.dof(l + 1, j, i);
        add(sys.dof(l, j, i), q, c, up_dirichlet);
      }
    }
    const double cp = wr * s.mass_pole * np * dphi;
    add(sys.pole(l), up_dirichlet ? sys.n_tf * np : sys.pole(l + 1), cp, up_dirichlet);
  }
  // spherical part: int r^{N+a-2} over the radial cell times the hemisphere form
  for (int l = 0; l + 1 < nr; ++l) {
    const double wr = grid.radial_cell(dim_n + a - 2.0, l);
    for (int j = 0; j + 1 < nt; ++j) {
      const double dth = s.theta[j + 1] - s.theta[j];
      const double c = wr * s.stiff_theta[j] / (dth * dth) * dphi;
      const bool to_pole = (j + 2 == nt);
      for (int i = 0; i < np; ++i) {
        add(sys.dof(l, j, i), to_pole ? sys.pole(l) : sys.dof(l, j + 1, i), c, false);
      }
    }
    for (int j = 0; j < sys.n_tf; ++j) {
      const double c = wr * s.stiff_phi[j] / dphi;
      for (int i = 0; i < np; ++i) {
        add(sys.dof(l, j, i), sys.dof(l, j, (i + 1) % np), c, false);
      }
    }
  }

  sys.K_ff.resize(sys.n_free, sys.n_free);
  sys.K_ff.setFromTriplets(ff.begin(), ff.end());
  sys.K_fd.resize(sys.n_free, sys.row_dofs);
  sys.K_fd.setFromTriplets(fd.begin(), fd.end());

  sys.disk_w.resize(nr);
  for (int l = 0; l < nr; ++l) sys.disk_w[l] = grid.radial_cell(dim_n - 1.0, l);
  return sys;
}

/// Exact solver for the reaction-free ball operator, used as the PCG
/// preconditioner. The operator is phi-translation invariant, so a real FFT
/// along phi decouples it into one small (r, theta) system per mode; the pole
/// chain couples only to mode zero. Factorizations are built once per grid.
class BallPreconditioner {
 public:
  explicit BallPreconditioner(const BallSystem& sys) : sys_(&sys) {
    const HalfBallGrid& grid = *sys.grid;
    const HemisphereGrid& s = grid.sphere;
    const double a = s.params.a();
    const int dim_n = s.params.dim_n;
    const int nrf = sys.n_rf, ntf = sys.n_tf, np = sys.np;
    const double dphi = s.dphi();
    n_lines_ = nrf * ntf;
    n_modes_ = np / 2 + 1;

    real_buf_ = fftw_alloc_real(static_cast<size_t>(n_lines_) * np);
    cplx_buf_ = fftw_alloc_complex(static_cast<size_t>(n_lines_) * n_modes_);
    int n[] = {np};
    fwd_ = fftw_plan_many_dft_r2c(1, n, n_lines_, real_buf_, nullptr, 1, np, cplx_buf_, nullptr,
                                  1, n_modes_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_many_dft_c2r(1, n, n_lines_, cplx_buf_, nullptr, 1, n_modes_, real_buf_,
                                  nullptr, 1, np, FFTW_ESTIMATE);

    auto idx2 = [&](int l, int j) { return l * ntf + j; };
    solvers_.resize(n_modes_);
    for (int m = 0; m < n_modes_; ++m) {
      const bool with_pole = (m == 0);
      const int nun = n_lines_ + (with_pole ? nrf : 0);
      const double symbol = 2.0 - 2.0 * std::cos(two_pi * m / np);
      std::vector<Triplet> trips;
      auto add = [&](int p, int q, double c) {
        trips.emplace_back(p, p, c);
        if (q >= 0) {
          trips.emplace_back(q, q, c);
          trips.emplace_back(p, q, -c);
          trips.emplace_back(q, p, -c);
        }
      };
      for (int l = 0; l < nrf; ++l) {
        const double dr = grid.r[l + 1] - grid.r[l];
        const double wr = grid.radial_edge(dim_n + a, l) / (dr * dr);
        for (int j = 0; j < ntf; ++j) {
          add(idx2(l, j), l + 1 < nrf ? idx2(l + 1, j) : -1, wr * s.mass_cell[j] * dphi);
        }
        if (with_pole) {
          add(n_lines_ + l, l + 1 < nrf ? n_lines_ + l + 1 : -1, wr * s.mass_pole * dphi);
        }
        const double wsph = grid.radial_cell(dim_n + a - 2.0, l);
        for (int j = 0; j + 1 <= ntf; ++j) {
          if (j + 1 < ntf) {
            const double dth = s.theta[j + 1] - s.theta[j];
            add(idx2(l, j), idx2(l, j + 1), wsph * s.stiff_theta[j] / (dth * dth) * dphi);
          } else {
            const double dth = s.theta[j + 1] - s.theta[j];
            const double c = wsph * s.stiff_theta[j] / (dth * dth) * dphi;
            add(idx2(l, j), with_pole ? n_lines_ + l : -1, c);
          }
        }
        for (int j = 0; j < ntf; ++j) {
          trips.emplace_back(idx2(l, j), idx2(l, j),
                             symbol * wsph * s.stiff_phi[j] / dphi);
        }
      }
      SpMat A(nun, nun);
      A.setFromTriplets(trips.begin(), trips.end());
      solvers_[m] = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
      solvers_[m]->compute(A);
      if (solvers_[m]->info() != Eigen::Success) {
        throw SolverError("ball preconditioner: mode factorization failed");
      }
    }
  }

  ~BallPreconditioner() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_buf_);
    fftw_free(cplx_buf_);
  }
  BallPreconditioner(const BallPreconditioner&) = delete;
  BallPreconditioner& operator=(const BallPreconditioner&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& w) const {
    const int nrf = sys_->n_rf, ntf = sys_->n_tf, np = sys_->np;
    for (int l = 0; l < nrf; ++l) {
      std::copy_n(w.data() + l * sys_->row_dofs, ntf * np, real_buf_ + l * ntf * np);
    }
    fftw_execute(fwd_);

    Eigen::VectorXd out(w.size());
    Eigen::VectorXd re(n_lines_ + nrf), im(n_lines_ + nrf);
    for (int m = 0; m < n_modes_; ++m) {
      const bool with_pole = (m == 0);
      const int nun = n_lines_ + (with_pole ? nrf : 0);
      for (int q = 0; q < n_lines_; ++q) {
        re[q] = cplx_buf_[static_cast<size_t>(q) * n_modes_ + m][0];
        im[q] = cplx_buf_[static_cast<size_t>(q) * n_modes_ + m][1];
      }
      if (with_pole) {
        for (int l = 0; l < nrf; ++l) re[n_lines_ + l] = w[sys_->pole(l)];
      }
      Eigen::VectorXd zre = solvers_[m]->solve(re.head(nun));
      for (int q = 0; q < n_lines_; ++q) {
        cplx_buf_[static_cast<size_t>(q) * n_modes_ + m][0] = zre[q];
      }
      if (with_pole) {
        for (int l = 0; l < nrf; ++l) out[sys_->pole(l)] = zre[n_lines_ + l] / np;
        for (int q = 0; q < n_lines_; ++q) {
          cplx_buf_[static_cast<size_t>(q) * n_modes_ + m][1] = 0.0;
        }
      } else {
        Eigen::VectorXd zim = solvers_[m]->solve(im.head(nun));
        for (int q = 0; q < n_lines_; ++q) {
          cplx_buf_[static_cast<size_t>(q) * n_modes_ + m][1] = zim[q];
        }
      }
    }
    fftw_execute(bwd_);
    for (int l = 0; l < nrf; ++l) {
      for (int q = 0; q < ntf * np; ++q) {
        out[l * sys_->row_dofs + q] = real_buf_[l * ntf * np + q] / np;
      }
    }
    return out;
  }

 private:
  const BallSystem* sys_;
  int n_lines_ = 0;
  int n_modes_ = 0;
  double* real_buf_ = nullptr;
  fftw_complex* cplx_buf_ = nullptr;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
  std::vector<std::unique_ptr<Eigen::SimplicialLDLT<SpMat>>> solvers_;
};

struct PcgResult {
  int iterations = 0;
  double residual = 0.0;
};

/// Preconditioned conjugate gradients for A = K_ff + diag(reaction).
inline PcgResult pcg_solve(const BallSystem& sys, const BallPreconditioner& pre,
                           const Eigen::VectorXd& reaction, const Eigen::VectorXd& rhs,
                           Eigen::VectorXd& x, double tol_rel = 1e-11, int max_iter = 800) {
  auto apply = [&](const Eigen::VectorXd& p) {
    return (sys.K_ff * p + reaction.cwiseProduct(p)).eval();
  };
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    x.setZero();
    return {0, 0.0};
  }
  Eigen::VectorXd r = rhs - apply(x);
  Eigen::VectorXd z = pre.solve(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  PcgResult res;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd Ap = apply(p);
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    res.iterations = it + 1;
    res.residual = r.norm() / bnorm;
    if (res.residual <= tol_rel) return res;
    z = pre.solve(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverError("half-ball linear solve: PCG residual " + std::to_string(res.residual) +
                    " after " + std::to_string(max_iter) + " iterations");
}

/// Quadrature of int y^a |grad f|^2 over the half ball with the same cell
/// forms the solver assembles.
inline double ball_gradient_energy(const HalfBallGrid& grid, const HalfBallField& f) {
  require_same_grid(f, grid);
  const HemisphereGrid& s = grid.sphere;
  const double a = s.params.a();
  const int dim_n = s.params.dim_n;
  const int nr = grid.n_r(), nt = s.n_theta(), np = s.n_phi;
  const double dphi = s.dphi();
  double acc = 0.0;
  for (int l = 0; l + 1 < nr; ++l) {
    const double dr = grid.r[l + 1] - grid.r[l];
    const double wr = grid.radial_edge(dim_n + a, l) / (dr * dr);
    for (int j = 0; j + 1 < nt; ++j) {
      const double c = wr * s.mass_cell[j] * dphi;
      for (int i = 0; i < np; ++i) {
        const double d = f.at(l + 1, j, i) - f.at(l, j, i);
        acc += c * d * d;
      }
    }
    const double dpole = f.at(l + 1, nt - 1, 0) - f.at(l, nt - 1, 0);
    acc += wr * s.mass_pole * np * dphi * dpole * dpole;
  }
  for (int l = 0; l < nr; ++l) {
    const double wsph = grid.radial_cell(dim_n + a - 2.0, l);
    for (int j = 0; j + 1 < nt; ++j) {
      const double dth = s.theta[j + 1] - s.theta[j];
      const double c = wsph * s.stiff_theta[j] / (dth * dth) * dphi;
      for (int i = 0; i < np; ++i) {
        const double d = f.at(l, j + 1, i) - f.at(l, j, i);
        acc += c * d * d;
      }
    }
    for (int j = 0; j + 1 < nt; ++j) {
      const double c = wsph * s.stiff_phi[j] / dphi;
      for (int i = 0; i < np; ++i) {
        const double d = f.at(l, j, (i + 1) % np) - f.at(l, j, i);
        acc += c * d * d;
      }
    }
  }
  return acc;
}

/// int over the flat disk of u^2 v^2 (Lebesgue measure r dr dphi).
inline double disk_integral_u2v2(const HalfBallGrid& grid, const HalfBallField& u,
                                 const HalfBallField& v) {
  const int nr = grid.n_r(), np = grid.sphere.n_phi;
  const double dphi = grid.sphere.dphi();
  const int dim_n = grid.sphere.params.dim_n;
  double acc = 0.0;
  for (int l = 0; l < nr; ++l) {
    const double w = grid.radial_cell(dim_n - 1.0, l) * dphi;
    double row = 0.0;
    for (int i = 0; i < np; ++i) {
      const double uu = u.at(l, 0, i), vv = v.at(l, 0, i);
      row += uu * uu * vv * vv;
    }
    acc += w * row;
  }
  return acc;
}

}  // namespace detail

struct ConvergenceRow {
  int iter = 0;
  double energy = 0.0;
  double interaction = 0.0;
  double delta = 0.0;
};

/// Dirichlet shell datum g_k for the competition system: the k-symmetric
/// eigenfunction renormalized so that int y^a (g^2 + h^2) = 1 with
/// h = g o sigma. With the half-cell-shifted pairing reflection the discrete
/// pair is exactly segregated on the equator (g h = 0 at every node), which
/// makes the homogeneous competitor admissible and the bound 2I <= d exact.
inline ScalarField competition_boundary_datum(const HemisphereGrid& grid, int k,
                                              const EigenResult& eigen_data) {
  (void)k;
  require_same_grid(eigen_data.eigenfunction, grid);
  ScalarField g = eigen_data.eigenfunction;
  g.values /= std::sqrt(2.0 * weighted_l2_inner(g, g, grid));
  return g;
}

/// One converged (or flagged) solve of the boundary competition system on the
/// half ball: both components, the hemisphere Dirichlet data on the outer
/// shell, and the value of the energy functional I.
struct CompetitionState {
  HalfBallGrid grid;
  HalfBallField u;
  HalfBallField v;
  ScalarField boundary_u;
  ScalarField boundary_v;
  double beta = 0.0;
  int k = 1;
  double energy = 0.0;       // I(u, v)
  double interaction = 0.0;  // beta * int_disk u^2 v^2
  bool converged = false;
  bool positive_interior = false;
  int outer_iterations = 0;
  std::vector<ConvergenceRow> log;
};

/// I(u,v) = 1/2 int y^a (|grad u|^2 + |grad v|^2) + 1/2 int_disk beta u^2 v^2.
inline double energy_I(const CompetitionState& state) {
  return 0.5 * (detail::ball_gradient_energy(state.grid, state.u) +
                detail::ball_gradient_energy(state.grid, state.v)) +
         0.5 * state.beta * detail::disk_integral_u2v2(state.grid, state.u, state.v);
}

struct CompetitionOptions {
  int max_outer = 300;
  double tol_rel = 1e-10;
  double pcg_tol = 1e-11;
  int pcg_max_iter = 800;
  double energy_ceiling_tol = 0.02;  // frozen: 2 I <= d (1 + tol)
};

/// Minimizes I over pairs with the shell data (g_k, h_k) and the exact k-fold
/// symmetry (v = u o sigma throughout). Each outer iteration solves the linear
/// problem with frozen boundary reaction beta v^2 by preconditioned CG and
/// backtracks toward its solution so I never increases. The iteration starts
/// from the d-homogeneous extension pair, whose energy already satisfies
/// 2 I = d, so the energy bound is preserved by descent.
inline CompetitionState solve_beta_system(const HalfBallGrid& grid, int k, double beta,
                                          const EigenResult& eigen_data,
                                          CompetitionOptions opts = {}) {
  // beta = 0 is the decoupled pair of weighted harmonic extensions
  if (beta < 0.0) throw ValidationError("solve_beta_system: beta must be >= 0");
  if (k < 1 || (grid.sphere.n_phi / 2) % k != 0) {
    throw ValidationError("solve_beta_system: k must divide n_phi/2");
  }
  require_same_grid(eigen_data.eigenfunction, grid.sphere);
  if (!(eigen_data.omega == canonical_omega_k(k))) {
    throw ValidationError("solve_beta_system: eigen data must carry the canonical k-region");
  }

  const HemisphereGrid& s = grid.sphere;
  const int nr = grid.n_r(), nt = s.n_theta(), np = s.n_phi;
  const double dphi = s.dphi();

  ScalarField g = competition_boundary_datum(s, k, eigen_data);
  const int sigma = s.paired_sigma_plane(1, k);
  ScalarField h = reflect_field(g, s, sigma);
  const double d_exponent = eigen_data.exponent_d;

  auto sys = detail::assemble_ball(grid);
  detail::BallPreconditioner pre(sys);

  // Dirichlet shell vector (row layout)
  Eigen::VectorXd g_shell(sys.row_dofs);
  for (int j = 0; j + 1 < nt; ++j) {
    for (int i = 0; i < np; ++i) g_shell[j * np + i] = g.at(j, i);
  }
  g_shell[sys.n_tf * np] = g.at(nt - 1, 0);
  const Eigen::VectorXd rhs = -(sys.K_fd * g_shell);

  auto materialize = [&](const Eigen::VectorXd& x) {
    HalfBallField f = make_ball_field(grid);
    for (int l = 0; l + 1 < nr; ++l) {
      for (int j = 0; j + 1 < nt; ++j) {
        for (int i = 0; i < np; ++i) f.at(l, j, i) = x[sys.dof(l, j, i)];
      }
      for (int i = 0; i < np; ++i) f.at(l, nt - 1, i) = x[sys.pole(l)];
    }
    for (int j = 0; j < nt; ++j) {
      for (int i = 0; i < np; ++i) f.at(nr - 1, j, i) = g.at(j, i);
    }
    return f;
  };
  auto reflect_dofs = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size());
    for (int l = 0; l + 1 < nr; ++l) {
      for (int j = 0; j + 1 < nt; ++j) {
        for (int i = 0; i < np; ++i) {
          out[sys.dof(l, j, i)] = x[sys.dof(l, j, s.reflect_index(i, sigma))];
        }
      }
      out[sys.pole(l)] = x[sys.pole(l)];
    }
    return out;
  };
  auto reaction_of = [&](const Eigen::VectorXd& xv) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(sys.n_free);
    for (int l = 0; l + 1 < nr; ++l) {
      const double w = beta * sys.disk_w[l] * dphi;
      for (int i = 0; i < np; ++i) {
        const double vv = xv[sys.dof(l, 0, i)];
        d[sys.dof(l, 0, i)] = w * vv * vv;
      }
    }
    return d;
  };
  auto energy_of = [&](const Eigen::VectorXd& x) {
    HalfBallField fu = materialize(x);
    HalfBallField fv = reflect_ball_field(fu, grid, 0);
    const double grad = detail::ball_gradient_energy(grid, fu);
    const double inter = beta * detail::disk_integral_u2v2(grid, fu, fv);
    return std::make_pair(grad + 0.5 * inter, inter);
  };

  // initial iterate: the d-homogeneous extension of g
  HalfBallField u0 = homogeneous_extension(g, d_exponent, grid);
  Eigen::VectorXd xu(sys.n_free);
  for (int l = 0; l + 1 < nr; ++l) {
    for (int j = 0; j + 1 < nt; ++j) {
      for (int i = 0; i < np; ++i) xu[sys.dof(l, j, i)] = u0.at(l, j, i);
    }
    xu[sys.pole(l)] = u0.at(l, nt - 1, 0);
  }

  CompetitionState state;
  state.grid = grid;
  state.beta = beta;
  state.k = k;
  state.boundary_u = g;
  state.boundary_v = h;

  auto [I_prev, inter_prev] = energy_of(xu);
  state.log.push_back({0, I_prev, inter_prev, 0.0});
  int it = 1;
  for (; it <= opts.max_outer; ++it) {
    const Eigen::VectorXd xv = reflect_dofs(xu);
    const Eigen::VectorXd reaction = reaction_of(xv);
    Eigen::VectorXd target = xu;
    detail::pcg_solve(sys, pre, reaction, rhs, target, opts.pcg_tol, opts.pcg_max_iter);

    double tau = 1.0;
    Eigen::VectorXd cand = target;
    auto [I_now, inter_now] = energy_of(cand);
    while (I_now > I_prev + 1e-14 * std::abs(I_prev) && tau > 1e-4) {
      tau *= 0.5;
      cand = (1.0 - tau) * xu + tau * target;
      std::tie(I_now, inter_now) = energy_of(cand);
    }
    if (I_now > I_prev + 1e-14 * std::abs(I_prev)) {
      state.converged = true;  // stationary within line-search resolution
      break;
    }
    xu = cand;
    state.log.push_back({it, I_now, inter_now, I_prev - I_now});
    if (std::abs(I_prev - I_now) < opts.tol_rel * std::max(std::abs(I_now), 1e-30)) {
      state.converged = true;
      I_prev = I_now;
      break;
    }
    I_prev = I_now;
  }
  state.outer_iterations = it;

  // exact k-fold equivariance, then the exact reflection pairing
  if (k > 1) {
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(sys.n_free);
    Eigen::VectorXd rot = xu;
    for (int t = 0; t < k; ++t) {
      avg += rot;
      Eigen::VectorXd next(rot.size());
      for (int l = 0; l + 1 < nr; ++l) {
        for (int j = 0; j + 1 < nt; ++j) {
          for (int i = 0; i < np; ++i) {
            next[sys.dof(l, j, i)] = rot[sys.dof(l, j, s.rotate_index(i, k))];
          }
        }
        next[sys.pole(l)] = rot[sys.pole(l)];
      }
      rot.swap(next);
    }
    xu = avg / k;
  }

  state.u = materialize(xu);
  state.v = reflect_ball_field(state.u, grid, sigma);
  state.energy = energy_I(state);
  state.interaction = beta * detail::disk_integral_u2v2(state.grid, state.u, state.v);

  double min_interior = std::numeric_limits<double>::max();
  for (int l = 0; l + 1 < nr; ++l) {
    for (int j = 0; j < nt; ++j) {
      for (int i = 0; i < np; ++i) min_interior = std::min(min_interior, state.u.at(l, j, i));
    }
  }
  state.positive_interior = min_interior > 0.0;

  if (2.0 * state.energy > d_exponent * (1.0 + opts.energy_ceiling_tol) + 1e-12) {
    throw PropertyViolation("solve_beta_system: energy bound 2I <= d violated (2I = " +
                            std::to_string(2.0 * state.energy) + ", d = " +
                            std::to_string(d_exponent) + ")");
  }
  return state;
}

}  // namespace cslab
