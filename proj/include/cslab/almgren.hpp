#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cslab/competition.hpp"

namespace cslab {

namespace detail {

/// Per-shell radial diagnostic tables for one state. Cumulative integrals use
/// power-law-exact cells (linear interpolation of the log integrand in log r)
/// plus an origin tail from the local homogeneity exponent, so homogeneous
/// states are integrated without bias.
struct RadialTables {
  std::vector<double> r;
  std::vector<double> H;         // sum of node_measure (u^2 + v^2) on the shell
  std::vector<double> e_grad;    // r^{N+a} shell integral of y^a(|grad u|^2+|grad v|^2)
  std::vector<double> rad_part;  // r^{N+a} shell integral of y^a((d_r u)^2+(d_r v)^2)
  std::vector<double> circ;      // int over the circle S^1_r of beta u^2 v^2
  std::vector<double> cum_grad;  // int_0^{r_l} e_grad dr
  std::vector<double> cum_circ;  // int_0^{r_l} circ dr
  bool trivial = false;          // identically zero state
};

inline double power_cell_integral(double f0, double f1, double r0, double r1) {
  if (f0 > 0.0 && f1 > 0.0) {
    const double q = std::log(f1 / f0) / std::log(r1 / r0);
    if (std::abs(q + 1.0) > 1e-12) return (f1 * r1 - f0 * r0) / (q + 1.0);
    return f0 * r0 * std::log(r1 / r0);
  }
  return 0.5 * (f0 + f1) * (r1 - r0);
}

inline std::vector<double> cumulative_power(const std::vector<double>& f,
                                            const std::vector<double>& r) {
  std::vector<double> out(f.size(), 0.0);
  if (f.size() < 2) return out;
  // origin tail from the local homogeneity exponent, fit on interior shells
  // whose integrand samples carry centered (unbiased) radial derivatives
  const size_t pa = f.size() > 2 ? 1 : 0, pb = pa + 1;
  if (f[0] > 0.0 && f[pa] > 0.0 && f[pb] > 0.0) {
    const double p = std::log(f[pb] / f[pa]) / std::log(r[pb] / r[pa]);
    out[0] = p > -1.0 ? f[0] * r[0] / (p + 1.0) : 0.0;
  } else {
    out[0] = 0.5 * f[0] * r[0];
  }
  for (size_t l = 0; l + 1 < f.size(); ++l) {
    out[l + 1] = out[l] + power_cell_integral(f[l], f[l + 1], r[l], r[l + 1]);
  }
  return out;
}

inline RadialTables radial_tables(const CompetitionState& state) {
  const HalfBallGrid& grid = state.grid;
  const HemisphereGrid& s = grid.sphere;
  const int nr = grid.n_r(), nt = s.n_theta(), np = s.n_phi;
  const double a = s.params.a();
  const int dim_n = s.params.dim_n;
  const double dphi = s.dphi();

  RadialTables t;
  t.r = grid.r;
  t.H.assign(nr, 0.0);
  t.e_grad.assign(nr, 0.0);
  t.rad_part.assign(nr, 0.0);
  t.circ.assign(nr, 0.0);

  // radial derivative on the uniform log grid, second order at both ends
  const double dt = grid.log_step();
  auto du_dr = [&](const HalfBallField& f, int l, int j, int i) {
    if (l == 0) {
      return (-3.0 * f.at(0, j, i) + 4.0 * f.at(1, j, i) - f.at(2, j, i)) /
             (2.0 * dt * grid.r[0]);
    }
    if (l == nr - 1) {
      return (3.0 * f.at(nr - 1, j, i) - 4.0 * f.at(nr - 2, j, i) + f.at(nr - 3, j, i)) /
             (2.0 * dt * grid.r[nr - 1]);
    }
    return (f.at(l + 1, j, i) - f.at(l - 1, j, i)) / (2.0 * dt * grid.r[l]);
  };

  for (int l = 0; l < nr; ++l) {
    double mass = 0.0, radial = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double w = s.node_measure(j);
      double row_mass = 0.0, row_rad = 0.0;
      for (int i = 0; i < np; ++i) {
        const double uu = state.u.at(l, j, i), vv = state.v.at(l, j, i);
        row_mass += uu * uu + vv * vv;
        const double du = du_dr(state.u, l, j, i), dv = du_dr(state.v, l, j, i);
        row_rad += du * du + dv * dv;
      }
      mass += w * row_mass;
      radial += w * row_rad;
    }
    t.H[l] = mass;
    ScalarField tu = shell_trace(state.u, grid, l);
    ScalarField tv = shell_trace(state.v, grid, l);
    const double sph = weighted_dirichlet_energy(tu, s) + weighted_dirichlet_energy(tv, s);
    const double rna = std::pow(grid.r[l], dim_n + a);
    t.e_grad[l] = rna * radial + rna / (grid.r[l] * grid.r[l]) * sph;
    t.rad_part[l] = rna * radial;
    double uv = 0.0;
    for (int i = 0; i < np; ++i) {
      const double uu = state.u.at(l, 0, i), vv = state.v.at(l, 0, i);
      uv += uu * uu * vv * vv;
    }
    t.circ[l] = state.beta * grid.r[l] * uv * dphi;
  }
  t.cum_grad = cumulative_power(t.e_grad, t.r);
  t.cum_circ = cumulative_power(t.circ, t.r);

  double hmax = 0.0;
  for (double h : t.H) hmax = std::max(hmax, h);
  t.trivial = hmax == 0.0;
  return t;
}

/// Power-law interpolation of positive per-shell samples at radius r.
inline double interp_shell(const std::vector<double>& f, const std::vector<double>& r,
                           double x) {
  if (x <= r.front()) return f.front();
  if (x >= r.back()) return f.back();
  auto it = std::upper_bound(r.begin(), r.end(), x);
  const size_t l = static_cast<size_t>(it - r.begin()) - 1;
  if (f[l] > 0.0 && f[l + 1] > 0.0) {
    const double q = std::log(f[l + 1] / f[l]) / std::log(r[l + 1] / r[l]);
    return f[l] * std::pow(x / r[l], q);
  }
  const double w = (x - r[l]) / (r[l + 1] - r[l]);
  return (1.0 - w) * f[l] + w * f[l + 1];
}

/// Cumulative integral evaluated at arbitrary r (partial power-law cell).
inline double cumulative_at(const std::vector<double>& cum, const std::vector<double>& f,
                            const std::vector<double>& r, double x) {
  if (x <= r.front()) return cum.front();
  if (x >= r.back()) return cum.back();
  auto it = std::upper_bound(r.begin(), r.end(), x);
  const size_t l = static_cast<size_t>(it - r.begin()) - 1;
  const double fx = interp_shell(f, r, x);
  return cum[l] + power_cell_integral(f[l], fx, r[l], x);
}

inline void require_radius(const CompetitionState& state, double r, const char* who) {
  if (!(r >= state.grid.r.front() * (1.0 - 1e-12) && r <= state.grid.r_max * (1.0 + 1e-12))) {
    throw ValidationError(std::string(who) + ": radius " + std::to_string(r) +
                          " outside the resolved range [" + std::to_string(state.grid.r.front()) +
                          ", " + std::to_string(state.grid.r_max) + "]");
  }
}

inline double H_from_tables(const RadialTables& t, double r, const char* who) {
  const double h = interp_shell(t.H, t.r, r);
  if (!(h > 1e-280)) {
    throw ValidationError(std::string(who) + ": boundary mass H below the positivity floor at r = " +
                          std::to_string(r) + " (degenerate state)");
  }
  return h;
}

inline double E_from_tables(const CompetitionState& state, const RadialTables& t, double r) {
  const double a = state.grid.sphere.params.a();
  const int dim_n = state.grid.sphere.params.dim_n;
  const double vol = cumulative_at(t.cum_grad, t.e_grad, t.r, r) +
                     cumulative_at(t.cum_circ, t.circ, t.r, r);
  return vol / std::pow(r, dim_n - 1.0 + a);
}

}  // namespace detail

/// E(r): scaled energy over B_r^+ including the boundary interaction.
inline double almgren_E(const CompetitionState& state, double r) {
  detail::require_radius(state, r, "almgren_E");
  auto t = detail::radial_tables(state);
  return detail::E_from_tables(state, t, r);
}

/// H(r): scaled weighted boundary mass over the spherical cap at radius r.
inline double almgren_H(const CompetitionState& state, double r) {
  detail::require_radius(state, r, "almgren_H");
  auto t = detail::radial_tables(state);
  return detail::H_from_tables(t, r, "almgren_H");
}

/// Almgren frequency N(r) = E(r)/H(r).
inline double frequency_N(const CompetitionState& state, double r) {
  detail::require_radius(state, r, "frequency_N");
  auto t = detail::radial_tables(state);
  return detail::E_from_tables(state, t, r) / detail::H_from_tables(t, r, "frequency_N");
}

struct FrequencyTrace {
  std::vector<double> radii;
  std::vector<double> E_vals;
  std::vector<double> H_vals;
  std::vector<double> N_vals;
  FractionalParams params;
  std::vector<bool> dip_flagged;  // monotonicity violation beyond tolerance at this entry
};

/// Samples E, H, N along sorted radii. Monotonicity violations beyond the
/// 1e-6 relative tolerance are flagged per radius, never raised as errors.
inline FrequencyTrace frequency_trace(const CompetitionState& state,
                                      const std::vector<double>& radii) {
  FrequencyTrace out;
  out.params = state.grid.sphere.params;
  auto t = detail::radial_tables(state);
  double prev_n = -std::numeric_limits<double>::max();
  for (size_t q = 0; q < radii.size(); ++q) {
    const double r = radii[q];
    detail::require_radius(state, r, "frequency_trace");
    if (q > 0 && r < radii[q - 1]) {
      throw ValidationError("frequency_trace: radii must be sorted ascending");
    }
    const double h = detail::H_from_tables(t, r, "frequency_trace");
    const double e = detail::E_from_tables(state, t, r);
    const double n = e / h;
    out.radii.push_back(r);
    out.E_vals.push_back(e);
    out.H_vals.push_back(h);
    out.N_vals.push_back(n);
    out.dip_flagged.push_back(q > 0 && n < prev_n - 1e-6 * std::max(1.0, prev_n));
    prev_n = n;
  }
  return out;
}

/// Log-spaced default ladder over the resolved radii of a state.
inline std::vector<double> default_radius_ladder(const CompetitionState& state, int count = 24) {
  const double lo = state.grid.r.front(), hi = state.grid.r_max;
  std::vector<double> out(count);
  for (int q = 0; q < count; ++q) {
    out[q] = lo * std::pow(hi / lo, static_cast<double>(q) / (count - 1));
  }
  return out;
}

struct DoublingReport {
  double r1 = 0.0, r2 = 0.0;
  double h_ratio = 0.0;   // H(r2)/H(r1)
  double bound = 0.0;     // e^{d/(1-a)} (r2/r1)^{2d}
  bool ok = false;
};

/// Checks H(r2)/H(r1) <= e^{d/(1-a)} (r2/r1)^{2d}; requires N(r_max) <= d.
inline DoublingReport doubling_check(const CompetitionState& state, double r1, double r2,
                                     double d) {
  if (!(r1 > 0.0 && r1 <= r2)) throw ValidationError("doubling_check: need 0 < r1 <= r2");
  detail::require_radius(state, r1, "doubling_check");
  detail::require_radius(state, r2, "doubling_check");
  auto t = detail::radial_tables(state);
  const double n_max = detail::E_from_tables(state, t, state.grid.r_max) /
                       detail::H_from_tables(t, state.grid.r_max, "doubling_check");
  // small slack: the discrete frequency of d-homogeneous data carries an
  // O(log-step^2) sampling bias
  if (n_max > d + 1e-3 * std::max(1.0, d)) {
    throw ValidationError("doubling_check: precondition N(r_max) <= d fails (N = " +
                          std::to_string(n_max) + ", d = " + std::to_string(d) + ")");
  }
  DoublingReport rep;
  rep.r1 = r1;
  rep.r2 = r2;
  rep.h_ratio = detail::H_from_tables(t, r2, "doubling_check") /
                detail::H_from_tables(t, r1, "doubling_check");
  const double a = state.grid.sphere.params.a();
  rep.bound = std::exp(d / (1.0 - a)) * std::pow(r2 / r1, 2.0 * d);
  rep.ok = rep.h_ratio <= rep.bound * (1.0 + 1e-9);
  return rep;
}

/// Relative defect of the Pohozaev identity at radius r: the volume term
/// (N-1+a) int y^a(|grad u|^2+|grad v|^2) against the shell, circle and disk
/// boundary terms. Decreases roughly linearly under grid refinement.
inline double pohozaev_residual(const CompetitionState& state, double r) {
  auto t = detail::radial_tables(state);
  if (t.trivial) return 0.0;
  detail::require_radius(state, r, "pohozaev_residual");
  const double a = state.grid.sphere.params.a();
  const int dim_n = state.grid.sphere.params.dim_n;
  const double lhs = (dim_n - 1.0 + a) * detail::cumulative_at(t.cum_grad, t.e_grad, t.r, r);
  const double rhs = r * (detail::interp_shell(t.e_grad, t.r, r) -
                          2.0 * detail::interp_shell(t.rad_part, t.r, r)) +
                     r * detail::interp_shell(t.circ, t.r, r) -
                     dim_n * detail::cumulative_at(t.cum_circ, t.circ, t.r, r);
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
}

/// The unique radius with beta r^{2s} H(r) = 1, by bisection on the
/// interpolated tables.
inline double select_r_beta(const CompetitionState& state) {
  auto t = detail::radial_tables(state);
  const double s = state.grid.sphere.params.s;
  auto f = [&](double r) {
    return state.beta * std::pow(r, 2.0 * s) * detail::H_from_tables(t, r, "select_r_beta");
  };
  const double r_lo0 = t.r.front(), r_hi0 = state.grid.r_max;
  const double f_hi = f(r_hi0);
  if (f_hi == 1.0) return r_hi0;
  if (f_hi < 1.0) {
    throw ValidationError("select_r_beta: beta r^{2s} H(r) stays below 1 (beta too small)");
  }
  if (f(r_lo0) >= 1.0) {
    throw ValidationError("select_r_beta: root lies below the innermost resolved shell");
  }
  double lo = r_lo0, hi = r_hi0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Rescaling (u,v)(z) -> beta^{1/2} r_b^s (u,v)(r_b z): the blown-up state
/// satisfies the unit-coupling system on the dilated grid. Exact node
/// resampling (radii scale, values scale, nothing is interpolated).
inline CompetitionState blow_up(const CompetitionState& state, double r_b) {
  if (!(r_b > 0.0 && r_b <= 1.0)) throw ValidationError("blow_up: r_b must lie in (0, 1]");
  CompetitionState out = state;
  out.grid.uid = detail::next_grid_uid();
  for (double& rv : out.grid.r) rv /= r_b;
  for (double& rv : out.grid.rb) rv /= r_b;
  out.grid.r_min /= r_b;
  out.grid.r_max /= r_b;

  const double s = state.grid.sphere.params.s;
  const double w = std::sqrt(state.beta) * std::pow(r_b, s);
  out.u.values = state.u.values * w;
  out.v.values = state.v.values * w;
  out.u.grid_uid = out.v.grid_uid = out.grid.uid;
  out.beta = 1.0;
  out.boundary_u = shell_trace(out.u, out.grid, out.grid.n_r() - 1);
  out.boundary_v = shell_trace(out.v, out.grid, out.grid.n_r() - 1);
  out.interaction = detail::disk_integral_u2v2(out.grid, out.u, out.v);
  out.energy = energy_I(out);
  out.log.clear();
  return out;
}

struct BlowDownResult {
  double scale_R = 0.0;
  double normalizer_L = 0.0;            // L(R) with H(rescaled, 1) = 1
  double kappa = 0.0;                   // L(R)^2 R^{1-a}
  CompetitionState rescaled;
  double homogeneity_deviation = 0.0;   // relative distance to r^d times its r=1 trace
};

/// Blow-down u_R(z) = L(R)^{-1} u(R z) with H((u_R, v_R), 1) = 1. R snaps to
/// the nearest grid shell so the normalization uses exact shell quadrature.
inline BlowDownResult blow_down(const CompetitionState& state, double R) {
  const auto& r = state.grid.r;
  if (!(R >= r.front() && R <= state.grid.r_max * (1.0 + 1e-12))) {
    throw ValidationError("blow_down: R exceeds the available domain");
  }
  int l_R = 0;
  double best = std::numeric_limits<double>::max();
  for (int l = 0; l < state.grid.n_r(); ++l) {
    const double dist = std::abs(std::log(r[l] / R));
    if (dist < best) {
      best = dist;
      l_R = l;
    }
  }
  auto t = detail::radial_tables(state);
  const double L = std::sqrt(detail::H_from_tables(t, r[l_R], "blow_down"));
  const double a = state.grid.sphere.params.a();

  BlowDownResult out;
  out.scale_R = r[l_R];
  out.normalizer_L = L;
  out.kappa = L * L * std::pow(out.scale_R, 1.0 - a);

  out.rescaled = state;
  out.rescaled.grid.uid = detail::next_grid_uid();
  for (double& rv : out.rescaled.grid.r) rv /= out.scale_R;
  for (double& rv : out.rescaled.grid.rb) rv /= out.scale_R;
  out.rescaled.grid.r_min /= out.scale_R;
  out.rescaled.grid.r_max /= out.scale_R;
  out.rescaled.u.values = state.u.values / L;
  out.rescaled.v.values = state.v.values / L;
  out.rescaled.u.grid_uid = out.rescaled.v.grid_uid = out.rescaled.grid.uid;
  out.rescaled.beta = state.beta * out.kappa;
  out.rescaled.boundary_u = shell_trace(out.rescaled.u, out.rescaled.grid,
                                        out.rescaled.grid.n_r() - 1);
  out.rescaled.boundary_v = shell_trace(out.rescaled.v, out.rescaled.grid,
                                        out.rescaled.grid.n_r() - 1);
  out.rescaled.interaction =
      out.rescaled.beta * detail::disk_integral_u2v2(out.rescaled.grid, out.rescaled.u,
                                                     out.rescaled.v);
  out.rescaled.energy = energy_I(out.rescaled);
  out.rescaled.log.clear();

  // deviation from d-homogeneity over the outer decade; the exponent is fit
  // from H itself over that window, so exactly homogeneous data has zero
  // deviation regardless of quadrature bias
  int l_lo = 0;
  for (int l = 0; l <= l_R; ++l) {
    if (r[l] >= 0.1 * out.scale_R * (1.0 - 1e-12)) {
      l_lo = l;
      break;
    }
  }
  if (l_lo == l_R) l_lo = std::max(0, l_R - 1);
  const double d = 0.5 *
                   std::log(detail::H_from_tables(t, r[l_R], "blow_down") /
                            detail::H_from_tables(t, r[l_lo], "blow_down")) /
                   std::log(r[l_R] / r[l_lo]);
  const HemisphereGrid& s = state.grid.sphere;
  double num = 0.0, den = 0.0;
  for (int l = 0; l <= l_R; ++l) {
    const double rr = r[l] / out.scale_R;
    if (rr < 0.1 * (1.0 - 1e-12)) continue;
    const double rd = std::pow(rr, d);
    for (int j = 0; j < s.n_theta(); ++j) {
      const double w = s.node_measure(j);
      for (int i = 0; i < s.n_phi; ++i) {
        const double fu = state.u.at(l, j, i) / L, fv = state.v.at(l, j, i) / L;
        const double gu = rd * state.u.at(l_R, j, i) / L, gv = rd * state.v.at(l_R, j, i) / L;
        num += w * ((fu - gu) * (fu - gu) + (fv - gv) * (fv - gv));
        den += w * (fu * fu + fv * fv);
      }
    }
  }
  out.homogeneity_deviation = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

struct GrowthRateEstimate {
  double rate = 0.0;            // primary estimate: the frequency tail
  double frequency_tail = 0.0;  // N(r_max)
  double h_slope = 0.0;         // slope of log(H)/2 against log r, outer decade
};

/// Growth rate of a state: the tail of the Almgren frequency (primary)
/// together with the half-log-H slope over the outer decade of radii.
inline GrowthRateEstimate growth_rate_estimate(const CompetitionState& state) {
  const auto& r = state.grid.r;
  if (state.grid.r_max / r.front() < std::sqrt(10.0)) {
    throw ValidationError("growth_rate_estimate: insufficient radial range (< half a decade)");
  }
  auto t = detail::radial_tables(state);
  GrowthRateEstimate out;
  out.frequency_tail = detail::E_from_tables(state, t, state.grid.r_max) /
                       detail::H_from_tables(t, state.grid.r_max, "growth_rate_estimate");
  const double r_lo = std::max(r.front(), state.grid.r_max / 10.0);
  const double h_lo = detail::H_from_tables(t, r_lo, "growth_rate_estimate");
  const double h_hi = detail::H_from_tables(t, state.grid.r_max, "growth_rate_estimate");
  out.h_slope = 0.5 * std::log(h_hi / h_lo) / std::log(state.grid.r_max / r_lo);
  out.rate = out.frequency_tail;
  return out;
}

}  // namespace cslab
