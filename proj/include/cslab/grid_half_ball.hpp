#pragma once

#include <cmath>
#include <vector>

#include "cslab/grid_hemisphere.hpp"
#include "cslab/scalar_field.hpp"

namespace cslab {

namespace detail {
/// Exact int_{r0}^{r1} r^p dr (p > -1).
inline double power_integral(double p, double r0, double r1) {
  return (std::pow(r1, p + 1.0) - std::pow(r0, p + 1.0)) / (p + 1.0);
}
}  // namespace detail

/// Tensor-product half-ball grid: geometric radial shells crossed with a
/// hemisphere grid. The weighted volume element in spherical form is
/// r^{N+a} (sin theta)^a cos theta dr dtheta dphi; the flat boundary (the disk
/// y = 0) is the theta = 0 slice with Lebesgue measure r dr dphi.
///
/// Radial shells are geometric so power-law fields have uniform relative
/// resolution; the innermost mass cell reaches down to r = 0 so total measures
/// stay exact, while fields carry no node at the origin.
struct HalfBallGrid {
  HemisphereGrid sphere;
  std::vector<double> r;   // n_r shells, geometric from r_min to r_max
  std::vector<double> rb;  // n_r + 1 radial cell bounds, rb[0] = 0
  double r_min = 0.0;
  double r_max = 1.0;
  std::uint64_t uid = 0;

  int n_r() const { return static_cast<int>(r.size()); }
  double log_step() const { return std::log(r[1] / r[0]); }

  /// int over the radial mass cell of shell l of r^p dr.
  double radial_cell(double p, int l) const {
    return detail::power_integral(p, rb[l], rb[l + 1]);
  }
  /// int between shells l and l+1 of r^p dr.
  double radial_edge(double p, int l) const {
    return detail::power_integral(p, r[l], r[l + 1]);
  }

  double total_volume_measure() const {
    const double a = sphere.params.a();
    const int n = sphere.params.dim_n;
    double sphere_mass = 0.0;
    for (double m : sphere.mass_cell) sphere_mass += m;
    sphere_mass += sphere.mass_pole;
    return detail::power_integral(n + a, 0.0, r_max) * sphere_mass * sphere.n_phi *
           sphere.dphi();
  }
};

inline HalfBallGrid build_half_ball_grid(const HemisphereGrid& sphere, int n_r,
                                         double r_min = 1e-3, double r_max = 1.0) {
  if (n_r < 8 || n_r > 1024) throw ValidationError("half-ball grid: n_r must be in [8, 1024]");
  if (!(r_min > 0.0 && r_min < r_max)) {
    throw ValidationError("half-ball grid: need 0 < r_min < r_max");
  }
  HalfBallGrid g;
  g.sphere = sphere;
  g.r_min = r_min;
  g.r_max = r_max;
  g.uid = detail::next_grid_uid();
  g.r.resize(n_r);
  for (int l = 0; l < n_r; ++l) {
    g.r[l] = r_min * std::pow(r_max / r_min, static_cast<double>(l) / (n_r - 1));
  }
  g.r.back() = r_max;
  g.rb.resize(n_r + 1);
  g.rb[0] = 0.0;
  for (int l = 1; l < n_r; ++l) g.rb[l] = std::sqrt(g.r[l - 1] * g.r[l]);
  g.rb[n_r] = r_max;
  return g;
}

/// Nodal values on a half-ball grid, r outer, theta middle, phi inner. Pole
/// rows (theta index n_theta-1) are constant per shell.
struct HalfBallField {
  std::uint64_t grid_uid = 0;
  int n_r = 0;
  int n_theta = 0;
  int n_phi = 0;
  Eigen::ArrayXd values;

  double& at(int l, int j, int i) {
    return values[(static_cast<Eigen::Index>(l) * n_theta + j) * n_phi + i];
  }
  double at(int l, int j, int i) const {
    return values[(static_cast<Eigen::Index>(l) * n_theta + j) * n_phi + i];
  }
};

inline HalfBallField make_ball_field(const HalfBallGrid& g, double fill = 0.0) {
  HalfBallField f;
  f.grid_uid = g.uid;
  f.n_r = g.n_r();
  f.n_theta = g.sphere.n_theta();
  f.n_phi = g.sphere.n_phi;
  f.values = Eigen::ArrayXd::Constant(
      static_cast<Eigen::Index>(f.n_r) * f.n_theta * f.n_phi, fill);
  return f;
}

inline void require_same_grid(const HalfBallField& f, const HalfBallGrid& g) {
  if (f.grid_uid != g.uid) throw ValidationError("field does not belong to this half-ball grid");
}

/// Shell trace as a hemisphere field.
inline ScalarField shell_trace(const HalfBallField& f, const HalfBallGrid& g, int l) {
  require_same_grid(f, g);
  ScalarField out = make_field(g.sphere);
  for (int j = 0; j < f.n_theta; ++j) {
    for (int i = 0; i < f.n_phi; ++i) out.at(j, i) = f.at(l, j, i);
  }
  return out;
}

/// The d-homogeneous extension r^d g(theta, phi); its restriction to the
/// outermost shell at r = 1 reproduces g exactly.
inline HalfBallField homogeneous_extension(const ScalarField& g_sphere, double d,
                                           const HalfBallGrid& grid) {
  if (d < 0.0) throw ValidationError("homogeneous_extension: d must be >= 0");
  require_same_grid(g_sphere, grid.sphere);
  HalfBallField out = make_ball_field(grid);
  for (int l = 0; l < out.n_r; ++l) {
    const double rd = std::pow(grid.r[l], d);
    for (int j = 0; j < out.n_theta; ++j) {
      for (int i = 0; i < out.n_phi; ++i) out.at(l, j, i) = rd * g_sphere.at(j, i);
    }
  }
  return out;
}

/// Reflection across aligned plane m applied shell-wise (exact permutation).
inline HalfBallField reflect_ball_field(const HalfBallField& f, const HalfBallGrid& g, int m) {
  require_same_grid(f, g);
  HalfBallField out = f;
  for (int l = 0; l < f.n_r; ++l) {
    for (int j = 0; j < f.n_theta; ++j) {
      for (int i = 0; i < f.n_phi; ++i) out.at(l, j, i) = f.at(l, j, g.sphere.reflect_index(i, m));
    }
  }
  return out;
}

}  // namespace cslab
