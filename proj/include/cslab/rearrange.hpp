#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "cslab/scalar_field.hpp"

namespace cslab {

/// Index of the phi node nearest pi/2 (the symmetrization center).
inline int center_node(const HemisphereGrid& grid) {
  return static_cast<int>(std::floor(grid.n_phi / 4.0 + 0.5)) % grid.n_phi;
}

/// A polarizing half space whose boundary plane contains the y-axis. The plane
/// with axis angle pi*m/n_phi reflects phi_i to phi_{(m-i) mod n_phi}, so the
/// node set maps to itself. Orientation is fixed by requiring the center node
/// (phi = pi/2) inside H; for the one plane through the center itself the side
/// holding the center's clockwise neighbor is used, matching the tie-breaking
/// bias of the discrete rearrangement.
struct HalfSpaceThroughAxis {
  double normal_angle = 0.0;
  int plane_index = 0;  // m in {0, .., n_phi-1}
  int orientation = 1;  // +1: H = {sin(phi - axis) > 0}, -1: the opposite side
  int n_phi = 0;

  int reflect(int i) const {
    int r = (plane_index - i) % n_phi;
    return r < 0 ? r + n_phi : r;
  }
  /// -1, 0, +1: in the complement, on the plane, inside H.
  int side(int i) const {
    int t = (2 * i - plane_index) % (2 * n_phi);
    if (t < 0) t += 2 * n_phi;
    if (t == 0 || t == n_phi) return 0;
    return (t < n_phi ? 1 : -1) * orientation;
  }
};

inline HalfSpaceThroughAxis plane_from_index(const HemisphereGrid& grid, int m) {
  const int n = grid.n_phi;
  if (m < 0 || m >= n) throw ValidationError("plane index out of range");
  HalfSpaceThroughAxis h;
  h.plane_index = m;
  h.n_phi = n;
  h.orientation = 1;
  const int c = center_node(grid);
  int s = h.side(c);
  if (s == 0) {
    // plane through the center: take the side holding the clockwise neighbor
    s = h.side((c - 1 + n) % n);
  }
  h.orientation = s;  // re-orient so that side(center or its neighbor) == +1
  const double axis = M_PI * m / n;
  h.normal_angle = std::fmod(axis + h.orientation * 0.5 * M_PI + two_pi, two_pi);
  return h;
}

inline HalfSpaceThroughAxis plane_from_normal(const HemisphereGrid& grid, double normal_angle) {
  const double axis = std::fmod(normal_angle - 0.5 * M_PI + two_pi, M_PI);
  const double ticks = axis / (M_PI / grid.n_phi);
  const int m = static_cast<int>(std::round(ticks)) % grid.n_phi;
  if (std::abs(ticks - std::round(ticks)) > 1e-9) {
    throw ValidationError("half-space plane is not aligned to half the phi grid spacing");
  }
  auto h = plane_from_index(grid, m);
  // honor the caller's orientation; reject if it evicts the center node
  const double want = std::fmod(normal_angle + two_pi, two_pi);
  if (std::abs(want - h.normal_angle) > 1e-9 &&
      std::abs(std::abs(want - h.normal_angle) - M_PI) < 1e-9) {
    throw ValidationError("half space does not contain the symmetrization center phi = pi/2");
  }
  return h;
}

/// The full searched family: one plane per admissible axis angle pi*m/n_phi.
inline std::vector<HalfSpaceThroughAxis> aligned_half_spaces(const HemisphereGrid& grid) {
  std::vector<HalfSpaceThroughAxis> out;
  out.reserve(grid.n_phi);
  for (int m = 0; m < grid.n_phi; ++m) out.push_back(plane_from_index(grid, m));
  return out;
}

inline void require_nonnegative(const ScalarField& f, const char* who) {
  if (f.values.minCoeff() < 0.0) {
    throw ValidationError(std::string(who) + ": field must be nonnegative");
  }
}

/// Two-point rearrangement: per mirror pair the larger value moves to the H
/// side. Values are only compared and copied, never recombined.
inline ScalarField polarize(const ScalarField& f, const HemisphereGrid& grid,
                            const HalfSpaceThroughAxis& h) {
  require_same_grid(f, grid);
  require_nonnegative(f, "polarize");
  if (h.n_phi != grid.n_phi) throw ValidationError("polarize: half space built for another grid");
  ScalarField out = f;
  for (int j = 0; j < f.n_theta; ++j) {
    for (int i = 0; i < f.n_phi; ++i) {
      const int s = h.side(i);
      if (s == 0) continue;
      const double mine = f.at(j, i), theirs = f.at(j, h.reflect(i));
      out.at(j, i) = s > 0 ? std::max(mine, theirs) : std::min(mine, theirs);
    }
  }
  return out;
}

namespace detail {

/// Sorted-decreasing placement around a center node: rank 0 at the center,
/// then alternating clockwise/counterclockwise so the discrete level sets are
/// arcs centered there.
inline void symmetric_decreasing_arrangement(const double* row, double* out, int n, int center) {
  thread_local std::vector<double> sorted;
  sorted.assign(row, row + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  for (int r = 0; r < n; ++r) {
    const int t = (r + 1) / 2;
    int idx = (r % 2 == 1) ? center - t : center + t;
    idx %= n;
    if (idx < 0) idx += n;
    out[idx] = sorted[r];
  }
}

}  // namespace detail

/// Foliated Schwarz symmetrization: per theta level, the decreasing
/// rearrangement about phi = pi/2. The per-level multiset of values is
/// preserved exactly.
inline ScalarField foliated_schwarz(const ScalarField& f, const HemisphereGrid& grid) {
  require_same_grid(f, grid);
  require_nonnegative(f, "foliated_schwarz");
  ScalarField out = f;
  const int c = center_node(grid);
  for (int j = 0; j < f.n_theta; ++j) {
    detail::symmetric_decreasing_arrangement(&f.values[static_cast<Eigen::Index>(j) * f.n_phi],
                                             &out.values[static_cast<Eigen::Index>(j) * f.n_phi],
                                             f.n_phi, c);
  }
  return out;
}

struct PolarizationStep {
  int iter = 0;
  double distance = 0.0;
  std::optional<double> plane_normal_angle;  // empty on the initial row
};

struct PolarizationSequenceResult {
  ScalarField field;
  std::vector<PolarizationStep> trace;
  bool converged = false;
};

/// Greedy iterated polarization: each step applies the aligned half space
/// whose polarization is weighted-L2 closest to the direct symmetrization.
/// The distance sequence is nonincreasing; non-convergence within max_iter is
/// reported in the trace, not an error.
inline PolarizationSequenceResult polarization_sequence(const ScalarField& f,
                                                        const HemisphereGrid& grid, int max_iter,
                                                        double tol) {
  require_same_grid(f, grid);
  require_nonnegative(f, "polarization_sequence");
  if (tol <= 0.0) throw ValidationError("polarization_sequence: tol must be > 0");

  const ScalarField target = foliated_schwarz(f, grid);
  const int nt = f.n_theta, np = f.n_phi;

  auto dist2 = [&](const ScalarField& x) {
    double acc = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double w = grid.node_measure(j);
      double row = 0.0;
      for (int i = 0; i < np; ++i) {
        const double d = x.at(j, i) - target.at(j, i);
        row += d * d;
      }
      acc += w * row;
    }
    return acc;
  };

  const auto planes = aligned_half_spaces(grid);
  PolarizationSequenceResult res;
  res.field = f;
  double d2 = dist2(res.field);
  res.trace.push_back({0, std::sqrt(d2), std::nullopt});
  if (std::sqrt(d2) < tol) {
    res.converged = true;
    return res;
  }

  for (int it = 1; it <= max_iter; ++it) {
    double best = d2;
    int best_plane = -1;
    for (size_t p = 0; p < planes.size(); ++p) {
      const auto& h = planes[p];
      // distance change restricted to swapped mirror pairs
      double cand = d2;
      for (int j = 0; j < nt; ++j) {
        const double w = grid.node_measure(j);
        double delta = 0.0;
        for (int i = 0; i < np; ++i) {
          if (h.side(i) <= 0) continue;
          const int is = h.reflect(i);
          const double a = res.field.at(j, i), b = res.field.at(j, is);
          if (a >= b) continue;  // no swap on this pair
          const double tH = target.at(j, i), tC = target.at(j, is);
          delta += (b - tH) * (b - tH) + (a - tC) * (a - tC) - (a - tH) * (a - tH) -
                   (b - tC) * (b - tC);
        }
        cand += w * delta;
      }
      if (cand < best - 1e-300) {
        best = cand;
        best_plane = static_cast<int>(p);
      }
    }
    if (best_plane < 0) break;  // no plane strictly improves
    res.field = polarize(res.field, grid, planes[best_plane]);
    d2 = dist2(res.field);
    res.trace.push_back({it, std::sqrt(d2), planes[best_plane].normal_angle});
    if (std::sqrt(d2) < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace cslab
