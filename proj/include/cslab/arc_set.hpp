#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cslab/errors.hpp"

namespace cslab {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// One half-open angular interval [lo, hi) inside [0, 2*pi).
struct Arc {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// A boundary-condition region on the equatorial circle: a sorted union of
/// pairwise disjoint half-open arcs. The empty set and the full circle are the
/// two degenerate extremes.
class ArcSet {
 public:
  ArcSet() = default;

  static ArcSet empty() { return ArcSet{}; }

  static ArcSet full_circle() { return ArcSet(std::vector<Arc>{{0.0, two_pi}}); }

  /// Validates disjointness, ordering and range.
  explicit ArcSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    std::sort(arcs_.begin(), arcs_.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
    double prev_hi = 0.0;
    bool first = true;
    for (const Arc& a : arcs_) {
      if (!(a.lo >= 0.0 && a.hi <= two_pi && a.lo < a.hi)) {
        throw ValidationError("ArcSet: arc [" + std::to_string(a.lo) + ", " + std::to_string(a.hi) +
                              ") out of range or empty");
      }
      if (!first && a.lo < prev_hi) {
        throw ValidationError("ArcSet: arcs overlap");
      }
      prev_hi = a.hi;
      first = false;
    }
  }

  const std::vector<Arc>& arcs() const { return arcs_; }
  bool is_empty() const { return arcs_.empty(); }

  double length() const {
    double total = 0.0;
    for (const Arc& a : arcs_) total += a.length();
    return total;
  }

  bool contains(double phi) const {
    for (const Arc& a : arcs_) {
      if (phi >= a.lo && phi < a.hi) return true;
    }
    return false;
  }

  /// Complement within [0, 2*pi). Endpoints are reused verbatim, so
  /// complement(complement(w)) == w holds exactly.
  ArcSet complement() const {
    std::vector<Arc> out;
    double cursor = 0.0;
    for (const Arc& a : arcs_) {
      if (a.lo > cursor) out.push_back({cursor, a.lo});
      cursor = a.hi;
    }
    if (cursor < two_pi) out.push_back({cursor, two_pi});
    ArcSet c;
    c.arcs_ = std::move(out);
    return c;
  }

  /// Snap every endpoint to the nearest node coordinate of a uniform phi grid
  /// with n_phi nodes. Arcs that collapse are dropped.
  ArcSet snapped_to(int n_phi) const {
    const double dphi = two_pi / n_phi;
    std::vector<Arc> out;
    for (const Arc& a : arcs_) {
      double lo = std::round(a.lo / dphi) * dphi;
      double hi = std::round(a.hi / dphi) * dphi;
      if (hi > lo) out.push_back({lo, std::min(hi, two_pi)});
    }
    return ArcSet(std::move(out));
  }

  bool operator==(const ArcSet& other) const {
    if (arcs_.size() != other.arcs_.size()) return false;
    for (size_t i = 0; i < arcs_.size(); ++i) {
      if (arcs_[i].lo != other.arcs_[i].lo || arcs_[i].hi != other.arcs_[i].hi) return false;
    }
    return true;
  }

 private:
  std::vector<Arc> arcs_;
};

/// The most connected region with k imposed symmetries: k arcs of length pi/k,
/// the i-th starting at (i-1)*2*pi/k. Total length pi; invariant under
/// rotation by 2*pi/k; every symmetrizing reflection maps it onto its
/// complement.
inline ArcSet canonical_omega_k(int k) {
  if (k < 1) throw ValidationError("canonical_omega_k: k must be >= 1, got " + std::to_string(k));
  std::vector<Arc> arcs;
  arcs.reserve(k);
  const double period = two_pi / k;
  for (int i = 0; i < k; ++i) {
    const double lo = i * period;
    arcs.push_back({lo, lo + 0.5 * period});
  }
  return ArcSet(std::move(arcs));
}

}  // namespace cslab
