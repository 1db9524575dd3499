#pragma once

// Bridge points of a finite half-plane walk and the per-walk observables of
// the fixed irreducible bridge ensemble.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hsaw/constants.hpp"
#include "hsaw/lattice.hpp"

namespace hsaw {

/// Renewal indices j_1 < j_2 < ... of a walk and their heights.
struct BridgeDecomposition {
  std::vector<std::size_t> indices;
  std::vector<std::int64_t> heights;

  std::size_t size() const { return indices.size(); }
  bool operator==(const BridgeDecomposition&) const = default;
};

/// Indices 1 <= j < N where every earlier height is <= y(j) and every later
/// height is > y(j). The endpoint N is never reported: its status in the
/// continued walk is unknown.
inline BridgeDecomposition bridge_points(std::span<const LatticePoint> sites) {
  BridgeDecomposition d;
  if (sites.size() < 3) return d;
  const std::size_t n = sites.size() - 1;
  thread_local std::vector<std::int64_t> later_min;  // min y over (j, N]
  later_min.resize(n + 1);
  std::int64_t m = sites[n].y;
  for (std::size_t j = n; j-- > 0;) {
    later_min[j] = m;
    m = std::min(m, sites[j].y);
  }
  std::int64_t prefix_max = sites[0].y;
  for (std::size_t j = 1; j < n; ++j) {
    const std::int64_t y = sites[j].y;
    if (y >= prefix_max) {
      prefix_max = y;
      if (later_min[j] > y) {
        d.indices.push_back(j);
        d.heights.push_back(y);
      }
    }
  }
  return d;
}

inline BridgeDecomposition bridge_points(const HalfPlaneWalk& w) { return bridge_points(w.sites()); }

/// Y_n, or empty when the walk has fewer than n bridge points.
inline std::optional<std::int64_t> nth_bridge_height(const BridgeDecomposition& d, std::size_t n) {
  if (n < 1) throw std::invalid_argument("bridge number n must be >= 1");
  if (d.size() < n) return std::nullopt;
  return d.heights[n - 1];
}

/// Per-walk summary persisted by the sampler.
struct SampleRecord {
  std::uint64_t n = 0;
  std::int64_t y_n = 0;
  double exit_x = 0.0;     // Re w(s) / Y_n
  double rightmost = 0.0;  // max_{j <= s} Re w(j) / Y_n
  double weight = 0.0;     // Y_n^(-1/sigma)
};

inline double ensemble_weight(std::int64_t y_n, double sigma = SleConstants::sigma) {
  return std::pow(static_cast<double>(y_n), -1.0 / sigma);
}

/// Observables of the walk cut at its n-th bridge point s.
inline std::optional<SampleRecord> make_sample(std::span<const LatticePoint> sites,
                                               const BridgeDecomposition& d, std::size_t n,
                                               double sigma = SleConstants::sigma) {
  const auto y = nth_bridge_height(d, n);
  if (!y) return std::nullopt;
  const std::size_t s = d.indices[n - 1];
  std::int64_t right = sites[0].x;
  for (std::size_t j = 1; j <= s; ++j) right = std::max(right, sites[j].x);
  SampleRecord r;
  r.n = n;
  r.y_n = *y;
  const double scale = static_cast<double>(*y);
  r.exit_x = static_cast<double>(sites[s].x) / scale;
  r.rightmost = static_cast<double>(right) / scale;
  r.weight = ensemble_weight(*y, sigma);
  return r;
}

inline std::optional<SampleRecord> make_sample(const HalfPlaneWalk& w, std::size_t n,
                                               double sigma = SleConstants::sigma) {
  if (n < 1) throw std::invalid_argument("bridge number n must be >= 1");
  return make_sample(w.sites(), bridge_points(w), n, sigma);
}

}  // namespace hsaw
