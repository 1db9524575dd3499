#pragma once

// Walks on the square lattice Z^2: sites, unit steps, self-avoidance,
// half-plane and bridge predicates, concatenation and the U/D/L/R
// direction-string encoding used by the persistence layer.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace hsaw {

struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  constexpr LatticePoint operator+(LatticePoint o) const { return {x + o.x, y + o.y}; }
  constexpr LatticePoint operator-(LatticePoint o) const { return {x - o.x, y - o.y}; }
  constexpr bool operator==(const LatticePoint&) const = default;
};

struct LatticePointHash {
  std::size_t operator()(LatticePoint p) const noexcept {
    auto h = static_cast<std::uint64_t>(p.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(p.y) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Thrown when a site sequence contains a step that is not a unit lattice step.
class MalformedWalk : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by predicates that require a bridge as input.
class NotABridge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr LatticePoint kUp{0, 1};
inline constexpr LatticePoint kDown{0, -1};
inline constexpr LatticePoint kLeft{-1, 0};
inline constexpr LatticePoint kRight{1, 0};

constexpr bool is_unit_step(LatticePoint d) {
  return (d.x == 0 && (d.y == 1 || d.y == -1)) || (d.y == 0 && (d.x == 1 || d.x == -1));
}

inline void require_unit_steps(std::span<const LatticePoint> sites) {
  for (std::size_t i = 1; i < sites.size(); ++i) {
    if (!is_unit_step(sites[i] - sites[i - 1])) {
      throw MalformedWalk("non-unit step between sites " + std::to_string(i - 1) + " and " +
                          std::to_string(i));
    }
  }
}

/// True iff all sites are pairwise distinct. Throws MalformedWalk on a
/// non-unit step; a revisit is a normal `false`.
inline bool is_self_avoiding(std::span<const LatticePoint> sites) {
  require_unit_steps(sites);
  std::unordered_set<LatticePoint, LatticePointHash> seen;
  seen.reserve(sites.size() * 2);
  for (const auto& p : sites) {
    if (!seen.insert(p).second) return false;
  }
  return true;
}

/// A self-avoiding walk stored as its explicit site sequence. Immutable
/// after construction.
class Walk {
 public:
  Walk() : sites_{LatticePoint{}} {}

  /// Validates unit steps and self-avoidance.
  explicit Walk(std::vector<LatticePoint> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) throw MalformedWalk("a walk has at least one site");
    if (!is_self_avoiding(sites_)) throw MalformedWalk("sites are not self-avoiding");
  }

  /// Skips validation; for producers that maintain the invariants themselves.
  static Walk trusted(std::vector<LatticePoint> sites) {
    Walk w;
    w.sites_ = std::move(sites);
    return w;
  }

  std::span<const LatticePoint> sites() const { return sites_; }
  const LatticePoint& operator[](std::size_t i) const { return sites_[i]; }
  std::size_t steps() const { return sites_.size() - 1; }
  const LatticePoint& front() const { return sites_.front(); }
  const LatticePoint& back() const { return sites_.back(); }
  bool rooted() const { return sites_.front() == LatticePoint{}; }

  /// Moves the storage out, leaving the walk empty; lets samplers reuse buffers.
  std::vector<LatticePoint> release_sites() && { return std::move(sites_); }

  bool operator==(const Walk&) const = default;

 private:
  std::vector<LatticePoint> sites_;
};

/// True iff the walk starts at the origin and every later site has y > 0.
inline bool in_upper_half_plane(std::span<const LatticePoint> sites) {
  if (sites.empty() || sites.front() != LatticePoint{}) return false;
  for (std::size_t i = 1; i < sites.size(); ++i) {
    if (sites[i].y <= 0) return false;
  }
  return true;
}

/// A rooted walk whose sites after the root lie strictly above the real axis.
class HalfPlaneWalk {
 public:
  HalfPlaneWalk() = default;

  explicit HalfPlaneWalk(Walk w) : walk_(std::move(w)) {
    if (!in_upper_half_plane(walk_.sites())) {
      throw MalformedWalk("walk is not a rooted upper half-plane walk");
    }
  }

  static HalfPlaneWalk trusted(Walk w) {
    HalfPlaneWalk h;
    h.walk_ = std::move(w);
    return h;
  }

  const Walk& walk() const { return walk_; }
  std::span<const LatticePoint> sites() const { return walk_.sites(); }
  const LatticePoint& operator[](std::size_t i) const { return walk_[i]; }
  std::size_t steps() const { return walk_.steps(); }

  std::vector<LatticePoint> release_sites() && { return std::move(walk_).release_sites(); }

  bool operator==(const HalfPlaneWalk&) const = default;

 private:
  Walk walk_;
};

/// Bridge inequality y(0) < y(j) <= y(N) for j = 1..N. A zero-step walk is
/// not a bridge.
inline bool is_bridge(std::span<const LatticePoint> sites) {
  if (sites.size() < 2) return false;
  const auto y0 = sites.front().y;
  const auto yn = sites.back().y;
  for (std::size_t j = 1; j < sites.size(); ++j) {
    if (!(y0 < sites[j].y && sites[j].y <= yn)) return false;
  }
  return true;
}

inline bool is_bridge(const Walk& w) { return is_bridge(w.sites()); }
inline bool is_bridge(const HalfPlaneWalk& w) { return is_bridge(w.sites()); }

/// Interior split indices 0 < j < N at which a bridge factors into two
/// bridges. Assumes the input is a bridge. O(N).
inline std::vector<std::size_t> bridge_split_points(std::span<const LatticePoint> sites) {
  const std::size_t n = sites.size() - 1;
  std::vector<std::int64_t> suffix_min(n + 2, INT64_MAX);
  for (std::size_t i = n + 1; i-- > 0;) suffix_min[i] = std::min(suffix_min[i + 1], sites[i].y);
  std::vector<std::size_t> out;
  std::int64_t prefix_max = sites.front().y;
  for (std::size_t j = 1; j < n; ++j) {
    prefix_max = std::max(prefix_max, sites[j].y);
    if (sites[j].y == prefix_max && suffix_min[j + 1] > sites[j].y) out.push_back(j);
  }
  return out;
}

/// True iff the bridge cannot be written as the concatenation of two
/// shorter bridges. Throws NotABridge for non-bridge input.
inline bool is_irreducible(std::span<const LatticePoint> sites) {
  if (!is_bridge(sites)) throw NotABridge("is_irreducible requires a bridge");
  return bridge_split_points(sites).empty();
}

inline bool is_irreducible(const Walk& w) { return is_irreducible(w.sites()); }

/// w1 followed by w2 translated to start at w1's endpoint. The result is a
/// raw site sequence; self-avoidance is the caller's concern.
inline std::vector<LatticePoint> concatenate(std::span<const LatticePoint> w1,
                                             std::span<const LatticePoint> w2) {
  std::vector<LatticePoint> out(w1.begin(), w1.end());
  if (w2.empty()) return out;
  if (out.empty()) return {w2.begin(), w2.end()};
  const LatticePoint shift = out.back() - w2.front();
  out.reserve(w1.size() + w2.size() - 1);
  for (std::size_t i = 1; i < w2.size(); ++i) out.push_back(w2[i] + shift);
  return out;
}

inline std::vector<LatticePoint> concatenate(const Walk& w1, const Walk& w2) {
  return concatenate(w1.sites(), w2.sites());
}

// ---------------------------------------------------------------------------
// Direction strings

inline char step_char(LatticePoint d) {
  if (d == kUp) return 'U';
  if (d == kDown) return 'D';
  if (d == kLeft) return 'L';
  if (d == kRight) return 'R';
  throw MalformedWalk("non-unit step");
}

inline LatticePoint char_step(char c) {
  switch (c) {
    case 'U': return kUp;
    case 'D': return kDown;
    case 'L': return kLeft;
    case 'R': return kRight;
    default: throw MalformedWalk(std::string("unknown direction character '") + c + "'");
  }
}

/// Encodes the steps as U/D/L/R characters (no trailing newline).
inline std::string to_direction_string(std::span<const LatticePoint> sites) {
  std::string s;
  s.reserve(sites.empty() ? 0 : sites.size() - 1);
  for (std::size_t i = 1; i < sites.size(); ++i) s.push_back(step_char(sites[i] - sites[i - 1]));
  return s;
}

/// Decodes a direction string into a site sequence rooted at the origin. A
/// trailing newline is accepted.
inline std::vector<LatticePoint> sites_from_directions(std::string_view dirs) {
  if (!dirs.empty() && dirs.back() == '\n') dirs.remove_suffix(1);
  std::vector<LatticePoint> sites;
  sites.reserve(dirs.size() + 1);
  sites.push_back({});
  for (char c : dirs) sites.push_back(sites.back() + char_step(c));
  return sites;
}

inline Walk walk_from_directions(std::string_view dirs) {
  return Walk(sites_from_directions(dirs));
}

}  // namespace hsaw
