#pragma once

// Pivot-algorithm Markov chain on N-step upper half-plane walks.
//
// PivotChain keeps the walk in an internal frame: real = frame(u) + shift,
// with one global lattice isometry. A pivot move is applied to whichever
// side of the pivot is shorter (rotating the head by the inverse map and
// composing the frame is the same real move), so an accepted move costs
// O(min(j, N - j)) hash updates. Per-block bounding boxes of the internal
// coordinates give O(1) access to the tail extent for the half-plane test.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hsaw/lattice.hpp"
#include "hsaw/occupancy.hpp"
#include "hsaw/symmetry.hpp"

namespace hsaw {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How pivot indices are drawn. `uniform`: j uniform on {1, ..., N-1}.
/// `mixed`: with probability 1/2 uniform, otherwise j = floor(N^U) for U
/// uniform on [0, 1), which concentrates attempts near the root. The law of
/// j does not depend on the walk, so the proposal stays symmetric.
enum class PivotSites { uniform, mixed };

struct ChainConfig {
  std::size_t steps = 1000;
  /// Pivot attempts before the first sample; defaults to 10 * steps.
  std::optional<std::uint64_t> warmup_iterations;
  std::uint64_t stride = 100;
  /// Samples emitted by each chain.
  std::uint64_t total_samples = 1000;
  std::uint64_t seed = 1;
  std::size_t chains = 1;
  PivotSites pivot_sites = PivotSites::uniform;

  std::uint64_t warmup() const { return warmup_iterations.value_or(10 * static_cast<std::uint64_t>(steps)); }

  void validate() const {
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (steps > (std::size_t{1} << 28)) throw ConfigError("steps too large");
    if (stride < 1) throw ConfigError("stride must be >= 1");
    if (total_samples < 1) throw ConfigError("samples must be >= 1");
    if (chains < 1) throw ConfigError("chains must be >= 1");
  }
};

using ChainRng = std::mt19937_64;

/// Independent deterministic stream for chain `chain` of a run seeded with `seed`.
inline ChainRng chain_rng(std::uint64_t seed, std::uint64_t chain) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain), static_cast<std::uint32_t>(chain >> 32),
                    0x68736177u};
  return ChainRng(seq);
}

struct PivotMove {
  std::size_t pivot = 1;
  LatticeSymmetry symmetry;
};

/// Pivot index drawn per `sites`, symmetry uniform on the seven
/// non-identity elements. Empty for N < 2, where no move exists.
template <typename Rng>
std::optional<PivotMove> draw_move(std::size_t n_steps, Rng& rng, PivotSites sites = PivotSites::uniform) {
  if (n_steps < 2) return std::nullopt;
  std::uniform_int_distribution<std::uint64_t> pick_pivot(1, n_steps - 1);
  std::uniform_int_distribution<int> pick_symmetry(0, 6);
  PivotMove mv;
  if (sites == PivotSites::mixed && std::uniform_int_distribution<int>(0, 1)(rng) == 1) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto j = static_cast<std::uint64_t>(std::exp(u * std::log(static_cast<double>(n_steps))));
    mv.pivot = static_cast<std::size_t>(std::clamp<std::uint64_t>(j, 1, n_steps - 1));
  } else {
    mv.pivot = static_cast<std::size_t>(pick_pivot(rng));
  }
  mv.symmetry = LatticeSymmetry::proposals()[static_cast<std::size_t>(pick_symmetry(rng))];
  return mv;
}

/// The straight vertical rod (0,0), (0,1), ..., (0,N).
inline HalfPlaneWalk initial_walk(std::size_t n_steps) {
  if (n_steps < 1) throw ConfigError("initial_walk requires N >= 1");
  std::vector<LatticePoint> sites(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) sites[i] = {0, static_cast<std::int64_t>(i)};
  return HalfPlaneWalk::trusted(Walk::trusted(std::move(sites)));
}

/// Reference pivot proposal: apply `g` to the sites after `pivot` about the
/// pivot site. Empty if the result leaves the half-plane or self-intersects.
inline std::optional<HalfPlaneWalk> propose_pivot(const HalfPlaneWalk& w, std::size_t pivot,
                                                  LatticeSymmetry g) {
  const auto src = w.sites();
  if (pivot == 0 || pivot >= w.steps()) return std::nullopt;
  std::vector<LatticePoint> out(src.begin(), src.end());
  const LatticePoint p = src[pivot];
  for (std::size_t k = pivot + 1; k < src.size(); ++k) {
    out[k] = g(src[k] - p) + p;
    if (out[k].y <= 0) return std::nullopt;
  }
  std::unordered_set<LatticePoint, LatticePointHash> seen(out.begin(), out.end());
  if (seen.size() != out.size()) return std::nullopt;
  return HalfPlaneWalk::trusted(Walk::trusted(std::move(out)));
}

/// One reference pivot step on an explicit walk (O(N)). Draws from `rng`
/// exactly as PivotChain::step does, so both follow the same trajectory.
template <typename Rng>
std::pair<HalfPlaneWalk, bool> pivot_step(const HalfPlaneWalk& w, Rng& rng, PivotSites sites = PivotSites::uniform) {
  const auto mv = draw_move(w.steps(), rng, sites);
  if (!mv) return {w, false};
  auto proposal = propose_pivot(w, mv->pivot, mv->symmetry);
  if (!proposal) return {w, false};
  return {std::move(*proposal), true};
}

class PivotChain {
 public:
  explicit PivotChain(std::size_t n_steps) : PivotChain(initial_walk(n_steps)) {}

  explicit PivotChain(const HalfPlaneWalk& start) : n_(start.steps()) {
    const auto s = start.sites();
    ux_.resize(n_ + 1);
    uy_.resize(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) {
      if (s[i].x > kCoordLimit || s[i].x < -kCoordLimit || s[i].y > kCoordLimit) {
        throw std::out_of_range("start walk exceeds the sampler's coordinate range");
      }
      ux_[i] = static_cast<std::int32_t>(s[i].x);
      uy_[i] = static_cast<std::int32_t>(s[i].y);
    }
    rebuild();
  }

  std::size_t steps() const { return n_; }
  std::uint64_t attempts() const { return attempts_; }
  std::uint64_t accepted() const { return accepted_; }

  /// Draw a move from `rng` and attempt it.
  template <typename Rng>
  bool step(Rng& rng, PivotSites sites = PivotSites::uniform) {
    const auto mv = draw_move(n_, rng, sites);
    if (!mv) {
      ++attempts_;
      return false;
    }
    return attempt(mv->pivot, mv->symmetry);
  }

  /// Apply `g` (real frame) to the sites after `pivot`, about the pivot
  /// site. Returns whether the proposal was accepted.
  bool attempt(std::size_t pivot, LatticeSymmetry g) {
    ++attempts_;
    if (pivot == 0 || pivot >= n_) return false;
    const std::int32_t pjx = ux_[pivot];
    const std::int32_t pjy = uy_[pivot];
    const LatticePoint pivot_real = site(pivot);

    // Lowest real height of the rotated tail, from the tail's bounding box.
    const LatticeSymmetry m = g * frame_;
    const Box tail = tail_box(pivot);
    const std::int64_t lowest = pivot_real.y +
                                min_linear(m.yx(), tail.minx - pjx, tail.maxx - pjx) +
                                min_linear(m.yy(), tail.miny - pjy, tail.maxy - pjy);
    if (lowest <= 0) return false;

    const LatticeSymmetry h = frame_.inverse() * g * frame_;
    if (n_ - pivot <= pivot) {
      if (!try_move_tail(pivot, h)) return false;
    } else {
      if (!try_move_head(pivot, h.inverse())) return false;
      // frame' = A o frame with A(p) = g(p - pivot_real) + pivot_real.
      const LatticePoint shifted = g(LatticePoint{tx_, ty_} - pivot_real) + pivot_real;
      frame_ = g * frame_;
      tx_ = shifted.x;
      ty_ = shifted.y;
    }
    ++accepted_;
    maybe_recentre();
    return true;
  }

  LatticePoint site(std::size_t i) const {
    std::int64_t x = 0, y = 0;
    frame_.apply<std::int64_t>(ux_[i], uy_[i], x, y);
    return {x + tx_, y + ty_};
  }

  void write_sites(std::vector<LatticePoint>& out) const {
    out.resize(n_ + 1);
    const std::int64_t a = frame_.xx(), b = frame_.xy(), c = frame_.yx(), d = frame_.yy();
    for (std::size_t i = 0; i <= n_; ++i) {
      const std::int64_t x = ux_[i], y = uy_[i];
      out[i] = {a * x + b * y + tx_, c * x + d * y + ty_};
    }
  }

  HalfPlaneWalk snapshot() const {
    std::vector<LatticePoint> sites;
    write_sites(sites);
    return HalfPlaneWalk::trusted(Walk::trusted(std::move(sites)));
  }

  /// Full O(N) audit: real walk is a rooted half-plane SAW and the
  /// occupancy map and bounding boxes agree with the site arrays.
  bool check_invariants() const {
    std::vector<LatticePoint> sites;
    write_sites(sites);
    if (!in_upper_half_plane(sites)) return false;
    for (std::size_t i = 1; i < sites.size(); ++i) {
      if (!is_unit_step(sites[i] - sites[i - 1])) return false;
    }
    if (occupancy_.size() != n_ + 1) return false;
    for (std::size_t i = 0; i <= n_; ++i) {
      if (occupancy_.find(ux_[i], uy_[i]) != static_cast<std::int32_t>(i)) {
        return false;
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      Box expect;
      for (std::size_t k = j + 1; k <= n_; ++k) expect.add(ux_[k], uy_[k]);
      const Box got = tail_box(j);
      if (!(got == expect)) return false;
      if (n_ > 4096 && j > 64) j += 997;  // sparse audit for long walks
    }
    return true;
  }

 private:
  static constexpr unsigned kBlockShift = 8;
  static constexpr std::size_t kBlock = std::size_t{1} << kBlockShift;
  static constexpr std::int64_t kCoordLimit = std::int64_t{1} << 29;

  struct Box {
    std::int32_t minx = std::numeric_limits<std::int32_t>::max();
    std::int32_t maxx = std::numeric_limits<std::int32_t>::min();
    std::int32_t miny = std::numeric_limits<std::int32_t>::max();
    std::int32_t maxy = std::numeric_limits<std::int32_t>::min();

    void add(std::int32_t x, std::int32_t y) {
      minx = std::min(minx, x);
      maxx = std::max(maxx, x);
      miny = std::min(miny, y);
      maxy = std::max(maxy, y);
    }
    void add(const Box& o) {
      minx = std::min(minx, o.minx);
      maxx = std::max(maxx, o.maxx);
      miny = std::min(miny, o.miny);
      maxy = std::max(maxy, o.maxy);
    }
    bool operator==(const Box&) const = default;
  };

  // min over d in [lo, hi] of coeff * d, coeff in {-1, 0, 1}.
  static std::int64_t min_linear(int coeff, std::int64_t lo, std::int64_t hi) {
    if (coeff > 0) return lo;
    if (coeff < 0) return -hi;
    return 0;
  }

  Box tail_box(std::size_t pivot) const {
    const std::size_t i = pivot + 1;
    Box b = in_block_[i];
    b.add(block_suffix_[(i >> kBlockShift) + 1]);
    return b;
  }

  bool try_move_tail(std::size_t pivot, LatticeSymmetry h) {
    const std::int32_t pjx = ux_[pivot], pjy = uy_[pivot];
    scratch_.clear();
    for (std::size_t k = pivot + 1; k <= n_; ++k) {
      std::int32_t nx = 0, ny = 0;
      h.apply<std::int32_t>(ux_[k] - pjx, uy_[k] - pjy, nx, ny);
      nx += pjx;
      ny += pjy;
      const std::int32_t hit = occupancy_.find(nx, ny);
      if (hit != detail::OccupancyMap::kAbsent && static_cast<std::size_t>(hit) < pivot) return false;
      scratch_.emplace_back(nx, ny);
    }
    for (std::size_t k = pivot + 1; k <= n_; ++k) {
      occupancy_.erase(ux_[k], uy_[k]);
    }
    for (std::size_t k = pivot + 1, m = 0; k <= n_; ++k, ++m) {
      ux_[k] = scratch_[m].first;
      uy_[k] = scratch_[m].second;
      occupancy_.insert(ux_[k], uy_[k], static_cast<std::int32_t>(k));
    }
    refresh_blocks((pivot + 1) >> kBlockShift, n_ >> kBlockShift);
    return true;
  }

  bool try_move_head(std::size_t pivot, LatticeSymmetry hinv) {
    const std::int32_t pjx = ux_[pivot], pjy = uy_[pivot];
    scratch_.clear();
    for (std::size_t i = pivot; i-- > 0;) {
      std::int32_t nx = 0, ny = 0;
      hinv.apply<std::int32_t>(ux_[i] - pjx, uy_[i] - pjy, nx, ny);
      nx += pjx;
      ny += pjy;
      const std::int32_t hit = occupancy_.find(nx, ny);
      if (hit != detail::OccupancyMap::kAbsent && static_cast<std::size_t>(hit) > pivot) return false;
      scratch_.emplace_back(nx, ny);
    }
    for (std::size_t i = 0; i < pivot; ++i) {
      occupancy_.erase(ux_[i], uy_[i]);
    }
    for (std::size_t i = pivot, m = 0; i-- > 0; ++m) {
      ux_[i] = scratch_[m].first;
      uy_[i] = scratch_[m].second;
      occupancy_.insert(ux_[i], uy_[i], static_cast<std::int32_t>(i));
    }
    refresh_blocks(0, (pivot - 1) >> kBlockShift);
    return true;
  }

  void refresh_blocks(std::size_t first, std::size_t last) {
    for (std::size_t b = first; b <= last; ++b) {
      const std::size_t start = b << kBlockShift;
      const std::size_t end = std::min(n_, start + kBlock - 1);
      Box acc;
      for (std::size_t i = end + 1; i-- > start;) {
        acc.add(ux_[i], uy_[i]);
        in_block_[i] = acc;
      }
    }
    for (std::size_t b = last + 1; b-- > 0;) {
      Box acc = in_block_[b << kBlockShift];
      acc.add(block_suffix_[b + 1]);
      block_suffix_[b] = acc;
    }
  }

  void rebuild() {
    occupancy_.reset(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) {
      occupancy_.insert(ux_[i], uy_[i], static_cast<std::int32_t>(i));
    }
    if (occupancy_.size() != n_ + 1) throw MalformedWalk("start walk is not self-avoiding");
    const std::size_t blocks = (n_ >> kBlockShift) + 1;
    in_block_.assign(n_ + 2, Box{});
    block_suffix_.assign(blocks + 1, Box{});
    refresh_blocks(0, blocks - 1);
  }

  void maybe_recentre() {
    const Box& all = block_suffix_[0];
    if (all.minx > -kCoordLimit && all.maxx < kCoordLimit && all.miny > -kCoordLimit &&
        all.maxy < kCoordLimit) {
      return;
    }
    const std::int32_t sx = ux_[0], sy = uy_[0];
    for (std::size_t i = 0; i <= n_; ++i) {
      ux_[i] -= sx;
      uy_[i] -= sy;
    }
    const LatticePoint moved = frame_(LatticePoint{sx, sy});
    tx_ += moved.x;
    ty_ += moved.y;
    rebuild();
  }

  std::size_t n_ = 0;
  std::vector<std::int32_t> ux_, uy_;
  LatticeSymmetry frame_;
  std::int64_t tx_ = 0, ty_ = 0;
  detail::OccupancyMap occupancy_;
  std::vector<Box> in_block_;      // box of sites [i, end of i's block]
  std::vector<Box> block_suffix_;  // box of blocks [b, last]
  std::vector<std::pair<std::int32_t, std::int32_t>> scratch_;
  std::uint64_t attempts_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Runs warmup, then emits one snapshot every `stride` attempts until
/// `total_samples` have been emitted. `sink(iteration, walk)` receives the
/// attempt count and the current walk. Deterministic in (config, chain).
template <typename Sink>
void sample_chain(const ChainConfig& config, std::size_t chain_index, Sink&& sink) {
  config.validate();
  auto rng = chain_rng(config.seed, chain_index);
  PivotChain chain(config.steps);
  const std::uint64_t warmup = config.warmup();
  for (std::uint64_t i = 0; i < warmup; ++i) chain.step(rng, config.pivot_sites);
  std::uint64_t iteration = warmup;
  std::vector<LatticePoint> buffer;
  for (std::uint64_t s = 0; s < config.total_samples; ++s) {
    for (std::uint64_t i = 0; i < config.stride; ++i) chain.step(rng, config.pivot_sites);
    iteration += config.stride;
    chain.write_sites(buffer);
    HalfPlaneWalk snap = HalfPlaneWalk::trusted(Walk::trusted(std::move(buffer)));
    assert(in_upper_half_plane(snap.sites()) && is_self_avoiding(snap.sites()));
    sink(iteration, static_cast<const HalfPlaneWalk&>(snap));
    buffer = std::move(snap).release_sites();
  }
}

}  // namespace hsaw
