#pragma once

// Exact backtracking enumeration of self-avoiding walks, bridges and
// irreducible bridges at small length, and the series quantities built on
// them: Kesten partial sums, truncated bridge-height generating functions,
// ratio estimates of the connective constant and survival-exponent fits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsaw/lattice.hpp"

namespace hsaw {

inline constexpr std::size_t kDefaultEnumerationCap = 16;

class CapExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_within_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw CapExceeded("enumeration length " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  }
}

namespace detail {

/// Dense occupancy grid for walks of at most `radius` steps from the origin.
class Grid {
 public:
  explicit Grid(std::size_t radius)
      : side_(2 * static_cast<std::int64_t>(radius) + 3), cells_(static_cast<std::size_t>(side_ * side_), 0) {}

  char& at(std::int64_t x, std::int64_t y) {
    const std::int64_t off = side_ / 2;
    return cells_[static_cast<std::size_t>((x + off) * side_ + (y + off))];
  }

 private:
  std::int64_t side_;
  std::vector<char> cells_;
};

inline constexpr LatticePoint kSteps[4] = {kUp, kDown, kLeft, kRight};

inline std::uint64_t count_from(Grid& g, LatticePoint p, std::size_t remaining) {
  if (remaining == 0) return 1;
  std::uint64_t total = 0;
  for (const auto d : kSteps) {
    const LatticePoint q = p + d;
    char& c = g.at(q.x, q.y);
    if (c) continue;
    c = 1;
    total += count_from(g, q, remaining - 1);
    c = 0;
  }
  return total;
}

}  // namespace detail

/// C_N, the number of N-step SAWs from the origin. Plain depth-first
/// search over all four first steps.
inline std::uint64_t count_saws(std::size_t n, std::size_t cap = kDefaultEnumerationCap) {
  require_within_cap(n, cap);
  detail::Grid g(n);
  g.at(0, 0) = 1;
  return detail::count_from(g, {0, 0}, n);
}

/// C_N using the four-fold rotation symmetry of the first step.
inline std::uint64_t count_saws_symmetric(std::size_t n, std::size_t cap = kDefaultEnumerationCap) {
  require_within_cap(n, cap);
  if (n == 0) return 1;
  detail::Grid g(n);
  g.at(0, 0) = 1;
  g.at(0, 1) = 1;
  return 4 * detail::count_from(g, kUp, n - 1);
}

// ---------------------------------------------------------------------------
// Bridges

/// Counts indexed by (length, height); both at most max_len.
struct EnumerationTable {
  std::size_t max_len = 0;
  std::vector<std::uint64_t> c_n;                     // c_n[L], L = 0..max_len
  std::vector<std::vector<std::uint64_t>> b_counts;   // b_counts[L][h]
  std::vector<std::vector<std::uint64_t>> i_counts;   // i_counts[L][h]

  std::uint64_t bridges(std::size_t len) const { return sum(b_counts.at(len)); }
  std::uint64_t irreducible(std::size_t len) const { return sum(i_counts.at(len)); }

 private:
  static std::uint64_t sum(const std::vector<std::uint64_t>& v) {
    std::uint64_t s = 0;
    for (auto x : v) s += x;
    return s;
  }
};

struct EnumeratedBridge {
  std::vector<LatticePoint> sites;
  std::int64_t height = 0;
  bool irreducible = false;
};

namespace detail {

/// Depth-first search over upper half-plane walks that can still end as a
/// bridge within max_len steps. Calls visit(depth, height, irreducible,
/// path) for every bridge prefix. Split candidates are kept on a stack:
/// sites that were a running maximum and whose later sites are all
/// strictly higher so far. Their heights are strictly increasing.
template <typename Visit>
class BridgeSearch {
 public:
  BridgeSearch(std::size_t max_len, Visit& visit)
      : max_len_(max_len), grid_(max_len), visit_(visit), heights_(max_len + 2, 0) {
    path_.reserve(max_len + 1);
  }

  void run() {
    if (max_len_ == 0) return;
    grid_.at(0, 0) = 1;
    path_.push_back({0, 0});
    extend({0, 1}, 0, 0);
  }

 private:
  void extend(LatticePoint q, std::int64_t running_max, std::size_t cand_size) {
    const std::size_t depth = path_.size();  // index of q
    // Drop candidates at or above the new height.
    std::size_t size = cand_size;
    while (size > 0 && heights_[size - 1] >= q.y) --size;
    const bool is_max = q.y >= running_max;
    const std::int64_t new_max = std::max(running_max, q.y);
    const bool irreducible = is_max && size == 0;

    grid_.at(q.x, q.y) = 1;
    path_.push_back(q);
    if (is_max) visit_(depth, q.y, irreducible, path_);

    // Pushing overwrites one slot above the surviving candidates; restore it on return.
    const std::int64_t saved_height = heights_[size];
    std::size_t next_size = size;
    if (is_max) {
      heights_[size] = q.y;
      next_size = size + 1;
    }

    if (depth < max_len_) {
      const std::size_t remaining = max_len_ - depth;
      for (const auto d : kSteps) {
        const LatticePoint r = q + d;
        if (r.y <= 0) continue;
        if (new_max - r.y > static_cast<std::int64_t>(remaining - 1)) continue;
        if (grid_.at(r.x, r.y)) continue;
        extend(r, new_max, next_size);
      }
    }

    heights_[size] = saved_height;
    path_.pop_back();
    grid_.at(q.x, q.y) = 0;
  }

  std::size_t max_len_;
  Grid grid_;
  Visit& visit_;
  std::vector<LatticePoint> path_;
  std::vector<std::int64_t> heights_;  // candidate split heights
};

}  // namespace detail

/// Bridge and irreducible-bridge counts for every length and height up to
/// max_len, plus C_N for the same lengths.
inline EnumerationTable enumerate_table(std::size_t max_len, std::size_t cap = kDefaultEnumerationCap) {
  require_within_cap(max_len, cap);
  EnumerationTable t;
  t.max_len = max_len;
  t.c_n.resize(max_len + 1);
  for (std::size_t len = 0; len <= max_len; ++len) t.c_n[len] = count_saws(len, cap);
  t.b_counts.assign(max_len + 1, std::vector<std::uint64_t>(max_len + 1, 0));
  t.i_counts = t.b_counts;
  auto visit = [&](std::size_t len, std::int64_t h, bool irreducible, const std::vector<LatticePoint>&) {
    ++t.b_counts[len][static_cast<std::size_t>(h)];
    if (irreducible) ++t.i_counts[len][static_cast<std::size_t>(h)];
  };
  detail::BridgeSearch<decltype(visit)> search(max_len, visit);
  search.run();
  return t;
}

/// All N-step bridges from the origin with their heights.
inline std::vector<EnumeratedBridge> enumerate_bridges(std::size_t n, std::size_t cap = kDefaultEnumerationCap) {
  require_within_cap(n, cap);
  std::vector<EnumeratedBridge> out;
  auto visit = [&](std::size_t len, std::int64_t h, bool irreducible, const std::vector<LatticePoint>& path) {
    if (len == n) out.push_back({path, h, irreducible});
  };
  detail::BridgeSearch<decltype(visit)> search(n, visit);
  search.run();
  return out;
}

/// All N-step irreducible bridges from the origin.
inline std::vector<EnumeratedBridge> enumerate_irreducible(std::size_t n, std::size_t cap = kDefaultEnumerationCap) {
  auto all = enumerate_bridges(n, cap);
  std::erase_if(all, [](const EnumeratedBridge& b) { return !b.irreducible; });
  return all;
}

/// All N-step upper half-plane walks from the origin, in depth-first order.
inline std::vector<std::vector<LatticePoint>> enumerate_halfplane(std::size_t n,
                                                                  std::size_t cap = kDefaultEnumerationCap) {
  require_within_cap(n, cap);
  std::vector<std::vector<LatticePoint>> out;
  detail::Grid g(n);
  std::vector<LatticePoint> path{{0, 0}};
  g.at(0, 0) = 1;
  auto rec = [&](auto&& self) -> void {
    if (path.size() == n + 1) {
      out.push_back(path);
      return;
    }
    for (const auto d : detail::kSteps) {
      const LatticePoint q = path.back() + d;
      if (q.y <= 0 || g.at(q.x, q.y)) continue;
      g.at(q.x, q.y) = 1;
      path.push_back(q);
      self(self);
      path.pop_back();
      g.at(q.x, q.y) = 0;
    }
  };
  rec(rec);
  return out;
}

// ---------------------------------------------------------------------------
// Series quantities

struct KestenSums {
  double mu = 0.0;
  std::vector<double> increments;    // increments[L], L = 0..max_len
  std::vector<double> partial_sums;  // partial_sums[L] = sum of increments up to L
  double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

/// Sum over irreducible bridges of length <= max_len of mu^(-|w|).
inline KestenSums kesten_partial_sum(const EnumerationTable& table, std::size_t max_len, double mu) {
  if (max_len > table.max_len) throw CapExceeded("kesten_partial_sum: table too shallow");
  if (!(mu > 1.0)) throw std::invalid_argument("kesten_partial_sum: mu must exceed 1");
  KestenSums k;
  k.mu = mu;
  double running = 0.0;
  for (std::size_t len = 0; len <= max_len; ++len) {
    const double inc = static_cast<double>(table.irreducible(len)) * std::pow(mu, -static_cast<double>(len));
    running += inc;
    k.increments.push_back(inc);
    k.partial_sums.push_back(running);
  }
  return k;
}

inline KestenSums kesten_partial_sum(std::size_t max_len, double mu, std::size_t cap = kDefaultEnumerationCap) {
  return kesten_partial_sum(enumerate_table(max_len, cap), max_len, mu);
}

/// Truncated B_h(z): sum over bridges of height h and length <= max_len of z^|w|.
inline double bridge_height_gf(const EnumerationTable& table, std::int64_t h, double z, std::size_t max_len) {
  if (h < 1) throw std::invalid_argument("bridge_height_gf: height must be >= 1");
  if (max_len > table.max_len) throw CapExceeded("bridge_height_gf: table too shallow");
  double sum = 0.0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    if (static_cast<std::size_t>(h) >= table.b_counts[len].size()) continue;
    sum += static_cast<double>(table.b_counts[len][static_cast<std::size_t>(h)]) * std::pow(z, static_cast<double>(len));
  }
  return sum;
}

inline double bridge_height_gf(std::int64_t h, double z, std::size_t max_len,
                               std::size_t cap = kDefaultEnumerationCap) {
  return bridge_height_gf(enumerate_table(max_len, cap), h, z, max_len);
}

struct ConnectiveEstimate {
  double mu = 0.0;
  std::string method;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("least_squares: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / n);
  return f;
}

/// Extrapolates r_N = C_{N+1} / C_N linearly in 1/N to 1/N = 0, fitting
/// the upper half of the available ratios.
inline ConnectiveEstimate estimate_mu(const EnumerationTable& table) {
  if (table.max_len < 6 || table.c_n.size() < 7) throw std::invalid_argument("estimate_mu needs table depth >= 6");
  const std::size_t last = table.max_len - 1;  // ratios r_1 .. r_last
  const std::size_t first = std::max<std::size_t>(1, (last + 1) / 2);
  std::vector<double> x, y;
  for (std::size_t n = first; n <= last; ++n) {
    x.push_back(1.0 / static_cast<double>(n));
    y.push_back(static_cast<double>(table.c_n[n + 1]) / static_cast<double>(table.c_n[n]));
  }
  const LineFit f = least_squares(x, y);
  return {f.intercept, "linear fit of C_{N+1}/C_N against 1/N, N = " + std::to_string(first) + ".." +
                           std::to_string(last)};
}

// ---------------------------------------------------------------------------
// Survival exponent

struct TailFit {
  double p = 0.0;  // estimated exponent of P(h > h0) ~ h0^(-p)
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::vector<std::int64_t> thresholds;
  std::vector<double> survival;
};

struct TailFitOptions {
  double ratio = 1.25;              // spacing of successive thresholds
  std::size_t min_survivors = 100;  // stop once fewer heights exceed h0
  std::int64_t h_max = 0;           // 0 means no upper limit
};

/// Least-squares slope of log P(h > h0) against log h0 on log-spaced
/// integer thresholds h0 >= h_min. Returns p = -slope.
inline TailFit tail_exponent_estimate(std::vector<std::int64_t> heights, std::int64_t h_min,
                                      const TailFitOptions& opt = {}) {
  if (heights.empty()) throw std::invalid_argument("tail_exponent_estimate: no heights");
  if (h_min < 1) throw std::invalid_argument("tail_exponent_estimate: h_min must be >= 1");
  if (!(opt.ratio > 1.0)) throw std::invalid_argument("tail_exponent_estimate: ratio must exceed 1");
  std::sort(heights.begin(), heights.end());
  const double total = static_cast<double>(heights.size());
  TailFit fit;
  std::vector<double> lx, ly;
  double t = static_cast<double>(h_min);
  std::int64_t prev = 0;
  while (true) {
    const auto h0 = static_cast<std::int64_t>(std::llround(t));
    t *= opt.ratio;
    if (h0 == prev) continue;
    prev = h0;
    if (opt.h_max > 0 && h0 > opt.h_max) break;
    const auto above = static_cast<std::size_t>(heights.end() - std::upper_bound(heights.begin(), heights.end(), h0));
    if (above < std::max<std::size_t>(opt.min_survivors, 1)) break;
    fit.thresholds.push_back(h0);
    fit.survival.push_back(static_cast<double>(above) / total);
    lx.push_back(std::log(static_cast<double>(h0)));
    ly.push_back(std::log(fit.survival.back()));
  }
  if (lx.size() < 3) throw std::invalid_argument("tail_exponent_estimate: fewer than 3 usable thresholds");
  const LineFit f = least_squares(lx, ly);
  fit.p = -f.slope;
  fit.intercept = f.intercept;
  fit.residual_rms = f.residual_rms;
  return fit;
}

}  // namespace hsaw
