#pragma once

// Weighted estimators over sample records: histograms with batch-means
// errors, the log-log boundary-exponent fit, weighted empirical CDFs,
// Kolmogorov-Smirnov distances and the stability diagnostic for Y_n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hsaw/bridges.hpp"
#include "hsaw/constants.hpp"
#include "hsaw/enumeration.hpp"
#include "hsaw/sle.hpp"

namespace hsaw {

enum class Field { exit_x, rightmost };
enum class Weighting { ensemble, uniform };

inline double field_value(const SampleRecord& r, Field f) { return f == Field::exit_x ? r.exit_x : r.rightmost; }
inline double record_weight(const SampleRecord& r, Weighting w) { return w == Weighting::ensemble ? r.weight : 1.0; }

// ---------------------------------------------------------------------------
// Histograms

struct HistogramSpec {
  double lo = -3.0;
  double hi = 3.0;
  std::size_t bins = 60;

  double dx() const { return (hi - lo) / static_cast<double>(bins); }
  double bin_lo(std::size_t b) const { return lo + static_cast<double>(b) * dx(); }
  double bin_mid(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * dx(); }

  void validate() const {
    if (!(lo < hi)) throw std::invalid_argument("histogram range must satisfy lo < hi");
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  }

  /// Bin b with lo + b dx <= x < lo + (b + 1) dx, or bins when out of range.
  std::size_t bin_of(double x) const {
    if (!(x >= lo) || !(x < hi)) return bins;
    auto b = static_cast<std::size_t>(std::floor((x - lo) / dx()));
    // Guard against rounding at bin edges.
    if (b >= bins) b = bins - 1;
    if (x < bin_lo(b)) --b;
    else if (b + 1 < bins && x >= bin_lo(b + 1)) ++b;
    return b;
  }

  bool operator==(const HistogramSpec&) const = default;
};

class WeightedHistogram {
 public:
  explicit WeightedHistogram(HistogramSpec spec = {}) : spec_(spec) {
    spec_.validate();
    weight_sums_.assign(spec_.bins, 0.0);
    counts_.assign(spec_.bins, 0);
  }

  void add(double x, double w) {
    if (!(w >= 0)) throw std::invalid_argument("histogram weights must be nonnegative");
    total_weight_ += w;
    ++count_;
    const std::size_t b = spec_.bin_of(x);
    if (b == spec_.bins) return;
    weight_sums_[b] += w;
    ++counts_[b];
  }

  /// Bin-wise sums; both histograms must share a spec.
  WeightedHistogram& merge(const WeightedHistogram& other) {
    if (!(other.spec_ == spec_)) throw std::invalid_argument("cannot merge histograms with different specs");
    for (std::size_t b = 0; b < spec_.bins; ++b) {
      weight_sums_[b] += other.weight_sums_[b];
      counts_[b] += other.counts_[b];
    }
    total_weight_ += other.total_weight_;
    count_ += other.count_;
    return *this;
  }

  const HistogramSpec& spec() const { return spec_; }
  const std::vector<double>& weight_sums() const { return weight_sums_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  double total_weight() const { return total_weight_; }
  std::uint64_t count() const { return count_; }

  /// weight_sum / (total_weight dx); zero for an empty histogram.
  double normalized_density(std::size_t b) const {
    return total_weight_ > 0 ? weight_sums_[b] / (total_weight_ * spec_.dx()) : 0.0;
  }

  std::vector<double> normalized_densities() const {
    std::vector<double> out(spec_.bins);
    for (std::size_t b = 0; b < spec_.bins; ++b) out[b] = normalized_density(b);
    return out;
  }

 private:
  HistogramSpec spec_;
  std::vector<double> weight_sums_;
  std::vector<std::uint64_t> counts_;
  double total_weight_ = 0.0;
  std::uint64_t count_ = 0;
};

inline WeightedHistogram weighted_histogram(std::span<const SampleRecord> records, const HistogramSpec& spec,
                                            Field field, Weighting weighting = Weighting::ensemble) {
  WeightedHistogram h(spec);
  for (const auto& r : records) h.add(field_value(r, field), record_weight(r, weighting));
  return h;
}

/// Standard error of each normalized density from K batch histograms of
/// consecutive samples (batch means for the ratio estimator
/// W_b / W): se^2 = K/(K-1) sum_k (W_k/W)^2 (p_k - p)^2, divided by dx.
inline std::vector<double> batch_standard_errors(std::span<const WeightedHistogram> batches) {
  if (batches.size() < 2) throw std::invalid_argument("batch standard errors need at least two batches");
  WeightedHistogram all(batches.front().spec());
  for (const auto& b : batches) all.merge(b);
  const auto& spec = all.spec();
  const double k = static_cast<double>(batches.size());
  std::vector<double> se(spec.bins, 0.0);
  if (all.total_weight() <= 0) return se;
  for (std::size_t bin = 0; bin < spec.bins; ++bin) {
    const double p = all.weight_sums()[bin] / all.total_weight();
    double acc = 0.0;
    for (const auto& b : batches) {
      if (b.total_weight() <= 0) continue;
      const double share = b.total_weight() / all.total_weight();
      const double pk = b.weight_sums()[bin] / b.total_weight();
      acc += share * share * (pk - p) * (pk - p);
    }
    se[bin] = std::sqrt(acc * k / (k - 1.0)) / spec.dx();
  }
  return se;
}

// ---------------------------------------------------------------------------
// Log-log fit

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t n_points = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<double> log_x;  // log cosh^-2(pi x_mid / 2)
  std::vector<double> log_y;  // log weight_sum
};

/// Unweighted least squares of log(bin weight sum) against
/// log(cosh^-2(pi x_mid / 2)) over nonempty bins whose centre lies in
/// [x_lo, x_hi]. The slope estimates b.
inline FitResult loglog_fit(const WeightedHistogram& h, double x_lo, double x_hi) {
  if (!(x_lo < x_hi)) throw std::invalid_argument("fit window must satisfy lo < hi");
  const auto& spec = h.spec();
  const double eps = 1e-9 * spec.dx();
  FitResult fit;
  fit.window_lo = x_lo;
  fit.window_hi = x_hi;
  for (std::size_t b = 0; b < spec.bins; ++b) {
    const double mid = spec.bin_mid(b);
    if (mid < x_lo - eps || mid > x_hi + eps) continue;
    const double w = h.weight_sums()[b];
    if (!(w > 0)) continue;
    fit.log_x.push_back(-2.0 * log_cosh(kPi * mid / 2.0));
    fit.log_y.push_back(std::log(w));
  }
  if (fit.log_x.size() < 2) throw std::invalid_argument("log-log fit needs at least two nonempty bins in the window");
  const LineFit f = least_squares(fit.log_x, fit.log_y);
  fit.slope = f.slope;
  fit.intercept = f.intercept;
  fit.residual_rms = f.residual_rms;
  fit.n_points = fit.log_x.size();
  return fit;
}

// ---------------------------------------------------------------------------
// Empirical CDFs

/// F(xi) = sum of weights of values strictly below xi, over the total weight.
class WeightedEcdf {
 public:
  WeightedEcdf(std::vector<double> values, std::vector<double> weights) {
    if (values.empty()) throw std::invalid_argument("empirical CDF of an empty sample");
    if (values.size() != weights.size()) throw std::invalid_argument("values and weights differ in length");
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Ties broken by weight so the running sums do not depend on input order.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b] || (values[a] == values[b] && weights[a] < weights[b]);
    });
    double run = 0.0;
    for (std::size_t i : order) {
      if (!(weights[i] >= 0)) throw std::invalid_argument("weights must be nonnegative");
      if (!points_.empty() && points_.back() == values[i]) {
        run += weights[i];
        cumulative_.back() = run;
        continue;
      }
      run += weights[i];
      points_.push_back(values[i]);
      cumulative_.push_back(run);
    }
    total_ = run;
    if (!(total_ > 0)) throw std::invalid_argument("empirical CDF needs positive total weight");
  }

  double operator()(double xi) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), xi);
    if (it == points_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1] / total_;
  }

  /// Value just to the right of xi, i.e. the weight at or below xi.
  double right_limit(double xi) const {
    const auto it = std::upper_bound(points_.begin(), points_.end(), xi);
    if (it == points_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1] / total_;
  }

  const std::vector<double>& jump_points() const { return points_; }
  double total_weight() const { return total_; }

 private:
  std::vector<double> points_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

inline WeightedEcdf weighted_ecdf(std::span<const SampleRecord> records, Field field,
                                  Weighting weighting = Weighting::ensemble) {
  std::vector<double> v, w;
  v.reserve(records.size());
  w.reserve(records.size());
  for (const auto& r : records) {
    v.push_back(field_value(r, field));
    w.push_back(record_weight(r, weighting));
  }
  return WeightedEcdf(std::move(v), std::move(w));
}

struct KsResult {
  double distance = 0.0;
  double location = 0.0;
};

/// sup |f - g| over the grid and over the jumps of f inside the grid range,
/// taking both one-sided values of f at each jump.
template <typename Cdf>
KsResult ks_distance(const WeightedEcdf& f, const Cdf& g, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("ks_distance needs a nonempty grid");
  KsResult r{-1.0, grid.front()};
  auto consider = [&](double x, double fx) {
    const double d = std::abs(fx - g(x));
    if (d > r.distance) r = {d, x};
  };
  for (double x : grid) consider(x, f(x));
  const double lo = grid.front();
  const double hi = grid.back();
  const auto& pts = f.jump_points();
  for (auto it = std::lower_bound(pts.begin(), pts.end(), lo); it != pts.end() && *it <= hi; ++it) {
    consider(*it, f(*it));
    consider(*it, f.right_limit(*it));
  }
  return r;
}

/// Two-sample Kolmogorov-Smirnov statistic of unweighted samples.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two-sample KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// KS distance between the laws of Y / n1^sigma and Y / n2^sigma.
inline double stability_diagnostic(std::span<const std::int64_t> heights_n1, std::span<const std::int64_t> heights_n2,
                                   double n1, double n2, double sigma = SleConstants::sigma) {
  if (heights_n1.empty() || heights_n2.empty()) throw std::invalid_argument("stability_diagnostic: empty sample");
  if (!(n1 > 0) || !(n2 > 0)) throw std::invalid_argument("stability_diagnostic: n must be positive");
  const double s1 = std::pow(n1, sigma);
  const double s2 = std::pow(n2, sigma);
  std::vector<double> a, b;
  a.reserve(heights_n1.size());
  b.reserve(heights_n2.size());
  for (auto y : heights_n1) a.push_back(static_cast<double>(y) / s1);
  for (auto y : heights_n2) b.push_back(static_cast<double>(y) / s2);
  return ks_two_sample(std::move(a), std::move(b));
}

inline double stability_diagnostic(std::span<const SampleRecord> records_n1, std::span<const SampleRecord> records_n2,
                                   double n1, double n2, double sigma = SleConstants::sigma) {
  std::vector<std::int64_t> a, b;
  for (const auto& r : records_n1) a.push_back(r.y_n);
  for (const auto& r : records_n2) b.push_back(r.y_n);
  return stability_diagnostic(a, b, n1, n2, sigma);
}

}  // namespace hsaw
