#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hsaw/sle.hpp"
#include "hsaw/stats.hpp"

using namespace hsaw;

namespace {

SampleRecord rec(double exit_x, double rightmost, double weight, std::int64_t y = 1) {
  SampleRecord r;
  r.n = 1;
  r.y_n = y;
  r.exit_x = exit_x;
  r.rightmost = rightmost;
  r.weight = weight;
  return r;
}

// Rejection sampler for rho from a Laplace envelope with rate 5 pi / 8:
// cosh(t)^(-5/4) <= 2^(5/4) e^(-5|t|/4), acceptance (1 + e^(-2|t|))^(-5/4).
double sample_rho(std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(5.0 * kPi / 8.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    const double x = expo(rng) * (u(rng) < 0.5 ? -1.0 : 1.0);
    if (u(rng) < std::pow(1.0 + std::exp(-kPi * std::abs(x)), -1.25)) return x;
  }
}

}  // namespace

TEST(Histogram, BinsAndWeights) {
  const HistogramSpec spec{-1.0, 1.0, 4};
  WeightedHistogram h(spec);
  h.add(0.1, 1.0);
  h.add(0.2, 3.0);
  h.add(5.0, 2.0);
  h.add(-1.0, 1.0);
  h.add(1.0, 1.0);
  EXPECT_DOUBLE_EQ(h.weight_sums()[2], 4.0);
  EXPECT_DOUBLE_EQ(h.weight_sums()[0], 1.0);
  EXPECT_DOUBLE_EQ(h.total_weight(), 8.0);
  EXPECT_EQ(h.count(), 5u);
  EXPECT_DOUBLE_EQ(h.normalized_density(2), 4.0 / (8.0 * 0.5));
  EXPECT_EQ(spec.bin_of(-0.5), 1u);
  EXPECT_EQ(spec.bin_of(1.0), 4u);
  EXPECT_EQ(spec.bin_of(std::nan("")), 4u);

  WeightedHistogram two(spec);
  two.add(0.3, 1.0);
  two.add(0.4, 3.0);
  EXPECT_DOUBLE_EQ(two.normalized_density(2) * spec.dx(), 1.0);
  EXPECT_THROW(two.add(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(WeightedHistogram(HistogramSpec{1.0, 0.0, 3}), std::invalid_argument);
}

TEST(Histogram, ConstantWeightsGiveTheUnweightedHistogram) {
  std::vector<SampleRecord> rs;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) rs.push_back(rec(g(rng), 0.0, 0.37));
  const auto w = weighted_histogram(rs, {}, Field::exit_x, Weighting::ensemble);
  const auto u = weighted_histogram(rs, {}, Field::exit_x, Weighting::uniform);
  for (std::size_t b = 0; b < 60; ++b) EXPECT_NEAR(w.normalized_density(b), u.normalized_density(b), 1e-12);
}

TEST(Histogram, MergeIsExactBinwiseSum) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(-4.0, 4.0), w(0.0, 1.0);
  std::vector<SampleRecord> a, b;
  for (int i = 0; i < 500; ++i) a.push_back(rec(x(rng), 0, w(rng)));
  for (int i = 0; i < 700; ++i) b.push_back(rec(x(rng), 0, w(rng)));
  auto ha = weighted_histogram(a, {}, Field::exit_x);
  const auto hb = weighted_histogram(b, {}, Field::exit_x);
  std::vector<SampleRecord> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const auto hab = weighted_histogram(ab, {}, Field::exit_x);
  ha.merge(hb);
  EXPECT_EQ(ha.counts(), hab.counts());
  EXPECT_EQ(ha.count(), hab.count());
  for (std::size_t k = 0; k < 60; ++k) EXPECT_NEAR(ha.weight_sums()[k], hab.weight_sums()[k], 1e-12);
  EXPECT_THROW(ha.merge(WeightedHistogram(HistogramSpec{0, 1, 3})), std::invalid_argument);
}

TEST(Histogram, SyntheticRhoSamplesMatchRho) {
  std::mt19937_64 rng(8);
  const HistogramSpec spec{-3.0, 3.0, 60};
  std::vector<WeightedHistogram> batches;
  const int n = 1'000'000;
  for (int k = 0; k < 20; ++k) {
    WeightedHistogram h(spec);
    for (int i = 0; i < n / 20; ++i) h.add(sample_rho(rng), 1.0);
    batches.push_back(h);
  }
  WeightedHistogram all(spec);
  for (const auto& b : batches) all.merge(b);
  const auto se_batch = batch_standard_errors(batches);
  QuadratureOptions opt;
  opt.abs_tol = 1e-13;
  for (std::size_t b = 0; b < spec.bins; ++b) {
    const double expect = adaptive_simpson(rho, spec.bin_lo(b), spec.bin_lo(b) + spec.dx(), opt) / spec.dx();
    const double p = expect * spec.dx();
    const double se = std::sqrt(p * (1 - p) / n) / spec.dx();
    EXPECT_LT(std::abs(all.normalized_density(b) - expect), 3.0 * se) << spec.bin_mid(b);
    EXPECT_NEAR(se_batch[b], se, 0.5 * se);
  }
}

TEST(LogLogFit, RecoversPlantedSlopeExactly) {
  const HistogramSpec spec{-3.0, 3.0, 60};
  for (double slope : {0.1, 0.444367, 0.625, 1.0, 2.0}) {
    WeightedHistogram h(spec);
    for (std::size_t b = 0; b < spec.bins; ++b) {
      const double mid = spec.bin_mid(b);
      h.add(mid, 3.0 * std::pow(std::cosh(kPi * mid / 2.0), -2.0 * slope));
    }
    const auto f = loglog_fit(h, -1.5, 1.5);
    EXPECT_NEAR(f.slope, slope, 1e-12);
    EXPECT_LT(f.residual_rms, 1e-12);
    EXPECT_EQ(f.n_points, 30u);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  }
}

TEST(LogLogFit, ZeroBinsExcludedAndTooFewPoints) {
  const HistogramSpec spec{-1.0, 1.0, 4};
  WeightedHistogram h(spec);
  h.add(-0.75, 1.0);
  h.add(0.25, 2.0);
  h.add(0.75, 0.5);
  EXPECT_EQ(loglog_fit(h, -1.0, 1.0).n_points, 3u);
  WeightedHistogram one(spec);
  one.add(0.25, 1.0);
  EXPECT_THROW(loglog_fit(one, -1.0, 1.0), std::invalid_argument);
}

TEST(Ecdf, Contract) {
  const WeightedEcdf single({0.4}, {2.0});
  EXPECT_EQ(single(0.4), 0.0);
  EXPECT_EQ(single(0.40001), 1.0);
  EXPECT_EQ(single(-1e300), 0.0);
  EXPECT_EQ(single(1e300), 1.0);

  const WeightedEcdf plain({1, 2, 2, 3}, {1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(plain(2.0), 0.25);
  EXPECT_DOUBLE_EQ(plain(2.5), 0.75);
  EXPECT_DOUBLE_EQ(plain.right_limit(2.0), 0.75);

  EXPECT_THROW(WeightedEcdf({}, {}), std::invalid_argument);
  EXPECT_THROW(weighted_ecdf(std::vector<SampleRecord>{}, Field::rightmost), std::invalid_argument);
}

TEST(Ecdf, PermutationInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(0, 40);
  std::uniform_real_distribution<double> w(0.01, 1.0);
  std::vector<SampleRecord> rs;
  for (int i = 0; i < 2000; ++i) rs.push_back(rec(0, v(rng) / 10.0, w(rng)));
  const auto f = weighted_ecdf(rs, Field::rightmost);
  std::shuffle(rs.begin(), rs.end(), rng);
  const auto g = weighted_ecdf(rs, Field::rightmost);
  for (double x = -0.5; x < 4.5; x += 0.05) EXPECT_EQ(f(x), g(x));
  double prev = 0;
  for (double x = -0.5; x < 4.5; x += 0.01) {
    EXPECT_GE(f(x), prev);
    prev = f(x);
  }
}

TEST(Ks, Examples) {
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  const WeightedEcdf f({0.25, 0.75}, {1, 1});
  const auto uniform = ks_distance(f, [](double x) { return std::clamp(x, 0.0, 1.0); }, grid);
  EXPECT_DOUBLE_EQ(uniform.distance, 0.25);
  EXPECT_TRUE(uniform.location == 0.25 || uniform.location == 0.75);
  const WeightedEcdf far({100.0}, {1.0});
  const auto r = ks_distance(far, [](double) { return 1.0; }, grid);
  EXPECT_EQ(r.distance, 1.0);
  // Jumps between grid points are inspected from both sides.
  const WeightedEcdf mid({0.3}, {1.0});
  EXPECT_DOUBLE_EQ(ks_distance(mid, [](double x) { return x < 0.3 ? 0.0 : 0.5; }, std::vector<double>{0.0, 1.0}).distance, 0.5);
  EXPECT_THROW(ks_distance(f, [](double) { return 0.0; }, std::vector<double>{}), std::invalid_argument);
}

TEST(Stability, ExactCases) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::int64_t> y(1, 500);
  std::vector<std::int64_t> a(3000);
  for (auto& v : a) v = y(rng);
  EXPECT_EQ(stability_diagnostic(a, a, 25, 25), 0.0);
  std::vector<std::int64_t> doubled = a, cubed = a;
  for (auto& v : doubled) v *= 2;
  for (auto& v : cubed) v *= 8;
  EXPECT_EQ(stability_diagnostic(a, doubled, 1, 2, 1.0), 0.0);
  EXPECT_EQ(stability_diagnostic(a, cubed, 1, 2, 3.0), 0.0);
  EXPECT_GT(stability_diagnostic(a, doubled, 1, 2, 3.0), 0.3);
  EXPECT_THROW(stability_diagnostic(std::vector<std::int64_t>{}, a, 1, 2), std::invalid_argument);
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
}
