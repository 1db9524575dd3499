#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hsaw/enumeration.hpp"
#include "hsaw/pivot.hpp"

using namespace hsaw;

namespace {

using Kind = LatticeSymmetry::Kind;

std::vector<LatticePoint> pts(std::initializer_list<std::pair<int, int>> xs) {
  std::vector<LatticePoint> out;
  for (auto [x, y] : xs) out.push_back({x, y});
  return out;
}

std::vector<LatticePoint> as_vector(std::span<const LatticePoint> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(InitialWalk, Rod) {
  EXPECT_EQ(as_vector(initial_walk(1).sites()), pts({{0, 0}, {0, 1}}));
  EXPECT_EQ(as_vector(initial_walk(3).sites()), pts({{0, 0}, {0, 1}, {0, 2}, {0, 3}}));
  for (std::size_t n = 1; n <= 100; ++n) EXPECT_TRUE(is_bridge(initial_walk(n)));
  EXPECT_THROW(initial_walk(0), ConfigError);
}

TEST(Symmetry, GroupStructure) {
  std::set<std::array<int, 4>> seen;
  for (auto k : LatticeSymmetry::all_kinds()) {
    const LatticeSymmetry g(k);
    seen.insert({g.xx(), g.xy(), g.yx(), g.yy()});
    for (auto d : {kUp, kDown, kLeft, kRight}) EXPECT_TRUE(is_unit_step(g(d)));
    EXPECT_TRUE((g * g.inverse()).is_identity());
    for (auto k2 : LatticeSymmetry::all_kinds()) {
      const LatticeSymmetry p = g * LatticeSymmetry(k2);
      bool member = false;
      for (auto k3 : LatticeSymmetry::all_kinds()) member = member || p == LatticeSymmetry(k3);
      EXPECT_TRUE(member);
    }
  }
  EXPECT_EQ(seen.size(), 8u);
  for (const auto& g : LatticeSymmetry::proposals()) EXPECT_FALSE(g.is_identity());
  EXPECT_EQ(LatticeSymmetry(Kind::rotate90)(kRight), kUp);
}

TEST(Pivot, RotationOfShortRod) {
  const auto w = initial_walk(2);
  const auto p = propose_pivot(w, 1, LatticeSymmetry(Kind::rotate90));
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(as_vector(p->sites()), pts({{0, 0}, {0, 1}, {-1, 1}}));

  PivotChain chain(2);
  EXPECT_TRUE(chain.attempt(1, LatticeSymmetry(Kind::rotate90)));
  EXPECT_EQ(as_vector(chain.snapshot().sites()), pts({{0, 0}, {0, 1}, {-1, 1}}));
}

TEST(Pivot, HalfPlaneViolationRejected) {
  // Rotating the top of the rod by 180 degrees about (0,1) lands on the root.
  const auto w = initial_walk(2);
  EXPECT_FALSE(propose_pivot(w, 1, LatticeSymmetry(Kind::rotate180)).has_value());
  // Reflecting in the horizontal axis through (0,1) sends (0,3) to (0,-1).
  EXPECT_FALSE(propose_pivot(initial_walk(3), 1, LatticeSymmetry(Kind::reflect_y)).has_value());
  PivotChain chain(3);
  EXPECT_FALSE(chain.attempt(1, LatticeSymmetry(Kind::reflect_y)));
  EXPECT_EQ(chain.snapshot(), initial_walk(3));
}

TEST(Pivot, CollisionRejected) {
  // Reflecting the tail of U U U R D D in the line y = 2 sends (0,3) onto (0,1).
  const HalfPlaneWalk w(walk_from_directions("UUURDD"));
  const auto p = propose_pivot(w, 2, LatticeSymmetry(Kind::reflect_y));
  EXPECT_FALSE(p.has_value());
  PivotChain chain(w);
  EXPECT_FALSE(chain.attempt(2, LatticeSymmetry(Kind::reflect_y)));
  EXPECT_EQ(chain.snapshot(), w);
  EXPECT_TRUE(chain.check_invariants());
}

class Trajectory : public ::testing::TestWithParam<PivotSites> {};

TEST_P(Trajectory, ChainFollowsReference) {
  const PivotSites sites = GetParam();
  for (std::size_t n : {2u, 5u, 17u, 120u, 700u}) {
    auto rng_ref = chain_rng(99, n);
    auto rng_fast = chain_rng(99, n);
    HalfPlaneWalk ref = initial_walk(n);
    PivotChain fast(n);
    const int steps = n < 200 ? 4000 : 1500;
    for (int i = 0; i < steps; ++i) {
      auto [next, acc] = pivot_step(ref, rng_ref, sites);
      const bool acc_fast = fast.step(rng_fast, sites);
      ASSERT_EQ(acc, acc_fast) << "n=" << n << " step " << i;
      ref = std::move(next);
      if (i % 97 == 0 || n < 20) {
        ASSERT_EQ(fast.snapshot(), ref) << "n=" << n << " step " << i;
      }
    }
    EXPECT_EQ(fast.snapshot(), ref);
    EXPECT_TRUE(fast.check_invariants());
    EXPECT_GT(fast.accepted(), 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(Sites, Trajectory, ::testing::Values(PivotSites::uniform, PivotSites::mixed));

TEST(DrawMove, MixedSitesCoverTheRange) {
  auto rng = chain_rng(3, 0);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto mv = draw_move(10, rng, PivotSites::mixed);
    ASSERT_TRUE(mv.has_value());
    ASSERT_GE(mv->pivot, 1u);
    ASSERT_LE(mv->pivot, 9u);
    ++hits[mv->pivot];
  }
  // Uniform half gives 1/18 per site; the log half adds log(1 + 1/j) / (2 log 10).
  for (std::size_t j = 1; j <= 8; ++j) {
    const double p = 1.0 / 18.0 + std::log1p(1.0 / static_cast<double>(j)) / (2.0 * std::log(10.0));
    EXPECT_NEAR(hits[j] / 1e5, p, 0.005) << j;
  }
  EXPECT_FALSE(draw_move(1, rng, PivotSites::mixed).has_value());
}

TEST(Pivot, LongChainKeepsInvariants) {
  PivotChain chain(5000);
  auto rng = chain_rng(5, 0);
  for (int i = 0; i < 20000; ++i) chain.step(rng);
  EXPECT_TRUE(chain.check_invariants());
  const auto s = chain.snapshot();
  EXPECT_TRUE(in_upper_half_plane(s.sites()));
  EXPECT_TRUE(is_self_avoiding(s.sites()));
}

TEST(SampleChain, CountingAndDeterminism) {
  ChainConfig c;
  c.steps = 50;
  c.stride = 1;
  c.total_samples = 3;
  c.warmup_iterations = 10;
  int emitted = 0;
  sample_chain(c, 0, [&](std::uint64_t, const HalfPlaneWalk&) { ++emitted; });
  EXPECT_EQ(emitted, 3);

  c.stride = 7;
  c.total_samples = 200;
  std::vector<std::vector<LatticePoint>> a, b;
  sample_chain(c, 2, [&](std::uint64_t, const HalfPlaneWalk& w) { a.push_back(as_vector(w.sites())); });
  sample_chain(c, 2, [&](std::uint64_t, const HalfPlaneWalk& w) { b.push_back(as_vector(w.sites())); });
  EXPECT_EQ(a, b);
  std::vector<std::vector<LatticePoint>> other;
  sample_chain(c, 3, [&](std::uint64_t, const HalfPlaneWalk& w) { other.push_back(as_vector(w.sites())); });
  EXPECT_NE(a, other);
}

TEST(SampleChain, RejectsBadConfig) {
  ChainConfig c;
  c.stride = 0;
  EXPECT_THROW(sample_chain(c, 0, [](std::uint64_t, const HalfPlaneWalk&) {}), ConfigError);
  c = {};
  c.steps = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

class Uniformity : public ::testing::TestWithParam<std::tuple<std::size_t, PivotSites>> {};

TEST_P(Uniformity, ChiSquareAgainstEnumeration) {
  const auto [n, sites] = GetParam();
  const auto all = enumerate_halfplane(n);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < all.size(); ++i) index[to_direction_string(all[i])] = i;
  std::vector<double> freq(all.size(), 0.0);
  ChainConfig c;
  c.steps = n;
  c.stride = 20;
  c.total_samples = 200000;
  c.seed = 11;
  c.pivot_sites = sites;
  sample_chain(c, 0, [&](std::uint64_t, const HalfPlaneWalk& w) {
    const auto it = index.find(to_direction_string(w.sites()));
    ASSERT_NE(it, index.end());
    freq[it->second] += 1;
  });
  const double expect = static_cast<double>(c.total_samples) / static_cast<double>(all.size());
  double chi2 = 0;
  for (double f : freq) chi2 += (f - expect) * (f - expect) / expect;
  const boost::math::chi_squared dist(static_cast<double>(all.size() - 1));
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99)) << "|H_N| = " << all.size();
}

INSTANTIATE_TEST_SUITE_P(SmallN, Uniformity,
                         ::testing::Combine(::testing::Values(4u, 6u),
                                            ::testing::Values(PivotSites::uniform, PivotSites::mixed)));
