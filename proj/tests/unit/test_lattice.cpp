#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "slowbond/errors.hpp"
#include "slowbond/lattice.hpp"

using namespace slowbond;

namespace {

Configuration config_of(std::vector<int> bits) { return Configuration(std::span<const int>(bits)); }

}  // namespace

TEST(Conductance, SlowBondAtBoxEnd) {
  const LatticeSpec spec(4, 2, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(conductance(spec, 3), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(conductance(spec, 7), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(conductance(spec, 0), 1.0);
  EXPECT_DOUBLE_EQ(conductance(spec, 4), 1.0);
}

TEST(Conductance, DirectSubstitution) {
  const LatticeSpec spec(2, 1, 2.0, 1.5);
  EXPECT_NEAR(conductance(spec, 1), 2.0 * std::pow(2.0, -1.5), 1e-15);
  EXPECT_NEAR(conductance(spec, 1), 0.7071, 1e-4);
}

TEST(Conductance, OutOfRangeIsIndexError) {
  const LatticeSpec spec(4, 2, 1.0, 2.0);
  EXPECT_THROW(conductance(spec, 8), IndexError);
}

TEST(Conductance, ExactlyKSlowBonds) {
  for (std::size_t n : {2u, 3u, 5u, 8u})
    for (std::size_t k : {1u, 2u, 4u}) {
      const LatticeSpec spec(n, k, 0.7, 1.3);
      std::size_t slow = 0;
      for (Site x = 0; x < spec.sites(); ++x) {
        const bool is_slow = conductance(spec, x) != 1.0;
        EXPECT_EQ(is_slow, x % n == n - 1);
        slow += is_slow;
      }
      EXPECT_EQ(slow, k);
    }
}

TEST(LatticeSpec, RejectsBadParameters) {
  EXPECT_THROW(LatticeSpec(1, 2, 1.0, 1.5), UsageError);
  EXPECT_THROW(LatticeSpec(2, 0, 1.0, 1.5), UsageError);
  EXPECT_THROW(LatticeSpec(2, 2, 0.0, 1.5), UsageError);
  EXPECT_THROW(LatticeSpec(2, 2, 1.0, -0.5), UsageError);
  EXPECT_THROW(LatticeSpec(2, 2, 1.0, NAN), UsageError);
  EXPECT_NO_THROW(LatticeSpec(2, 2, 1.0, 0.5));  // beta <= 1 accepted by the model
}

TEST(LatticeSpec, TotalRate) {
  const LatticeSpec spec(4, 3, 2.0, 1.5);
  double sum = 0.0;
  for (Site x = 0; x < spec.sites(); ++x) sum += conductance(spec, x);
  EXPECT_NEAR(spec.total_rate(), sum, 1e-12);
}

TEST(BoxIndex, Examples) {
  EXPECT_EQ(box_index(LatticeSpec(4, 2, 1, 2), 3), 0u);
  EXPECT_EQ(box_index(LatticeSpec(4, 2, 1, 2), 4), 1u);
  EXPECT_EQ(box_index(LatticeSpec(3, 3, 1, 2), 8), 2u);
  EXPECT_THROW(box_index(LatticeSpec(3, 3, 1, 2), 9), IndexError);
}

TEST(Swap, Examples) {
  EXPECT_EQ(swap(config_of({1, 0, 0, 0}), 0), config_of({0, 1, 0, 0}));
  EXPECT_EQ(swap(config_of({1, 1, 0, 0}), 0), config_of({1, 1, 0, 0}));
  EXPECT_EQ(swap(config_of({0, 0, 0, 1}), 3), config_of({1, 0, 0, 0}));
  EXPECT_THROW(swap(config_of({0, 0, 0, 1}), 4), IndexError);
}

TEST(Swap, InvolutionAndConservationExhaustive) {
  for (std::size_t sites = 2; sites <= 12; ++sites) {
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << sites); ++idx) {
      const Configuration eta = Configuration::from_index(sites, idx);
      for (Site x = 0; x < sites; ++x) {
        const Configuration once = swap(eta, x);
        ASSERT_EQ(once.particle_count(), eta.particle_count());
        ASSERT_EQ(once.count_range(0, sites), eta.particle_count());
        ASSERT_EQ(swap(once, x), eta);
      }
    }
  }
}

TEST(Configuration, IndexRoundTripAndPacking) {
  for (std::uint64_t idx : {0ull, 1ull, 0b1011ull, 0xF0F0ull}) {
    const Configuration c = Configuration::from_index(16, idx);
    EXPECT_EQ(c.to_index(), idx);
  }
  Configuration big(130);
  big.set(0, true);
  big.set(64, true);
  big.set(129, true);
  EXPECT_EQ(big.particle_count(), 3u);
  EXPECT_FALSE(big.swap_in_place(129));  // sites 129 and 0 are both occupied
}

TEST(Configuration, SwapAcrossWordBoundary) {
  Configuration c(130);
  c.set(63, true);
  EXPECT_TRUE(c.swap_in_place(63));
  EXPECT_FALSE(c[63]);
  EXPECT_TRUE(c[64]);
  EXPECT_EQ(c.particle_count(), 1u);
  EXPECT_EQ(c.count_range(60, 10), 1u);
  c.set(129, true);
  EXPECT_TRUE(c.swap_in_place(129));
  EXPECT_TRUE(c[0]);
  EXPECT_FALSE(c[129]);
}

TEST(GeneratorApply, ConstantsAndCountAreHarmonic) {
  const LatticeSpec spec(3, 2, 0.5, 1.5);
  for (std::uint64_t idx = 0; idx < 64; ++idx) {
    const Configuration eta = Configuration::from_index(6, idx);
    EXPECT_DOUBLE_EQ(generator_apply(spec, [](const Configuration&) { return 3.0; }, eta), 0.0);
    EXPECT_DOUBLE_EQ(generator_apply(
                         spec, [](const Configuration& c) { return double(c.particle_count()); },
                         eta),
                     0.0);
  }
}

TEST(GeneratorApply, TwoSiteHandComputation) {
  const LatticeSpec spec(2, 1, 1.0, 1.0);
  const Configuration eta = config_of({1, 0});
  const double v = generator_apply(spec, [](const Configuration& c) { return c[0] ? 1.0 : 0.0; }, eta);
  EXPECT_DOUBLE_EQ(v, -1.5);
}

TEST(GeneratorApply, UniformMeasureIsInvariant) {
  // sum_eta nu(eta) L 1_{eta0}(eta) = 0 for every eta0 under the uniform measure
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {4, 3}, {6, 2}}) {
    const LatticeSpec spec(n, k, 1.3, 1.5);
    const std::size_t sites = spec.sites();
    const std::uint64_t states = std::uint64_t{1} << sites;
    for (std::uint64_t target = 0; target < states; target += (states / 16) + 1) {
      double acc = 0.0;
      for (std::uint64_t idx = 0; idx < states; ++idx)
        acc += generator_apply(
            spec, [&](const Configuration& c) { return c.to_index() == target ? 1.0 : 0.0; },
            Configuration::from_index(sites, idx));
      EXPECT_NEAR(acc, 0.0, 1e-12);
    }
  }
}

TEST(Regime, SubcriticalNeedsPositiveTheta) {
  EXPECT_THROW(make_subcritical(0.0), UsageError);
  EXPECT_THROW(make_subcritical(-1.0), UsageError);
  EXPECT_NO_THROW(make_subcritical(0.2));
}
