#include <gtest/gtest.h>

#include "tanglescope/oracle.hpp"
#include "test_support.hpp"

using namespace tanglescope;

namespace {

struct System {
  Spectrum spectrum;
  MomentMatrices moments;
  explicit System(const SpinHamiltonian& h) : spectrum(solve(h)), moments(moment_matrices(spectrum)) {}
};

}  // namespace

TEST(TwoLevel, ZeroBias) {
  const auto t = oracle::two_level_closed_forms(147, 0);
  EXPECT_EQ(t.ground_energy, -147.0);
  EXPECT_EQ(t.excited_energy, 147.0);
  EXPECT_NEAR(std::abs(t.mu_ge), 1.0, 1e-15);
  EXPECT_EQ(t.mu_gg, 0.0);
}

TEST(TwoLevel, ZeroTunneling) {
  for (double e : {5.0, -5.0}) {
    const auto t = oracle::two_level_closed_forms(0, e);
    EXPECT_EQ(t.mu_ge, 0.0);
    EXPECT_NEAR(std::abs(t.ground(0)) + std::abs(t.ground(1)), 1.0, 1e-15);
  }
}

TEST(TwoLevel, EqualBias) {
  const auto t = oracle::two_level_closed_forms(30, 30);
  EXPECT_NEAR(t.ground_energy, -std::sqrt(2.0) * 30, 1e-12);
  EXPECT_THROW(oracle::two_level_closed_forms(0, 0), std::invalid_argument);
}

TEST(TwoLevel, MatchesDiagonalizedQubit) {
  const System s(SpinHamiltonian::uncoupled({40}, {-25}));
  const auto t = oracle::two_level_closed_forms(40, -25);
  EXPECT_NEAR(s.spectrum.energy(0), t.ground_energy, 1e-12);
  EXPECT_NEAR(s.moments.mu(0, 0), t.mu_gg, 1e-12);
  EXPECT_NEAR(s.moments.mu(1, 1), t.mu_ee, 1e-12);
  EXPECT_NEAR(std::abs(s.moments.mu(0, 1)), std::abs(t.mu_ge), 1e-12);
}

TEST(BruteZ, SingleQubitOrderTwo) {
  const System s(SpinHamiltonian::uncoupled({147}, {0}));
  EXPECT_NEAR(oracle::brute_z(0, 2, s.spectrum, s.moments), 1.0 / 294.0, 1e-16);
}

TEST(BruteZ, EveryStateEveryOrderSmallSystems) {
  SplitMix64 rng(1);
  std::vector<SpinHamiltonian> systems;
  for (std::size_t m = 1; m <= 4; ++m)
    for (int k = 0; k < 3; ++k) systems.push_back(ts_test::random_system(rng, m, -150, 150, k == 0 ? 0 : 150));
  systems.push_back(ts_test::paper_system());
  systems.push_back(ts_test::paper_system(ts_test::kBiasedEpsilon));
  systems.push_back(ts_test::two_block_system());
  for (const auto& h : systems) {
    const System s(h);
    for (std::size_t order = 2; order <= 4; ++order)
      for (std::size_t n = 0; n < s.spectrum.size(); ++n) {
        const double scale = std::max(oracle::brute_z_scale(n, order, s.spectrum, s.moments), 1e-300);
        EXPECT_LE(std::abs(z_signature(n, order, s.spectrum, s.moments) - oracle::brute_z(n, order, s.spectrum, s.moments)),
                  1e-10 * scale);
      }
  }
}

TEST(BruteZ, Caps) {
  SplitMix64 rng2(2);
  const System big(ts_test::random_system(rng2, 7));
  EXPECT_THROW(oracle::brute_z(0, 2, big.spectrum, big.moments), std::length_error);
  const System s(SpinHamiltonian::uncoupled({1}, {1}));
  EXPECT_THROW(oracle::brute_z(0, 5, s.spectrum, s.moments), std::invalid_argument);
}

TEST(DirectProduct, SingleQubitPhase) {
  const System s(SpinHamiltonian::uncoupled({147}, {0}));
  const auto c = oracle::direct_operator_product({0, 0}, {0.01, 0.0}, 0, s.spectrum);
  EXPECT_NEAR(c.real(), std::cos(2 * 147 * 0.01), 1e-12);
  EXPECT_NEAR(c.imag(), -std::sin(2 * 147 * 0.01), 1e-12);
}

TEST(BruteTrace, AgreesWithPartialTrace) {
  SplitMix64 rng(3);
  for (int t = 0; t < 5; ++t) {
    const PureState s(5, ts_test::random_vector(rng, 32));
    for (QubitMask m = 1; m < 31; m += 3)
      EXPECT_LE((partial_trace(s, from_mask(m)).matrix - oracle::brute_partial_trace(s, m)).cwiseAbs().maxCoeff(),
                1e-14);
  }
}
