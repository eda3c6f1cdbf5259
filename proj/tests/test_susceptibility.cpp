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

TEST(WeightFactor, CyclicSymmetryAndDiagonal) {
  SplitMix64 rng(1);
  const System s(ts_test::random_system(rng, 3, 1, 200, 100));
  for (std::size_t n = 0; n < 8; ++n)
    for (std::size_t p = 0; p < 8; ++p)
      for (std::size_t q = 0; q < 8; ++q) {
        const double c = weight_factor(n, p, q, s.moments);
        EXPECT_EQ(c, weight_factor(n, p, q, s.moments));
        EXPECT_NEAR(c, weight_factor(p, q, n, s.moments), 1e-15 * std::max(1.0, std::abs(c)));
        EXPECT_NEAR(c, weight_factor(q, n, p, s.moments), 1e-15 * std::max(1.0, std::abs(c)));
      }
  for (std::size_t n = 0; n < 8; ++n)
    for (std::size_t q = 0; q < 8; ++q) {
      const double mnq = s.moments.mu(n, q);
      EXPECT_NEAR(weight_factor(n, n, q, s.moments), mnq * mnq * s.moments.mu(n, n), 1e-14);
      EXPECT_NEAR(weight_factor(n, q, n, s.moments), mnq * mnq * s.moments.mu(n, n), 1e-14);
    }
}

TEST(WeightFactor, DistributedEqualsFactorized) {
  SplitMix64 rng(2);
  const System s(ts_test::random_system(rng, 2, 1, 200, 100));
  for (std::size_t n = 0; n < 4; ++n)
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t q = 0; q < 4; ++q)
        EXPECT_NEAR(weight_factor(n, p, q, s.moments), weight_factor_distributed(n, p, q, s.moments), 1e-12);
}

TEST(Formfactor, DiagonalVanishes) {
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  for (double w : {-30.0, 0.0, 1.0, 77.0})
    for (std::size_t n = 0; n < 16; ++n) {
      const auto f = formfactor(n, n, n, {w, 0.5 * w + 3, 1e-6}, s.spectrum);
      EXPECT_EQ(f, Complex(0.0, 0.0));
    }
}

TEST(Formfactor, FarOffResonanceCubicDecay) {
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  const double span = s.spectrum.energy(15) - s.spectrum.energy(0);
  const auto f1 = std::abs(formfactor(0, 3, 7, {100 * span, 100 * span, 1e-6}, s.spectrum));
  const auto f2 = std::abs(formfactor(0, 3, 7, {1000 * span, 1000 * span, 1e-6}, s.spectrum));
  EXPECT_NEAR(f1 / f2, 1000.0, 50.0);
}

TEST(Formfactor, Errors) {
  const System s(SpinHamiltonian::uncoupled({10}, {3}));
  EXPECT_THROW(formfactor(0, 1, 0, {1.0, 1.0, 0.0}, s.spectrum), std::invalid_argument);
  EXPECT_THROW(formfactor(0, 1, 0, {1.0, 1.0, -1e-3}, s.spectrum), std::invalid_argument);
  EXPECT_THROW(chi2({1.0, 1.0, 1e-3}, s.spectrum, s.moments, 0.0), std::invalid_argument);
}

TEST(Chi2, TwoLevelHandEvaluation) {
  const double delta = 40, eps = 25;
  const System s(SpinHamiltonian::uncoupled({delta}, {eps}));
  const auto cf = oracle::two_level_closed_forms(delta, eps);
  const double r = std::sqrt(delta * delta + eps * eps);
  const double w = 13.0, wp = -4.0, eta = 0.25;
  const Complex i(0.0, eta);
  const double W = w + wp;
  const double mgg = cf.mu_gg, mee = cf.mu_ee, mge2 = cf.mu_ge * cf.mu_ge;
  const Complex f_ge = 1.0 / (W - 2 * r + i) * (2 * r / ((wp - 2 * r + i) * (W + i)) + 4 * r / ((wp + i) * (W + 2 * r + i)));
  const Complex f_eg = 1.0 / (W + 2 * r + i) * (-4 * r / ((wp + i) * (W - 2 * r + i)) - 2 * r / ((wp + 2 * r + i) * (W + i)));
  const Complex f_ee = 1.0 / (W + i) * (-2 * r / ((wp - 2 * r + i) * (W - 2 * r + i)) + 2 * r / ((wp + 2 * r + i) * (W + 2 * r + i)));
  const Complex expect = mgg * mge2 * f_ge + mge2 * mgg * f_eg + mge2 * mee * f_ee;
  const Complex got = chi2_state(0, {w, wp, eta}, s.spectrum, s.moments);
  EXPECT_NEAR(got.real(), expect.real(), 1e-12 * std::abs(expect));
  EXPECT_NEAR(got.imag(), expect.imag(), 1e-12 * std::abs(expect));
}

TEST(Chi2, OccupationAndThermalSum) {
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  const auto r = chi2({5.0, 5.0, 1e-3}, s.spectrum, s.moments, 60.0);
  double total = 0.0;
  Complex mix{0.0, 0.0};
  for (std::size_t n = 0; n < 16; ++n) {
    total += r.occupation[n];
    mix += r.occupation[n] * r.per_state[n];
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_NEAR(std::abs(mix - r.thermal), 0.0, 1e-14 * std::abs(r.thermal));
}

TEST(Chi2, ColdLimitIsGroundState) {
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  const auto r = chi2({2.0, 2.0, 1e-4}, s.spectrum, s.moments, 1e-3);
  EXPECT_LE(std::abs(r.thermal - r.per_state[0]), 1e-9 * std::abs(r.per_state[0]));
}

TEST(SecondHarmonic, Scaling) {
  const Complex chi(0.3, -1.2);
  EXPECT_EQ(second_harmonic(0.0, chi), Complex(0.0, 0.0));
  EXPECT_EQ(second_harmonic(2.0, chi), 4.0 * chi);
  EXPECT_NEAR(std::abs(second_harmonic(3.0, chi) - 9.0 * chi), 0.0, 1e-15);
}

TEST(StaticSplit, FactorizedChainPartVanishes) {
  SplitMix64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(t % 3);
    const auto h = ts_test::random_system(rng, m);
    const System s(h);
    for (std::size_t n = 0; n < s.spectrum.size(); ++n) {
      const auto split = static_split(n, s.spectrum, s.moments);
      EXPECT_LE(std::abs(split.chi0B), 1e-10 * (1.0 + std::abs(split.chi0A)));
      EXPECT_EQ(split.total, split.chi0A + split.chi0B);
      const double fact = oracle::factorized_static_chi(n, s.spectrum, h);
      EXPECT_LE(std::abs(split.chi0A - fact), 1e-10 * std::abs(fact));
    }
  }
}

TEST(StaticSplit, ClosedFormMatchesTwoByTwoDiagonalization) {
  for (auto [d, e] : {std::pair{40.0, 25.0}, std::pair{147.0, -3.0}, std::pair{5.0, 190.0}}) {
    const auto cf = oracle::two_level_closed_forms(d, e);
    Eigen::Matrix2d h;
    h << -e, -d, -d, e;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    EXPECT_NEAR(es.eigenvalues()[0], cf.ground_energy, 1e-12);
    EXPECT_NEAR(std::abs(es.eigenvectors().col(0).dot(cf.ground)), 1.0, 1e-12);
    const Eigen::Vector2d g = es.eigenvectors().col(0), x = es.eigenvectors().col(1);
    const double mgg = g(0) * g(0) - g(1) * g(1);
    const double mee = x(0) * x(0) - x(1) * x(1);
    const double mge = g(0) * x(0) - g(1) * x(1);
    const double gap = es.eigenvalues()[1] - es.eigenvalues()[0];
    EXPECT_NEAR(3 * mge * mge * (mgg - mee) / (gap * gap), cf.chi_ground, 1e-12 * std::abs(cf.chi_ground));
  }
}

TEST(StaticSplit, ChainPartFromGlobalIrreducible) {
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  GlobalCorrelatorOptions o;
  o.cross_check = false;
  for (std::size_t n = 0; n < 16; ++n) {
    double b = 0.0;
    const double en = s.spectrum.energy(n);
    for (std::size_t p = 0; p < 16; ++p) {
      if (s.spectrum.degenerate(p, n)) continue;
      for (std::size_t q = 0; q < p; ++q) {
        if (s.spectrum.degenerate(q, n)) continue;
        b += -6.0 * 64.0 * global_irreducible({{n, p, q}}, s.spectrum, s.moments, o) /
             ((s.spectrum.energy(p) - en) * (s.spectrum.energy(q) - en));
      }
    }
    const auto split = static_split(n, s.spectrum, s.moments);
    EXPECT_NEAR(split.chi0B / 64.0, b / 64.0, 1e-12 * std::abs(split.chi0B / 64.0));
  }
}

TEST(StaticLimit, ReproducesStaticSplit) {
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  const double gap = s.spectrum.smallest_gap();
  const FrequencyPoint point{1e-4 * gap, 1e-4 * gap, 1e-6 * gap};
  for (std::size_t n = 0; n < 16; ++n) {
    const double total = static_split(n, s.spectrum, s.moments).total;
    const double re = chi2_state(n, point, s.spectrum, s.moments).real();
    EXPECT_LE(std::abs(re - total), 1e-3 * std::abs(total)) << "state " << n;
  }
}

TEST(StaticLimit, ErrorDecreasesWithFrequency) {
  // Broadening shrinks with omega (eta = 100 omega^2 / gap) so the finite-eta
  // offset does not mask the omega -> 0 approach.
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  const double gap = s.spectrum.smallest_gap();
  for (std::size_t n = 0; n < 16; ++n) {
    const double total = static_split(n, s.spectrum, s.moments).total;
    double previous = INFINITY;
    for (double k : {1e-3, 1e-4, 1e-5}) {
      const double w = k * gap;
      const double err =
          std::abs(chi2_state(n, {w, w, 100.0 * w * w / gap}, s.spectrum, s.moments).real() - total) /
          std::abs(total);
      EXPECT_LT(err, previous) << "state " << n << " at " << k;
      previous = err;
    }
  }
}

TEST(DefaultBroadening, SmallFractionOfGap) {
  const System s(ts_test::paper_system(ts_test::kBiasedEpsilon));
  EXPECT_DOUBLE_EQ(default_broadening(s.spectrum), 1e-6 * s.spectrum.smallest_gap());
}
