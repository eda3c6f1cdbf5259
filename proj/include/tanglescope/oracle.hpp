#pragma once

// Brute-force reference implementations for tests and --self-test. Nothing
// here calls the evaluation code of the main modules; only the plain data
// types (Spectrum, MomentMatrices, PureState, SpinHamiltonian) are shared.

#include <bit>
#include <cmath>
#include <cstdint>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tanglescope/entanglement.hpp"
#include "tanglescope/spectral.hpp"

namespace tanglescope::oracle {

inline constexpr std::size_t kMaxDimension = 64;

namespace detail {

inline void require_small(std::size_t dim) {
  if (dim > kMaxDimension) throw std::length_error("oracle limited to 2^M <= 64");
}

inline double pow_int(double base, std::size_t e) {
  double r = 1.0;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

// Explicit nested loops; `absolute` sums |term| instead of term.
inline double z_loops(std::size_t n, std::size_t order, const Spectrum& sp, const MomentMatrices& mm,
                      bool absolute) {
  require_small(sp.size());
  if (order < 2 || order > 4) throw std::invalid_argument("oracle handles N = 2, 3, 4 only");
  if (n >= sp.size()) throw std::out_of_range("eigenstate label out of range");
  const std::size_t dim = sp.size();
  const double en = sp.energies(static_cast<Eigen::Index>(n));
  auto skip = [&](std::size_t a) {
    return std::fabs(sp.energies(static_cast<Eigen::Index>(a)) - en) <= sp.degeneracy_tol;
  };
  auto gap = [&](std::size_t a) { return sp.energies(static_cast<Eigen::Index>(a)) - en; };
  auto mu = [&](std::size_t a, std::size_t b) {
    return mm.total(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  auto add = [absolute](double& s, double t) { s += absolute ? std::fabs(t) : t; };

  double s = 0.0;
  if (order == 2) {
    for (std::size_t a = 0; a < dim; ++a) {
      if (skip(a)) continue;
      add(s, mu(n, a) * mu(a, n) / gap(a));
    }
  } else if (order == 3) {
    for (std::size_t a = 0; a < dim; ++a) {
      if (skip(a)) continue;
      for (std::size_t b = 0; b < dim; ++b) {
        if (skip(b) || b == a) continue;
        add(s, mu(n, a) * mu(a, b) * mu(b, n) / (gap(a) * gap(b)));
      }
    }
  } else {
    for (std::size_t a = 0; a < dim; ++a) {
      if (skip(a)) continue;
      for (std::size_t b = 0; b < dim; ++b) {
        if (skip(b) || b == a) continue;
        for (std::size_t c = 0; c < dim; ++c) {
          if (skip(c) || c == a || c == b) continue;
          add(s, mu(n, a) * mu(a, b) * mu(b, c) * mu(c, n) / (gap(a) * gap(b) * gap(c)));
        }
      }
    }
  }
  return s / pow_int(static_cast<double>(mm.per_qubit.size()), order);
}

}  // namespace detail

/// Z^n_N by explicit loops (N <= 4, 2^M <= 64).
inline double brute_z(std::size_t n, std::size_t order, const Spectrum& spectrum, const MomentMatrices& moments) {
  return detail::z_loops(n, order, spectrum, moments, false);
}

/// Same loops summing |term|: the natural scale for comparing cancelling sums.
inline double brute_z_scale(std::size_t n, std::size_t order, const Spectrum& spectrum,
                            const MomentMatrices& moments) {
  return detail::z_loops(n, order, spectrum, moments, true);
}

struct TwoLevel {
  double ground_energy = 0.0, excited_energy = 0.0;
  Eigen::Vector2d ground, excited;
  double mu_gg = 0.0, mu_ee = 0.0, mu_ge = 0.0;
  double chi_ground = 0.0, chi_excited = 0.0;  // static single-qubit susceptibility
};

/// Closed forms for H = -f (eps sz + delta sx), f = 1 (main text) or 1/2.
inline TwoLevel two_level_closed_forms(double delta, double epsilon, double field = 1.0) {
  if (delta == 0.0 && epsilon == 0.0) throw std::invalid_argument("zero two-level Hamiltonian");
  const double r = std::sqrt(epsilon * epsilon + delta * delta);
  TwoLevel t;
  t.ground_energy = -field * r;
  t.excited_energy = field * r;
  t.ground = epsilon >= 0.0 ? Eigen::Vector2d(r + epsilon, delta) : Eigen::Vector2d(delta, r - epsilon);
  t.ground.normalize();
  t.excited = Eigen::Vector2d(-t.ground(1), t.ground(0));
  t.mu_gg = epsilon / r;
  t.mu_ee = -epsilon / r;
  t.mu_ge = t.ground(0) * t.excited(0) - t.ground(1) * t.excited(1);
  t.chi_ground = 3.0 * delta * delta * epsilon / (2.0 * field * field * r * r * r * r * r);
  t.chi_excited = -t.chi_ground;
  return t;
}

/// Sum of single-qubit static susceptibilities for eigenstate n of an
/// uncoupled system. Each qubit's level is identified by matching E_n
/// against all 2^M sums of single-qubit energies.
inline double factorized_static_chi(std::size_t n, const Spectrum& spectrum, const SpinHamiltonian& system) {
  if (!system.couplings.empty())
    for (const auto& [pair, j] : system.couplings)
      if (j != 0.0) throw std::invalid_argument("system is not factorized");
  const double field = system.convention == Convention::Appendix ? 0.5 : 1.0;
  const std::size_t m = system.qubits;
  std::vector<TwoLevel> single;
  for (std::size_t k = 0; k < m; ++k)
    single.push_back(two_level_closed_forms(system.delta[k], system.epsilon[k], field));

  const double target = spectrum.energies(static_cast<Eigen::Index>(n));
  std::size_t best = 0;
  double best_err = INFINITY, second_err = INFINITY;
  for (std::size_t s = 0; s < (std::size_t{1} << m); ++s) {
    double e = 0.0;
    for (std::size_t k = 0; k < m; ++k) e += (s >> k & 1) ? single[k].excited_energy : single[k].ground_energy;
    const double err = std::fabs(e - target);
    if (err < best_err) {
      second_err = best_err;
      best_err = err;
      best = s;
    } else if (err < second_err) {
      second_err = err;
    }
  }
  if (second_err <= 1e-9 * (1.0 + std::fabs(target)))
    throw std::domain_error("eigenstate energy matches several product levels");
  double chi = 0.0;
  for (std::size_t k = 0; k < m; ++k) chi += (best >> k & 1) ? single[k].chi_excited : single[k].chi_ground;
  return chi;
}

/// <p| S_1(t_1) ... S_N(t_N) |p> from full 2^M x 2^M complex matrices,
/// S(t) = U(t)^dagger sigma^z_j U(t), U(t) = V diag(e^{-iEt}) V^T.
inline std::complex<double> direct_operator_product(const std::vector<std::size_t>& string,
                                                    const std::vector<double>& times, std::size_t p,
                                                    const Spectrum& spectrum) {
  using CMatrix = Eigen::MatrixXcd;
  const auto dim = static_cast<Eigen::Index>(spectrum.size());
  detail::require_small(spectrum.size());
  if (string.size() != times.size()) throw std::invalid_argument("need one time per operator");
  const CMatrix v = spectrum.vectors.cast<std::complex<double>>();
  CMatrix product = CMatrix::Identity(dim, dim);
  for (std::size_t k = 0; k < string.size(); ++k) {
    CMatrix sz = CMatrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) sz(b, b) = ((b >> string[k]) & 1) ? -1.0 : 1.0;
    Eigen::VectorXcd phase(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      phase(i) = std::exp(std::complex<double>(0.0, -spectrum.energies(i) * times[k]));
    const CMatrix u = v * phase.asDiagonal() * v.adjoint();
    product = product * (u.adjoint() * sz * u);
  }
  const Eigen::VectorXcd ket = v.col(static_cast<Eigen::Index>(p));
  return ket.dot(product * ket);  // dot conjugates the first argument
}

/// Reduced density matrix by summing over every pair of basis indices that
/// agree outside the subset (O(4^M)). Subset given as a bit mask.
inline Eigen::MatrixXd brute_partial_trace(const PureState& state, std::uint32_t subset) {
  const std::size_t m = state.qubits();
  detail::require_small(std::size_t{1} << m);
  std::vector<std::size_t> inside;
  for (std::size_t k = 0; k < m; ++k)
    if (subset >> k & 1) inside.push_back(k);
  const std::size_t d = std::size_t{1} << inside.size();
  auto compress = [&](std::size_t x) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < inside.size(); ++i) c |= ((x >> inside[i]) & 1) << i;
    return c;
  };
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const std::size_t full = std::size_t{1} << m;
  for (std::size_t x = 0; x < full; ++x)
    for (std::size_t y = 0; y < full; ++y)
      if ((x & ~std::size_t{subset}) == (y & ~std::size_t{subset}))
        rho(static_cast<Eigen::Index>(compress(x)), static_cast<Eigen::Index>(compress(y))) += state[x] * state[y];
  return rho;
}

inline double brute_eta(const PureState& state, std::uint32_t subset) {
  const Eigen::MatrixXd rho = brute_partial_trace(state, subset);
  double purity = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j) purity += rho(i, j) * rho(j, i);
  const double d = static_cast<double>(rho.rows());
  return d / (d - 1.0) * (1.0 - purity);
}

/// Product of eta over bipartitions, each cut once via the side without
/// qubit 0 and evaluated on its smaller side, raised to 1/(2^(M-1)-1).
inline double brute_love_R(const PureState& state) {
  const std::size_t m = state.qubits();
  const std::uint32_t full = (std::uint32_t{1} << m) - 1;
  double product = 1.0;
  std::size_t cuts = 0;
  for (std::uint32_t s = 2; s < full; s += 2) {
    const std::uint32_t other = full & ~s;
    const auto size = static_cast<std::size_t>(std::popcount(s));
    product *= brute_eta(state, 2 * size <= m ? s : other);
    ++cuts;
  }
  return std::pow(product, 1.0 / static_cast<double>(cuts));
}

}  // namespace tanglescope::oracle
