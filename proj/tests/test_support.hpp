#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "tanglescope/tanglescope.hpp"

namespace tanglescope {

// readable gtest output for partitions
inline void PrintTo(const ClusterPartition& p, std::ostream* os) {
  for (const auto& b : p.blocks) {
    *os << '{';
    for (std::size_t i = 0; i < b.size(); ++i) *os << (i ? "," : "") << b[i];
    *os << '}';
  }
}

}  // namespace tanglescope

namespace ts_test {

using namespace tanglescope;

/// Four-qubit system from the flux-qubit experiment (mK).
inline SpinHamiltonian paper_system(std::vector<double> epsilon = {0, 0, 0, 0}) {
  SpinHamiltonian h = SpinHamiltonian::uncoupled({147, 12, 163, 165}, std::move(epsilon));
  h.couplings = {{{0, 1}, 163}, {{2, 3}, 163}, {{0, 3}, 155}, {{1, 2}, 155}, {{0, 2}, -62}, {{1, 3}, -62}};
  return h;
}

inline const std::vector<double> kBiasedEpsilon = {30, -20, 25, -15};

/// Random system: delta, epsilon in [lo, hi], couplings in [-jmax, jmax].
inline SpinHamiltonian random_system(SplitMix64& rng, std::size_t m, double lo = 1.0, double hi = 200.0,
                                     double jmax = 0.0) {
  std::vector<double> d(m), e(m);
  for (std::size_t k = 0; k < m; ++k) {
    d[k] = lo + (hi - lo) * rng.uniform();
    e[k] = lo + (hi - lo) * rng.uniform();
  }
  SpinHamiltonian h = SpinHamiltonian::uncoupled(d, e);
  if (jmax > 0.0)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) h.couplings[{i, j}] = jmax * (2.0 * rng.uniform() - 1.0);
  return h;
}

inline Vector basis_state(std::size_t m, std::size_t index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dimension(m)));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return v;
}

/// (|0...0> + |1...1>)/sqrt(2), i.e. all spins up plus all spins down.
inline PureState ghz(std::size_t m) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dimension(m)));
  v[0] = v[static_cast<Eigen::Index>(dimension(m) - 1)] = 1.0 / std::sqrt(2.0);
  return PureState(m, v);
}

inline Vector bell() {
  Vector v(4);
  v << 1, 0, 0, 1;
  return v / std::sqrt(2.0);
}

/// Normalized random real state.
inline Vector random_vector(SplitMix64& rng, std::size_t dim) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 2.0 * rng.uniform() - 1.0;
  return v.normalized();
}

/// Embeds per-block states into the full register: blocks[b] lists the
/// qubits (in order) that the b-th factor's bit k maps to.
inline PureState embed(std::size_t m, const std::vector<QubitSet>& blocks, const std::vector<Vector>& factors) {
  const std::size_t dim = dimension(m);
  Vector v(static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    double amp = 1.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      std::size_t local = 0;
      for (std::size_t k = 0; k < blocks[b].size(); ++k) local |= ((x >> blocks[b][k]) & 1u) << k;
      amp *= factors[b][static_cast<Eigen::Index>(local)];
    }
    v[static_cast<Eigen::Index>(x)] = amp;
  }
  return PureState(m, v);
}

/// Two independent two-qubit blocks {0,1} and {2,3}.
inline SpinHamiltonian two_block_system() {
  SpinHamiltonian h = SpinHamiltonian::uncoupled({40, 70, 55, 90}, {12, -9, 17, 6});
  h.couplings = {{{0, 1}, 80}, {{2, 3}, -65}};
  return h;
}

inline double rel_err(double a, double b, double scale) { return std::abs(a - b) / scale; }

}  // namespace ts_test
