#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tanglescope/spectral.hpp"

namespace tanglescope {

using QubitSet = std::vector<std::size_t>;
using QubitMask = std::uint32_t;

inline QubitMask to_mask(const QubitSet& set, std::size_t qubits) {
  QubitMask mask = 0;
  for (auto q : set) {
    if (q >= qubits)
      throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
    mask |= QubitMask{1} << q;
  }
  return mask;
}

inline QubitSet from_mask(QubitMask mask) {
  QubitSet out;
  for (std::size_t q = 0; mask != 0; ++q, mask >>= 1)
    if (mask & 1U) out.push_back(q);
  return out;
}

/// Normalized real pure state of M qubits in the z-basis.
class PureState {
 public:
  PureState(std::size_t qubits, Vector amplitudes)
      : qubits_(qubits), amplitudes_(std::move(amplitudes)) {
    if (qubits_ < 1 || qubits_ > kMaxQubits)
      throw std::invalid_argument("qubit count out of range");
    if (static_cast<std::size_t>(amplitudes_.size()) != dimension(qubits_))
      throw std::invalid_argument("amplitude vector length is not 2^M");
    if (std::abs(amplitudes_.norm() - 1.0) > 1e-10)
      throw std::invalid_argument("state is not normalized");
  }

  static PureState eigenstate(const Spectrum& spectrum, std::size_t n) {
    if (n >= spectrum.size()) throw std::out_of_range("eigenstate label out of range");
    return PureState(spectrum.qubits, spectrum.vectors.col(static_cast<Eigen::Index>(n)));
  }

  std::size_t qubits() const noexcept { return qubits_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  double operator[](std::size_t b) const { return amplitudes_[static_cast<Eigen::Index>(b)]; }

 private:
  std::size_t qubits_;
  Vector amplitudes_;
};

struct ReducedDensity {
  QubitSet subset;  // sorted; subset[i] is bit i of the reduced index
  Matrix matrix;

  double purity() const { return matrix.squaredNorm(); }
};

namespace detail {

// Scatter the low bits of `compact` onto the positions listed in `qubits`.
inline std::size_t scatter(std::size_t compact, const QubitSet& qubits) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < qubits.size(); ++i)
    if ((compact >> i) & 1U) out |= std::size_t{1} << qubits[i];
  return out;
}

inline QubitSet normalized_subset(QubitSet subset, std::size_t qubits) {
  if (subset.empty()) throw std::invalid_argument("empty qubit subset");
  std::sort(subset.begin(), subset.end());
  if (std::adjacent_find(subset.begin(), subset.end()) != subset.end())
    throw std::invalid_argument("repeated qubit in subset");
  if (subset.back() >= qubits)
    throw std::out_of_range("qubit index " + std::to_string(subset.back()) +
                            " out of range");
  return subset;
}

}  // namespace detail

/// Reduced density matrix on `subset`, tracing out the complement.
inline ReducedDensity partial_trace(const PureState& state, QubitSet subset) {
  subset = detail::normalized_subset(std::move(subset), state.qubits());
  QubitSet rest;
  for (std::size_t q = 0; q < state.qubits(); ++q)
    if (!std::binary_search(subset.begin(), subset.end(), q)) rest.push_back(q);

  const std::size_t kept = dimension(subset.size());
  const std::size_t traced = dimension(rest.size());
  Matrix blocks(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(traced));
  for (std::size_t c = 0; c < traced; ++c) {
    const std::size_t base = detail::scatter(c, rest);
    for (std::size_t a = 0; a < kept; ++a)
      blocks(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) =
          state[base | detail::scatter(a, subset)];
  }
  Matrix rho = blocks * blocks.transpose();
  rho = 0.5 * (rho + rho.transpose());
  return {std::move(subset), std::move(rho)};
}

inline constexpr double kEtaZeroClamp = 1e-12;

/// Bipartition entanglement 2^|S|/(2^|S|-1) * (1 - tr rho_S^2). Exactly 0 for
/// separable cuts (values below 1e-12 are clamped), at most 1.
inline double eta(const PureState& state, const QubitSet& subset) {
  if (subset.empty() || subset.size() >= state.qubits())
    throw std::invalid_argument("eta needs 1 <= |S| <= M-1");
  const ReducedDensity rho = partial_trace(state, subset);
  const double d = static_cast<double>(dimension(rho.subset.size()));
  const double value = d / (d - 1.0) * (1.0 - rho.purity());
  if (value < kEtaZeroClamp) return 0.0;
  return std::min(value, 1.0);
}

/// The 2^(M-1)-1 distinct bipartitions, each named by its smaller side (for
/// equal halves, the side without the highest qubit).
inline std::vector<QubitMask> bipartitions(std::size_t qubits) {
  std::vector<QubitMask> out;
  const QubitMask full = (QubitMask{1} << qubits) - 1;
  const QubitMask top = QubitMask{1} << (qubits - 1);
  for (QubitMask s = 1; s < full; ++s) {
    const auto size = static_cast<std::size_t>(std::popcount(s));
    if (2 * size < qubits || (2 * size == qubits && !(s & top))) out.push_back(s);
  }
  return out;
}

/// Global entanglement: geometric mean of eta over all bipartitions.
inline double love_R(const PureState& state) {
  if (state.qubits() < 2) throw std::invalid_argument("love_R needs M >= 2");
  const auto cuts = bipartitions(state.qubits());
  double log_sum = 0.0;
  for (QubitMask s : cuts) {
    const double e = eta(state, from_mask(s));
    if (e == 0.0) return 0.0;
    log_sum += std::log(e);
  }
  return std::exp(log_sum / static_cast<double>(cuts.size()));
}

/// Arithmetic mean of eta over all subsets of size k; k = 1 is Meyer-Wallach.
inline double scott_measure(const PureState& state, std::size_t k) {
  const std::size_t m = state.qubits();
  if (k < 1 || 2 * k > m) throw std::invalid_argument("Scott order k must satisfy 1 <= k <= M/2");
  double sum = 0.0;
  std::size_t count = 0;
  for (QubitMask s = 1; s < (QubitMask{1} << m); ++s) {
    if (static_cast<std::size_t>(std::popcount(s)) != k) continue;
    sum += eta(state, from_mask(s));
    ++count;
  }
  return sum / static_cast<double>(count);
}

inline double meyer_wallach(const PureState& state) { return scott_measure(state, 1); }

}  // namespace tanglescope
