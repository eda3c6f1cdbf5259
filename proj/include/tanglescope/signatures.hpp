#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tanglescope/spectral.hpp"

namespace tanglescope {

/// Linear-response weight sum_{ij} <p|sz_i|q><q|sz_j|p>, or only its i != j
/// part when cross_only is set.
inline double linear_signature(std::size_t p, std::size_t q, const MomentMatrices& moments,
                               bool cross_only = false) {
  if (p == q) throw std::invalid_argument("linear signature needs p != q");
  if (p >= moments.size() || q >= moments.size()) throw std::out_of_range("eigenstate label out of range");
  double sum = 0.0;
  for (std::size_t i = 0; i < moments.qubits(); ++i)
    for (std::size_t j = 0; j < moments.qubits(); ++j)
      if (!cross_only || i != j) sum += moments.sigma(i, p, q) * moments.sigma(j, q, p);
  return sum;
}

/// Number of eigenstates other than n dropped from restricted sums because
/// they are degenerate with n.
inline std::size_t excluded_labels(std::size_t n, const Spectrum& spectrum) {
  std::size_t count = 0;
  for (std::size_t p = 0; p < spectrum.size(); ++p)
    if (p != n && spectrum.degenerate(p, n)) ++count;
  return count;
}

/// Per-state signature
///   Z^n_N = M^-N sum' Re(mu_{n p1} mu_{p1 p2} ... mu_{p_{N-1} n})
///                     / ((E_p1 - E_n) ... (E_p{N-1} - E_n))
/// with internal labels pairwise distinct and non-degenerate with n.
inline double z_signature(std::size_t n, std::size_t order, const Spectrum& spectrum,
                          const MomentMatrices& moments) {
  if (order < 2) throw std::invalid_argument("signature order must be >= 2");
  if (n >= spectrum.size()) throw std::out_of_range("eigenstate label out of range");
  if (moments.size() != spectrum.size()) throw std::invalid_argument("moments do not match spectrum");

  std::vector<std::size_t> allowed;
  for (std::size_t p = 0; p < spectrum.size(); ++p)
    if (!spectrum.degenerate(p, n)) allowed.push_back(p);
  if (allowed.size() < order - 1) return 0.0;

  const double en = spectrum.energy(n);
  std::vector<bool> used(spectrum.size(), false);
  double sum = 0.0;

  auto recurse = [&](auto&& self, std::size_t depth, std::size_t prev, double numerator,
                     double denominator) -> void {
    for (std::size_t p : allowed) {
      if (used[p]) continue;
      const double num = numerator * moments.mu(prev, p);
      const double den = denominator * (spectrum.energy(p) - en);
      if (depth + 1 == order - 1) {
        sum += (num * moments.mu(p, n)) / den;
      } else {
        used[p] = true;
        self(self, depth + 1, p, num, den);
        used[p] = false;
      }
    }
  };
  recurse(recurse, 0, n, 1.0, 1.0);
  return sum / std::pow(static_cast<double>(moments.qubits()), static_cast<double>(order));
}

/// Ground-state fourth-order signature Z^0_4. For four qubits this is the
/// explicit triple sum with prefactor 4^-4; other sizes use z_signature.
inline double z4_ground(const Spectrum& spectrum, const MomentMatrices& moments) {
  if (moments.qubits() != 4) return z_signature(0, 4, spectrum, moments);
  const double e0 = spectrum.energy(0);
  const std::size_t dim = spectrum.size();
  double sum = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    if (spectrum.degenerate(a, 0)) continue;
    for (std::size_t b = 0; b < dim; ++b) {
      if (b == a || spectrum.degenerate(b, 0)) continue;
      for (std::size_t c = 0; c < dim; ++c) {
        if (c == a || c == b || spectrum.degenerate(c, 0)) continue;
        const double num = moments.mu(0, a) * moments.mu(a, b) * moments.mu(b, c) * moments.mu(c, 0);
        const double den = (spectrum.energy(a) - e0) * (spectrum.energy(b) - e0) * (spectrum.energy(c) - e0);
        sum += num / den;
      }
    }
  }
  return sum / 256.0;
}

struct SignatureResult {
  std::size_t order = 0;
  std::vector<double> per_state;  // Z^n_N, units mK^-(N-1)
  double thermal = 0.0;
  double temperature = 0.0;
  bool normalized = true;
  // Boltzmann weights are exp(-(E_n - E_0)/T); the literal unshifted average
  // is thermal * exp(-E_0/T) in the unnormalized mode.
  double partition_function = 0.0;
  double ground_energy = 0.0;
  std::size_t excluded_terms = 0;
};

/// Thermal signature sum_n Z^n_N w_n, divided by the partition function when
/// `normalized` is set.
inline SignatureResult thermal_signature(std::size_t order, const Spectrum& spectrum,
                                         const MomentMatrices& moments, double temperature,
                                         bool normalized = true) {
  const auto weights = boltzmann_weights(spectrum, temperature, false);
  SignatureResult r;
  r.order = order;
  r.temperature = temperature;
  r.normalized = normalized;
  r.ground_energy = spectrum.energy(0);
  r.partition_function = std::accumulate(weights.begin(), weights.end(), 0.0);
  r.per_state.resize(spectrum.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < spectrum.size(); ++n) {
    r.per_state[n] = z_signature(n, order, spectrum, moments);
    r.excluded_terms += excluded_labels(n, spectrum);
    sum += r.per_state[n] * weights[n];
  }
  r.thermal = normalized ? sum / r.partition_function : sum;
  return r;
}

}  // namespace tanglescope
