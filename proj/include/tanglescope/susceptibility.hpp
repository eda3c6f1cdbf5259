#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tanglescope/spectral.hpp"

namespace tanglescope {

using Complex = std::complex<double>;

/// Drive frequencies (mK, hbar = 1) and the finite broadening eta that
/// replaces the +i0 prescription.
struct FrequencyPoint {
  double omega = 0.0;
  double omega_prime = 0.0;
  double broadening = 0.0;

  void validate() const {
    if (!(broadening > 0.0) || !std::isfinite(broadening))
      throw std::invalid_argument("broadening must be positive");
    if (!std::isfinite(omega) || !std::isfinite(omega_prime))
      throw std::invalid_argument("frequencies must be finite");
  }
};

/// Default broadening: 1e-6 of the smallest nonzero level gap.
inline double default_broadening(const Spectrum& spectrum) {
  const double gap = spectrum.smallest_gap();
  return 1e-6 * (gap > 0.0 ? gap : 1.0);
}

/// C_{n;pq} = mu_np mu_pq mu_qn.
inline double weight_factor(std::size_t n, std::size_t p, std::size_t q,
                            const MomentMatrices& moments) {
  return moments.mu(n, p) * moments.mu(p, q) * moments.mu(q, n);
}

/// The same weight expanded as sum_{ijk} <n|sz_i|p><p|sz_j|q><q|sz_k|n>.
inline double weight_factor_distributed(std::size_t n, std::size_t p, std::size_t q,
                                        const MomentMatrices& moments) {
  double sum = 0.0;
  for (std::size_t i = 0; i < moments.qubits(); ++i)
    for (std::size_t j = 0; j < moments.qubits(); ++j)
      for (std::size_t k = 0; k < moments.qubits(); ++k)
        sum += moments.sigma(i, n, p) * moments.sigma(j, p, q) * moments.sigma(k, q, n);
  return sum;
}

/// Second-order formfactor f_{n;pq}(omega, omega') with +i0 -> +i eta.
inline Complex formfactor(std::size_t n, std::size_t p, std::size_t q, const FrequencyPoint& point,
                          const Spectrum& spectrum) {
  point.validate();
  const Complex i0{0.0, point.broadening};
  const double w = point.omega;
  const double wp = point.omega_prime;
  const double en = spectrum.energy(n);
  const double ep = spectrum.energy(p);
  const double eq = spectrum.energy(q);

  const Complex outer = 1.0 / (w + wp - (eq - ep) + i0);
  const Complex first = (en + eq - 2.0 * ep) / ((wp - (eq - en) + i0) * (w + wp - (ep - en) + i0));
  const Complex second = (en + ep - 2.0 * eq) / ((wp - (en - ep) + i0) * (w + wp - (en - eq) + i0));
  return outer * (first - second);
}

/// Per-state bracket chi^n(omega, omega') = sum_{pq} C_{n;pq} f_{n;pq}.
inline Complex chi2_state(std::size_t n, const FrequencyPoint& point, const Spectrum& spectrum,
                          const MomentMatrices& moments) {
  point.validate();
  const std::size_t dim = spectrum.size();
  Complex sum{0.0, 0.0};
  for (std::size_t p = 0; p < dim; ++p) {
    const double np = moments.mu(n, p);
    if (np == 0.0) continue;
    for (std::size_t q = 0; q < dim; ++q) {
      const double c = np * moments.mu(p, q) * moments.mu(q, n);
      if (c == 0.0) continue;
      sum += c * formfactor(n, p, q, point, spectrum);
    }
  }
  return sum;
}

struct Chi2Result {
  FrequencyPoint point;
  double temperature = 0.0;
  std::vector<Complex> per_state;
  std::vector<double> occupation;  // normalized Boltzmann populations
  Complex thermal{0.0, 0.0};
};

/// Quadratic susceptibility chi_zz(omega, omega') = sum_n rho_n chi^n.
inline Chi2Result chi2(const FrequencyPoint& point, const Spectrum& spectrum,
                       const MomentMatrices& moments, double temperature) {
  point.validate();
  Chi2Result r;
  r.point = point;
  r.temperature = temperature;
  r.occupation = boltzmann_weights(spectrum, temperature, true);
  r.per_state.resize(spectrum.size());
  for (std::size_t n = 0; n < spectrum.size(); ++n) {
    r.per_state[n] = chi2_state(n, point, spectrum, moments);
    r.thermal += r.occupation[n] * r.per_state[n];
  }
  return r;
}

/// Complex amplitude of the e^{-2 i w0 t} moment response to a monochromatic
/// drive of amplitude `field` at w0: field^2 chi_zz(w0, w0).
inline Complex second_harmonic(double field, const Complex& chi_diagonal) {
  return field * field * chi_diagonal;
}

struct StaticSplit {
  double chi0A = 0.0;
  double chi0B = 0.0;
  double total = 0.0;
};

/// Static limit of chi^n split into the single-qubit-like part
///   A = 3 sum'_q |mu_nq|^2 (mu_nn - mu_qq) / (E_q - E_n)^2
/// and the three-chain part
///   B = -6 sum'_p sum'_{q<p} Re C_npq / ((E_p - E_n)(E_q - E_n)),
/// primes excluding states degenerate with n.
inline StaticSplit static_split(std::size_t n, const Spectrum& spectrum, const MomentMatrices& moments) {
  if (n >= spectrum.size()) throw std::out_of_range("eigenstate label out of range");
  const double en = spectrum.energy(n);
  const std::size_t dim = spectrum.size();
  StaticSplit s;
  for (std::size_t q = 0; q < dim; ++q) {
    if (spectrum.degenerate(q, n)) continue;
    const double dq = spectrum.energy(q) - en;
    const double mnq = moments.mu(n, q);
    s.chi0A += 3.0 * mnq * mnq * (moments.mu(n, n) - moments.mu(q, q)) / (dq * dq);
  }
  for (std::size_t p = 0; p < dim; ++p) {
    if (spectrum.degenerate(p, n)) continue;
    const double dp = spectrum.energy(p) - en;
    for (std::size_t q = 0; q < p; ++q) {
      if (spectrum.degenerate(q, n)) continue;
      const double dq = spectrum.energy(q) - en;
      s.chi0B += -6.0 * weight_factor(n, p, q, moments) / (dp * dq);
    }
  }
  s.total = s.chi0A + s.chi0B;
  return s;
}

}  // namespace tanglescope
