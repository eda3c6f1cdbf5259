#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tanglescope/linalg.hpp"

namespace tanglescope {

// Qubits are numbered 0..M-1 in the C++ API; the CLI and config files use
// 1-based labels. Bit k of a basis index is qubit k, bit value 0 is the
// sigma^z = +1 ("up") state.

inline constexpr std::size_t kMaxQubits = 14;

inline constexpr int sigma_z(std::size_t basis_index, std::size_t qubit) noexcept {
  return ((basis_index >> qubit) & 1U) ? -1 : 1;
}

inline constexpr std::size_t dimension(std::size_t qubits) noexcept {
  return std::size_t{1} << qubits;
}

/// Sign and factor convention of the pseudospin Hamiltonian.
///   MainText:  H  = -sum(eps_i sz_i + Delta_i sx_i) + sum_{i<j} J_ij sz_i sz_j
///   Appendix:  H0 = -1/2 sum(Delta_i sx_i + eps_i sz_i) - sum_{i<j} J_ij sz_i sz_j
enum class Convention { MainText, Appendix };

using QubitPair = std::pair<std::size_t, std::size_t>;

/// Transverse-field Ising pseudospin model. Energies in mK (k_B = hbar = 1).
struct SpinHamiltonian {
  std::size_t qubits = 0;
  std::vector<double> delta;
  std::vector<double> epsilon;
  std::map<QubitPair, double> couplings;  // keys (i, j) with i < j
  Convention convention = Convention::MainText;

  static SpinHamiltonian uncoupled(std::vector<double> delta,
                                   std::vector<double> epsilon) {
    SpinHamiltonian h;
    h.qubits = delta.size();
    h.delta = std::move(delta);
    h.epsilon = std::move(epsilon);
    return h;
  }

  double coupling(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    auto it = couplings.find({i, j});
    return it == couplings.end() ? 0.0 : it->second;
  }

  void validate() const {
    if (qubits < 1) throw std::invalid_argument("at least one qubit required");
    if (qubits > kMaxQubits)
      throw std::invalid_argument("at most " + std::to_string(kMaxQubits) +
                                  " qubits supported");
    if (delta.size() != qubits || epsilon.size() != qubits)
      throw std::invalid_argument("delta/epsilon must have one entry per qubit");
    for (std::size_t k = 0; k < qubits; ++k)
      if (!std::isfinite(delta[k]) || !std::isfinite(epsilon[k]))
        throw std::invalid_argument("non-finite bias on qubit " +
                                    std::to_string(k));
    for (const auto& [pair, value] : couplings) {
      const auto [i, j] = pair;
      if (!(i < j) || j >= qubits)
        throw std::out_of_range("coupling index (" + std::to_string(i) + "," +
                                std::to_string(j) + ") out of range");
      if (!std::isfinite(value))
        throw std::invalid_argument("non-finite coupling (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
    }
  }
};

/// Dense Hamiltonian in the computational z-basis, assembled term by term
/// with bit operations on basis indices.
inline Matrix build_hamiltonian(const SpinHamiltonian& spec) {
  spec.validate();
  const std::size_t dim = dimension(spec.qubits);
  const bool appendix = spec.convention == Convention::Appendix;
  const double field = appendix ? 0.5 : 1.0;
  const double exchange = appendix ? -1.0 : 1.0;

  Matrix h = Matrix::Zero(dim, dim);
  for (std::size_t b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (std::size_t k = 0; k < spec.qubits; ++k)
      diag -= field * spec.epsilon[k] * sigma_z(b, k);
    for (const auto& [pair, jij] : spec.couplings)
      diag += exchange * jij * sigma_z(b, pair.first) * sigma_z(b, pair.second);
    h(b, b) = diag;
    for (std::size_t k = 0; k < spec.qubits; ++k)
      h(b, b ^ (std::size_t{1} << k)) -= field * spec.delta[k];
  }
  return h;
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// (columns, z-basis).
struct Spectrum {
  Vector energies;
  Matrix vectors;
  double degeneracy_tol = 0.0;
  std::size_t qubits = 0;  // 0 when the dimension is not a power of two

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(energies.size());
  }
  double energy(std::size_t n) const { return energies[static_cast<Eigen::Index>(n)]; }

  bool degenerate(std::size_t p, std::size_t q) const {
    return std::abs(energy(p) - energy(q)) <= degeneracy_tol;
  }

  /// Smallest level spacing that exceeds the degeneracy tolerance; 0 if the
  /// spectrum is fully degenerate.
  double smallest_gap() const {
    double gap = 0.0;
    for (std::size_t n = 1; n < size(); ++n) {
      const double d = energy(n) - energy(n - 1);
      if (d > degeneracy_tol && (gap == 0.0 || d < gap)) gap = d;
    }
    return gap;
  }
};

struct DiagonalizeOptions {
  JacobiOptions jacobi;
  // Degeneracy tolerance = degeneracy_rel_tol * (E_max - E_min).
  double degeneracy_rel_tol = 1e-9;
};

namespace detail {

inline std::size_t log2_exact(std::size_t dim) {
  std::size_t m = 0;
  while ((std::size_t{1} << m) < dim) ++m;
  return (std::size_t{1} << m) == dim ? m : 0;
}

// Flip the column so its largest-magnitude component is positive. Near-ties
// (within 1e-10 relative) go to the lowest index.
inline void fix_sign(Eigen::Ref<Vector> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= peak * (1.0 - 1e-10)) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace detail

inline Spectrum diagonalize(const Matrix& h, const DiagonalizeOptions& options = {}) {
  const JacobiResult raw = jacobi_eigen(h, options.jacobi);
  const auto n = static_cast<std::size_t>(raw.values.size());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw.values[static_cast<Eigen::Index>(a)] <
           raw.values[static_cast<Eigen::Index>(b)];
  });

  Spectrum s;
  s.energies.resize(static_cast<Eigen::Index>(n));
  s.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto src = static_cast<Eigen::Index>(order[k]);
    const auto dst = static_cast<Eigen::Index>(k);
    s.energies[dst] = raw.values[src];
    s.vectors.col(dst) = raw.vectors.col(src);
    detail::fix_sign(s.vectors.col(dst));
  }
  s.degeneracy_tol =
      options.degeneracy_rel_tol * (s.energies[s.energies.size() - 1] - s.energies[0]);
  s.qubits = detail::log2_exact(n);
  return s;
}

inline Spectrum solve(const SpinHamiltonian& spec, const DiagonalizeOptions& options = {}) {
  Spectrum s = diagonalize(build_hamiltonian(spec), options);
  s.qubits = spec.qubits;
  return s;
}

/// sigma^z matrix elements in the energy eigenbasis: per qubit, and their sum
/// (the total moment mu^z).
struct MomentMatrices {
  std::vector<Matrix> per_qubit;
  Matrix total;

  std::size_t qubits() const noexcept { return per_qubit.size(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(total.rows()); }
  double mu(std::size_t p, std::size_t q) const {
    return total(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  }
  double sigma(std::size_t k, std::size_t p, std::size_t q) const {
    return per_qubit[k](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  }
};

inline MomentMatrices moment_matrices(const Spectrum& spectrum) {
  const std::size_t dim = spectrum.size();
  if (spectrum.qubits == 0 || dimension(spectrum.qubits) != dim ||
      static_cast<std::size_t>(spectrum.vectors.rows()) != dim)
    throw std::invalid_argument("spectrum dimension is not 2^M");

  MomentMatrices m;
  m.total = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const Matrix& v = spectrum.vectors;
  for (std::size_t k = 0; k < spectrum.qubits; ++k) {
    Vector pattern(static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b)
      pattern[static_cast<Eigen::Index>(b)] = sigma_z(b, k);
    Matrix sk = v.transpose() * (pattern.asDiagonal() * v);
    sk = 0.5 * (sk + sk.transpose());
    m.total += sk;
    m.per_qubit.push_back(std::move(sk));
  }
  return m;
}

/// Boltzmann weights exp(-(E_n - E_0)/T), optionally normalized to sum to 1.
inline std::vector<double> boltzmann_weights(const Spectrum& spectrum, double temperature,
                                             bool normalized = true) {
  if (!(temperature > 0) || !std::isfinite(temperature))
    throw std::invalid_argument("temperature must be positive");
  std::vector<double> w(spectrum.size());
  const double e0 = spectrum.energy(0);
  for (std::size_t n = 0; n < w.size(); ++n)
    w[n] = std::exp(-(spectrum.energy(n) - e0) / temperature);
  if (normalized) {
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= z;
  }
  return w;
}

}  // namespace tanglescope
