#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tanglescope/clusters.hpp"
#include "tanglescope/spectral.hpp"

namespace tanglescope {

#ifdef NDEBUG
inline constexpr bool kCrossCheckByDefault = false;
#else
inline constexpr bool kCrossCheckByDefault = true;
#endif

/// Qubit indices j_1..j_N the sigma^z operators act on (repeats allowed).
struct IndexString {
  std::vector<std::size_t> qubits;

  std::size_t size() const noexcept { return qubits.size(); }
  std::size_t operator[](std::size_t k) const { return qubits[k]; }

  void validate(std::size_t m) const {
    if (qubits.size() < 2) throw std::invalid_argument("index string needs N >= 2");
    for (auto j : qubits)
      if (j >= m) throw std::out_of_range("qubit index " + std::to_string(j) + " out of range");
  }
};

/// Eigenstate labels p_1..p_N of a cyclic matrix-element chain.
struct LabelChain {
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t operator[](std::size_t k) const { return labels[k]; }

  bool irreducible() const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = i + 1; j < labels.size(); ++j)
        if (labels[i] == labels[j]) return false;
    return true;
  }

  void validate(std::size_t dim) const {
    for (auto p : labels)
      if (p >= dim) throw std::out_of_range("eigenstate label " + std::to_string(p) + " out of range");
  }
};

/// <p_1|S_1|p_2><p_2|S_2|p_3>...<p_N|S_N|p_1> with S_k = sigma^z on qubit j_k.
inline double chain_value(const IndexString& string, const LabelChain& chain,
                          const MomentMatrices& moments) {
  if (string.size() != chain.size()) throw std::invalid_argument("string and label chain differ in length");
  string.validate(moments.qubits());
  chain.validate(moments.size());
  const std::size_t n = string.size();
  double value = 1.0;
  for (std::size_t k = 0; k < n; ++k)
    value *= moments.sigma(string[k], chain[k], chain[(k + 1) % n]);
  return value;
}

inline constexpr double kMaxEnumeration = 1e8;

/// <p|S_1(t_1)...S_N(t_N)|p> with S(t) = e^{iHt} S e^{-iHt}, expanded over
/// internal eigenstate labels. Times in 1/mK.
inline std::complex<double> heisenberg_correlator(const IndexString& string,
                                                  const std::vector<double>& times, std::size_t p,
                                                  const Spectrum& spectrum,
                                                  const MomentMatrices& moments) {
  string.validate(moments.qubits());
  if (times.size() != string.size()) throw std::invalid_argument("need one time per operator");
  const std::size_t dim = spectrum.size();
  if (p >= dim) throw std::out_of_range("eigenstate label out of range");
  const std::size_t n = string.size();
  if (std::pow(static_cast<double>(dim), static_cast<double>(n - 1)) > kMaxEnumeration)
    throw std::length_error("label enumeration too large");

  std::vector<std::size_t> labels(n + 1);
  labels[0] = labels[n] = p;
  std::complex<double> total{0.0, 0.0};

  // Depth-first over p_2..p_N carrying the running amplitude and phase.
  auto recurse = [&](auto&& self, std::size_t k, double amplitude, double phase) -> void {
    if (k == n) {
      const double a = amplitude * moments.sigma(string[n - 1], labels[n - 1], p);
      const double ph = phase + (spectrum.energy(labels[n - 1]) - spectrum.energy(p)) * times[n - 1];
      total += a * std::complex<double>(std::cos(ph), std::sin(ph));
      return;
    }
    for (std::size_t q = 0; q < dim; ++q) {
      const double a = amplitude * moments.sigma(string[k - 1], labels[k - 1], q);
      if (a == 0.0) continue;
      labels[k] = q;
      self(self, k + 1, a, phase + (spectrum.energy(labels[k - 1]) - spectrum.energy(q)) * times[k - 1]);
    }
  };
  recurse(recurse, 1, 1.0, 0.0);
  return total;
}

enum class Verdict { Joint, Disjoint };

/// Maximal run of string positions whose qubits share a partition block.
struct Substring {
  std::vector<std::size_t> positions;
  std::size_t block = 0;
};

struct StringClassification {
  std::vector<Substring> substrings;  // after cyclic concatenation
  Verdict verdict = Verdict::Joint;
  std::optional<std::size_t> unique_substring;  // first substring whose block occurs once

  bool single_cluster() const noexcept { return substrings.size() == 1; }
  /// Joint across at least two clusters (the case where irreducible chains vanish).
  bool multi_cluster_joint() const noexcept { return verdict == Verdict::Joint && !single_cluster(); }
};

namespace detail {

enum class RunClass { SingleCluster, Joint, Disjoint };

// Classify a cyclic sequence of block ids without materializing substrings.
inline RunClass classify_blocks(const std::size_t* blocks, std::size_t n) {
  std::size_t run_blocks[64];
  if (n > 64) throw std::length_error("string longer than 64 indices");
  std::size_t runs = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (k == 0 || blocks[k] != blocks[k - 1]) run_blocks[runs++] = blocks[k];
  if (runs > 1 && run_blocks[0] == run_blocks[runs - 1]) --runs;
  if (runs == 1) return RunClass::SingleCluster;
  for (std::size_t r = 0; r < runs; ++r) {
    std::size_t count = 0;
    for (std::size_t s = 0; s < runs; ++s) count += run_blocks[s] == run_blocks[r];
    if (count == 1) return RunClass::Joint;
  }
  return RunClass::Disjoint;
}

}  // namespace detail

/// Splits the string into maximal single-block runs (first and last runs in
/// the same block concatenate cyclically) and looks for a unique run.
inline StringClassification classify_string(const IndexString& string,
                                            const ClusterPartition& partition) {
  const std::size_t n = string.size();
  string.validate(partition.qubits());
  const auto block = partition.labels();

  StringClassification out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t b = block[string[k]];
    if (out.substrings.empty() || out.substrings.back().block != b)
      out.substrings.push_back({{}, b});
    out.substrings.back().positions.push_back(k);
  }
  if (out.substrings.size() > 1 && out.substrings.front().block == out.substrings.back().block) {
    auto& head = out.substrings.front().positions;
    auto tail = std::move(out.substrings.back().positions);
    out.substrings.pop_back();
    tail.insert(tail.end(), head.begin(), head.end());
    head = std::move(tail);
  }
  for (std::size_t r = 0; r < out.substrings.size(); ++r) {
    std::size_t count = 0;
    for (const auto& s : out.substrings) count += s.block == out.substrings[r].block;
    if (count == 1) {
      out.unique_substring = r;
      break;
    }
  }
  out.verdict = out.unique_substring ? Verdict::Joint : Verdict::Disjoint;
  return out;
}

struct GlobalCorrelatorOptions {
  bool cross_check = kCrossCheckByDefault;
  double cross_check_tol = 1e-10;
  double max_enumeration = 1e7;
};

/// M^-N times the sum of chain_value over all M^N index tuples, by explicit
/// enumeration.
inline double global_irreducible_enumerated(const LabelChain& chain, const MomentMatrices& moments,
                                            double max_enumeration = 1e7) {
  const std::size_t m = moments.qubits();
  const std::size_t n = chain.size();
  if (std::pow(static_cast<double>(m), static_cast<double>(n)) > max_enumeration)
    throw std::length_error("index tuple enumeration exceeds cap");
  IndexString string{std::vector<std::size_t>(n, 0)};
  double sum = 0.0;
  for (;;) {
    sum += chain_value(string, chain, moments);
    std::size_t k = 0;
    while (k < n && ++string.qubits[k] == m) string.qubits[k++] = 0;
    if (k == n) break;
  }
  return sum / std::pow(static_cast<double>(m), static_cast<double>(n));
}

/// Global irreducible correlator C^irr_N for pairwise-distinct labels,
/// evaluated as prod_k mu^z_{p_k p_{k+1}} / M^N.
inline double global_irreducible(const LabelChain& chain, const Spectrum& spectrum,
                                 const MomentMatrices& moments,
                                 const GlobalCorrelatorOptions& options = {}) {
  if (chain.size() < 2) throw std::invalid_argument("chain needs N >= 2");
  chain.validate(spectrum.size());
  if (!chain.irreducible()) throw std::invalid_argument("labels are not pairwise distinct");
  const std::size_t n = chain.size();
  double product = 1.0;
  for (std::size_t k = 0; k < n; ++k) product *= moments.mu(chain[k], chain[(k + 1) % n]);
  const double value = product / std::pow(static_cast<double>(moments.qubits()), static_cast<double>(n));

  if (options.cross_check &&
      std::pow(static_cast<double>(moments.qubits()), static_cast<double>(n)) <= options.max_enumeration) {
    const double check = global_irreducible_enumerated(chain, moments, options.max_enumeration);
    double scale = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      double row = 0.0;
      for (const auto& s : moments.per_qubit)
        row += std::abs(s(static_cast<Eigen::Index>(chain[k]), static_cast<Eigen::Index>(chain[(k + 1) % n])));
      scale *= row / static_cast<double>(moments.qubits());
    }
    if (std::abs(check - value) > options.cross_check_tol * std::max(scale, 1e-300))
      throw NumericalError("global correlator paths disagree");
  }
  return value;
}

}  // namespace tanglescope
