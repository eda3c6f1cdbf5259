#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tanglescope/clusters.hpp"
#include "tanglescope/correlators.hpp"
#include "tanglescope/random.hpp"

namespace tanglescope {

/// Fraction of the M^N index tuples that repeat at least one index,
/// 1 - M!/((M-N)! M^N), evaluated in exact integer arithmetic.
inline double repeated_fraction(std::size_t m, std::size_t n) {
  if (m < 1 || n < 1) throw std::invalid_argument("repeated_fraction needs M >= 1 and N >= 1");
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  cpp_int falling = 1, power = 1;
  for (std::size_t k = 0; k < n; ++k) {
    falling *= (k < m ? cpp_int(m - k) : cpp_int(0));
    power *= m;
  }
  const cpp_rational fraction(power - falling, power);
  return fraction.convert_to<double>();
}

/// Upper bound on the number of disjoint index strings,
/// M^N Q^-1 (N-1) (1 + Q^-1)^(N-2).
inline double disjoint_bound(std::size_t m, std::size_t n, std::size_t q) {
  if (m < 1 || n < 1 || q < 1) throw std::invalid_argument("disjoint_bound needs positive M, N, Q");
  const double qi = 1.0 / static_cast<double>(q);
  return std::pow(static_cast<double>(m), static_cast<double>(n)) * qi * static_cast<double>(n - 1) *
         std::pow(1.0 + qi, static_cast<double>(n) - 2.0);
}

/// Qubit register with a fixed cluster partition and no Hamiltonian.
struct SyntheticSystem {
  std::size_t qubits = 0;
  ClusterPartition partition;

  std::size_t clusters() const noexcept { return partition.blocks.size(); }

  void validate() const {
    partition.validate();
    if (partition.qubits() != qubits) throw std::invalid_argument("partition does not cover the register");
    if (clusters() > qubits) throw std::invalid_argument("more clusters than qubits");
  }

  /// Q consecutive blocks of `size` qubits each.
  static SyntheticSystem uniform(std::size_t q, std::size_t size) {
    if (q < 1 || size < 1) throw std::invalid_argument("need Q >= 1 and block size >= 1");
    std::vector<QubitSet> blocks(q);
    for (std::size_t b = 0; b < q; ++b)
      for (std::size_t k = 0; k < size; ++k) blocks[b].push_back(b * size + k);
    return {q * size, ClusterPartition::canonical(std::move(blocks))};
  }

  /// M qubits in Q consecutive blocks whose sizes differ by at most one.
  static SyntheticSystem balanced(std::size_t m, std::size_t q) {
    if (q < 1 || q > m) throw std::invalid_argument("need 1 <= Q <= M");
    std::vector<QubitSet> blocks(q);
    std::size_t next = 0;
    for (std::size_t b = 0; b < q; ++b) {
      const std::size_t size = m / q + (b < m % q ? 1 : 0);
      for (std::size_t k = 0; k < size; ++k) blocks[b].push_back(next++);
    }
    return {m, ClusterPartition::canonical(std::move(blocks))};
  }
};

struct StringCounts {
  std::uint64_t total = 0;
  std::uint64_t single_cluster = 0;
  std::uint64_t joint = 0;  // multi-cluster with a unique substring
  std::uint64_t disjoint = 0;
  bool exact = true;
  // Monte Carlo only: standard error and 95% interval of the disjoint fraction.
  double disjoint_stderr = 0.0;
  double disjoint_ci_low = 0.0;
  double disjoint_ci_high = 0.0;

  double disjoint_fraction() const { return total ? static_cast<double>(disjoint) / static_cast<double>(total) : 0.0; }

  StringCounts& operator+=(const StringCounts& o) {
    total += o.total;
    single_cluster += o.single_cluster;
    joint += o.joint;
    disjoint += o.disjoint;
    return *this;
  }
};

inline constexpr double kMaxExactStrings = 1e8;

namespace detail {

inline void tally(StringCounts& c, const std::size_t* blocks, std::size_t n) {
  ++c.total;
  switch (classify_blocks(blocks, n)) {
    case RunClass::SingleCluster: ++c.single_cluster; break;
    case RunClass::Joint: ++c.joint; break;
    case RunClass::Disjoint: ++c.disjoint; break;
  }
}

inline std::size_t worker_count(std::size_t jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  return jobs;
}

// Runs body(w) for w in [0, workers) on separate threads.
template <class F>
void parallel_for(std::size_t workers, F&& body) {
  if (workers <= 1) {
    body(std::size_t{0});
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        body(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline void mc_interval(StringCounts& c) {
  const double n = static_cast<double>(c.total);
  const double f = c.disjoint_fraction();
  c.exact = false;
  c.disjoint_stderr = n > 0 ? std::sqrt(f * (1.0 - f) / n) : 0.0;
  c.disjoint_ci_low = std::max(0.0, f - 1.96 * c.disjoint_stderr);
  c.disjoint_ci_high = std::min(1.0, f + 1.96 * c.disjoint_stderr);
}

}  // namespace detail

/// Classifies every one of the M^N index strings against the partition.
/// `jobs` = 0 uses all hardware threads; counts do not depend on it.
inline StringCounts count_strings_exact(const SyntheticSystem& system, std::size_t n, std::size_t jobs = 1) {
  system.validate();
  if (n < 1) throw std::invalid_argument("string length must be >= 1");
  const std::size_t m = system.qubits;
  if (std::pow(static_cast<double>(m), static_cast<double>(n)) > kMaxExactStrings)
    throw std::length_error("M^N exceeds the exact enumeration cap");
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= m;

  const auto label = system.partition.labels();
  const std::size_t workers = std::min<std::uint64_t>(detail::worker_count(jobs), total);
  std::vector<StringCounts> partial(workers);
  detail::parallel_for(workers, [&](std::size_t w) {
    const std::uint64_t begin = total * w / workers;
    const std::uint64_t end = total * (w + 1) / workers;
    std::vector<std::size_t> digits(n), blocks(n);
    std::uint64_t x = begin;
    for (std::size_t k = 0; k < n; ++k) {
      digits[k] = static_cast<std::size_t>(x % m);
      x /= m;
    }
    for (std::uint64_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < n; ++k) blocks[k] = label[digits[k]];
      detail::tally(partial[w], blocks.data(), n);
      for (std::size_t k = 0; k < n && ++digits[k] == m; ++k) digits[k] = 0;
    }
  });
  StringCounts out;
  for (const auto& p : partial) out += p;
  return out;
}

inline constexpr std::uint64_t kMonteCarloChunk = 1u << 16;

/// Uniformly sampled index strings. Work is cut into fixed chunks, each with
/// its own substream, so results depend only on (seed, trials).
inline StringCounts count_strings_mc(const SyntheticSystem& system, std::size_t n, std::uint64_t trials,
                                     std::uint64_t seed, std::size_t jobs = 1) {
  system.validate();
  if (n < 1) throw std::invalid_argument("string length must be >= 1");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const auto label = system.partition.labels();
  const std::uint64_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
  const std::size_t workers = std::min<std::uint64_t>(detail::worker_count(jobs), chunks);
  std::vector<StringCounts> per_chunk(chunks);
  detail::parallel_for(workers, [&](std::size_t w) {
    std::vector<std::size_t> blocks(n);
    for (std::uint64_t c = w; c < chunks; c += workers) {
      auto rng = SplitMix64::stream(seed, c);
      const std::uint64_t count = std::min(kMonteCarloChunk, trials - c * kMonteCarloChunk);
      for (std::uint64_t t = 0; t < count; ++t) {
        for (std::size_t k = 0; k < n; ++k) blocks[k] = label[rng.bounded(system.qubits)];
        detail::tally(per_chunk[c], blocks.data(), n);
      }
    }
  });
  StringCounts out;
  for (const auto& p : per_chunk) out += p;
  detail::mc_interval(out);
  return out;
}

enum class CountMode { Auto, Exact, MonteCarlo };

struct CountOptions {
  CountMode mode = CountMode::Auto;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// Exact counts when M^N fits under the cap (or was requested), otherwise
/// Monte Carlo with a reported interval.
inline StringCounts count_strings(const SyntheticSystem& system, std::size_t n, const CountOptions& options = {}) {
  const bool fits = std::pow(static_cast<double>(system.qubits), static_cast<double>(n)) <= kMaxExactStrings;
  if (options.mode == CountMode::Exact || (options.mode == CountMode::Auto && fits))
    return count_strings_exact(system, n, options.jobs);
  return count_strings_mc(system, n, options.trials, options.seed, options.jobs);
}

struct DecayRow {
  std::size_t clusters = 0;
  std::size_t qubits = 0;
  StringCounts counts;
  double bound_fraction = 0.0;  // disjoint_bound / M^N
};

struct DecayResult {
  std::size_t order = 0;
  std::vector<DecayRow> rows;
  double alpha = 0.0;  // fraction ~ Q^-alpha, log-log least squares
  double alpha_stderr = 0.0;
};

/// Sampled disjoint fraction for each Q (uniform blocks of `block_size`)
/// and the fitted decay exponent.
inline DecayResult decay_experiment(std::size_t n, const std::vector<std::size_t>& q_list, std::size_t block_size,
                                    std::uint64_t trials, std::uint64_t seed, std::size_t jobs = 1) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (block_size == 0) throw std::invalid_argument("block size must be positive");
  if (q_list.empty()) throw std::invalid_argument("no cluster counts given");
  DecayResult r;
  r.order = n;
  for (std::size_t i = 0; i < q_list.size(); ++i) {
    const std::size_t q = q_list[i];
    if (q < 1) throw std::invalid_argument("cluster count must be positive");
    const auto system = SyntheticSystem::uniform(q, block_size);
    DecayRow row;
    row.clusters = q;
    row.qubits = system.qubits;
    row.counts = count_strings_mc(system, n, trials, seed + 0x9e3779b97f4a7c15ULL * (i + 1), jobs);
    row.bound_fraction = disjoint_bound(system.qubits, n, q) /
                         std::pow(static_cast<double>(system.qubits), static_cast<double>(n));
    r.rows.push_back(row);
  }

  std::vector<double> xs, ys;
  for (const auto& row : r.rows) {
    if (row.counts.disjoint == 0) continue;
    xs.push_back(std::log(static_cast<double>(row.clusters)));
    ys.push_back(std::log(row.counts.disjoint_fraction()));
  }
  if (xs.size() < 2) throw NumericalError("fewer than two cluster counts with disjoint hits; cannot fit exponent");
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / k;
    my += ys[i] / k;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw NumericalError("cluster counts must differ to fit an exponent");
  const double slope = sxy / sxx;
  r.alpha = -slope;
  if (xs.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (my + slope * (xs[i] - mx));
      rss += e * e;
    }
    r.alpha_stderr = std::sqrt(rss / (k - 2.0) / sxx);
  }
  return r;
}

}  // namespace tanglescope
