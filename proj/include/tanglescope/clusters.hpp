#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tanglescope/entanglement.hpp"
#include "tanglescope/union_find.hpp"

namespace tanglescope {

/// Partition of the qubits into disjoint blocks. Canonical form: each block
/// sorted, blocks ordered by their smallest element.
struct ClusterPartition {
  std::vector<QubitSet> blocks;
  std::optional<std::size_t> eigenstate;  // empty for maximal clusters
  bool borderline = false;  // a purity decision fell within 10x tol of the threshold

  static ClusterPartition canonical(std::vector<QubitSet> blocks,
                                    std::optional<std::size_t> eigenstate = std::nullopt) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::erase_if(blocks, [](const QubitSet& b) { return b.empty(); });
    std::sort(blocks.begin(), blocks.end(),
              [](const QubitSet& a, const QubitSet& b) { return a.front() < b.front(); });
    ClusterPartition p{std::move(blocks), eigenstate, false};
    p.validate();
    return p;
  }

  static ClusterPartition singletons(std::size_t qubits) {
    std::vector<QubitSet> blocks;
    for (std::size_t q = 0; q < qubits; ++q) blocks.push_back({q});
    return canonical(std::move(blocks));
  }

  std::size_t qubits() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size();
    return n;
  }

  std::size_t block_of(std::size_t qubit) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (std::binary_search(blocks[i].begin(), blocks[i].end(), qubit)) return i;
    throw std::out_of_range("qubit " + std::to_string(qubit) + " not in partition");
  }

  /// Block index of every qubit.
  std::vector<std::size_t> labels() const {
    std::vector<std::size_t> out(qubits());
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (auto q : blocks[i]) out[q] = i;
    return out;
  }

  std::size_t largest_block() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n = std::max(n, b.size());
    return n;
  }

  void validate() const {
    std::vector<bool> seen;
    for (const auto& b : blocks) {
      if (b.empty()) throw std::invalid_argument("empty block in partition");
      for (auto q : b) {
        if (q >= seen.size()) seen.resize(q + 1, false);
        if (seen[q]) throw std::invalid_argument("blocks overlap at qubit " + std::to_string(q));
        seen[q] = true;
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw std::invalid_argument("partition does not cover all qubits");
  }

  bool operator==(const ClusterPartition& other) const { return blocks == other.blocks; }
};

struct ClusterOptions {
  double purity_tol = 1e-8;  // a block is unentangled when purity >= 1 - tol
};

/// Finest split of a pure state into mutually unentangled blocks.
///
/// Pure subsets of a pure state are exactly the unions of its tensor factors,
/// so the block holding qubit q is the smallest pure subset of the still
/// unassigned qubits that contains q. Subsets are tried by increasing size,
/// then by descending mask; purity is evaluated on the smaller side of each cut.
inline ClusterPartition eigenstate_partition(const PureState& state,
                                             const ClusterOptions& options = {},
                                             std::optional<std::size_t> label = std::nullopt) {
  const double tol = options.purity_tol;
  if (!(tol > 0.0 && tol < 0.5)) throw std::invalid_argument("purity tolerance must be in (0, 0.5)");
  const std::size_t m = state.qubits();
  const QubitMask full = (QubitMask{1} << m) - 1;

  std::map<QubitMask, double> cache;
  bool borderline = false;
  auto purity = [&](QubitMask mask) {
    if (mask == full) return 1.0;
    const QubitMask side = 2 * std::popcount(mask) <= static_cast<int>(m) ? mask : (full & ~mask);
    auto it = cache.find(side);
    if (it != cache.end()) return it->second;
    const double p = partial_trace(state, from_mask(side)).purity();
    return cache.emplace(side, p).first->second;
  };
  auto pure = [&](QubitMask mask) {
    const double p = purity(mask);
    const double threshold = 1.0 - tol;
    if (std::abs(p - threshold) < 10.0 * tol && mask != full) borderline = true;
    return p >= threshold;
  };

  std::vector<QubitMask> blocks;
  QubitMask remaining = full;
  while (remaining) {
    const QubitMask q = remaining & (~remaining + 1);  // lowest unassigned qubit
    const QubitMask others = remaining & ~q;
    const int n_others = std::popcount(others);
    QubitMask block = remaining;
    // subsets of `others` by increasing size; the full remainder is pure by
    // construction (it is the complement of a union of pure blocks)
    for (int k = 0; k < n_others && block == remaining; ++k) {
      for (QubitMask sub = others;; sub = (sub - 1) & others) {
        if (std::popcount(sub) == k && pure(sub | q)) {
          block = sub | q;
          break;
        }
        if (sub == 0) break;
      }
    }
    blocks.push_back(block);
    remaining &= ~block;
  }

  std::vector<QubitSet> sets;
  for (QubitMask b : blocks) sets.push_back(from_mask(b));
  ClusterPartition out = ClusterPartition::canonical(std::move(sets), label);
  out.borderline = borderline;
  return out;
}

namespace detail {

inline std::size_t common_qubits(const std::vector<ClusterPartition>& partitions) {
  if (partitions.empty()) throw std::invalid_argument("no partitions given");
  const std::size_t m = partitions.front().qubits();
  for (const auto& p : partitions)
    if (p.qubits() != m) throw std::invalid_argument("partitions cover different qubit counts");
  return m;
}

}  // namespace detail

/// Finest common coarsening of all partitions (any two intersecting blocks
/// end up in the same maximal cluster).
inline ClusterPartition maximal_clusters(const std::vector<ClusterPartition>& partitions) {
  const std::size_t m = detail::common_qubits(partitions);
  UnionFind uf(m);
  for (const auto& p : partitions)
    for (const auto& block : p.blocks)
      for (std::size_t i = 1; i < block.size(); ++i) uf.unite(block[0], block[i]);

  std::map<std::size_t, QubitSet> groups;
  for (std::size_t q = 0; q < m; ++q) groups[uf.find(q)].push_back(q);
  std::vector<QubitSet> blocks;
  for (auto& [root, members] : groups) blocks.push_back(std::move(members));
  return ClusterPartition::canonical(std::move(blocks));
}

/// Witness of a failed nesting: qubits a, b share a block in the first
/// partition, b, c share a block in the second, a is outside the second
/// block and c is outside the first.
struct RussianDollViolation {
  std::size_t first_partition = 0;
  std::size_t second_partition = 0;
  std::optional<std::size_t> first_eigenstate;
  std::optional<std::size_t> second_eigenstate;
  std::size_t a = 0, b = 0, c = 0;
};

struct RussianDollReport {
  bool satisfied = true;
  std::optional<RussianDollViolation> violation;
};

/// Checks that any two blocks drawn from different partitions are either
/// disjoint or nested. Reports the first violation in scan order.
inline RussianDollReport russian_doll_check(const std::vector<ClusterPartition>& partitions) {
  detail::common_qubits(partitions);
  auto includes = [](const QubitSet& outer, const QubitSet& inner) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
  };
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    for (std::size_t j = i + 1; j < partitions.size(); ++j) {
      for (const auto& x : partitions[i].blocks) {
        for (const auto& y : partitions[j].blocks) {
          QubitSet both;
          std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
          if (both.empty() || includes(x, y) || includes(y, x)) continue;
          QubitSet only_x, only_y;
          std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(only_x));
          std::set_difference(y.begin(), y.end(), x.begin(), x.end(), std::back_inserter(only_y));
          RussianDollViolation v{i, j, partitions[i].eigenstate, partitions[j].eigenstate,
                                 only_x.front(), both.front(), only_y.front()};
          return {false, v};
        }
      }
    }
  }
  return {true, std::nullopt};
}

/// Eigenstate partitions of every eigenvector in a spectrum.
inline std::vector<ClusterPartition> eigenstate_partitions(const Spectrum& spectrum,
                                                           const ClusterOptions& options = {}) {
  std::vector<ClusterPartition> out;
  for (std::size_t n = 0; n < spectrum.size(); ++n)
    out.push_back(eigenstate_partition(PureState::eigenstate(spectrum, n), options, n));
  return out;
}

}  // namespace tanglescope
