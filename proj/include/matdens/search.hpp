#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "matdens/fraction.hpp"
#include "matdens/symbol_matrix.hpp"

namespace matdens {

struct SearchOptions {
  bool monotone_only = false;
  /// Maximum number of candidate host matrices. The default admits binary
  /// n <= 5, ternary n <= 4 and four-symbol n = 4.
  double budget = 5e9;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct SearchResult {
  ExactFraction best_value;
  SymbolMatrix witness;
  std::uint64_t explored = 0;
};

/// Number of host matrices f_exact would examine: k^(n^2), or the number of
/// monotone n x n matrices over the k symbols of H.
BigInt search_candidates(const SymbolMatrix& H, std::size_t n, bool monotone_only);

/// Exact maximum density of H over n x n matrices using H's symbols
/// (monotone matrices only when requested, under the ascending symbol order).
/// Among maximizers the witness is the first in row-major lexicographic order.
SearchResult f_exact(const SymbolMatrix& H, std::size_t n, const SearchOptions& options = {});

/// f_exact for n = h .. n_max.
std::vector<ExactFraction> f_sequence(const SymbolMatrix& H, std::size_t n_max, const SearchOptions& options = {});

struct FerrersOptimum {
  BigInt objective;                       // max sum_{i<j} Z_j (Z_i - Z_j)
  std::vector<std::size_t> zero_counts;   // Z, nonincreasing
  std::size_t n = 0;

  /// objective / C(n,2)^2, the maximum density of (0 0;0 1) over monotone n x n matrices.
  ExactFraction normalized() const;
};

/// Maximizes sum_{i<j} Z_j (Z_i - Z_j) over integer n >= Z_1 >= ... >= Z_n >= 0.
///
/// Writing S = sum Z, the objective equals (S^2 - sum_j (2j-1) Z_j^2) / 2 for
/// nonincreasing Z. For fixed S the subtracted term is a separable convex cost
/// with increasing weights, so marginal-cost allocation of the S units is
/// optimal and already nonincreasing; allocating units one at a time yields
/// the optimum for every S in a single O(n^2 log n) pass.
FerrersOptimum ferrers_optimum(std::size_t n);

/// Monotone 0/1 matrix with the given per-row zero counts (zeros on the left).
SymbolMatrix ferrers_matrix(const std::vector<std::size_t>& zero_counts, std::size_t cols);

}  // namespace matdens
