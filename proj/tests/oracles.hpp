#pragma once
// Independent reference implementations used only by tests.

#include <cstdint>
#include <vector>

#include "matdens/combinatorics.hpp"
#include "matdens/fraction.hpp"
#include "matdens/symbol_matrix.hpp"

namespace oracle {

using matdens::SymbolMatrix;

// Direct enumeration of all row and column subsets.
inline std::uint64_t brute_count(const SymbolMatrix& H, const SymbolMatrix& M) {
  std::uint64_t total = 0;
  if (H.rows() > M.rows() || H.cols() > M.cols()) return 0;
  matdens::for_each_combination(M.rows(), H.rows(), [&](const std::vector<std::size_t>& r) {
    matdens::for_each_combination(M.cols(), H.cols(), [&](const std::vector<std::size_t>& c) {
      bool ok = true;
      for (std::size_t i = 0; i < r.size() && ok; ++i)
        for (std::size_t j = 0; j < c.size() && ok; ++j) ok = M.at(r[i], c[j]) == H.at(i, j);
      if (ok) ++total;
    });
  });
  return total;
}

// Maximum of sum_{i<j} Z_j (Z_i - Z_j) over n >= Z_1 >= ... >= Z_n >= 0 by
// dynamic programming over (index, current value, prefix sum): at step j the
// new term is Z_j * (prefix - (j-1) Z_j).
inline std::int64_t ferrers_dp(int n) {
  const int smax = n * n;
  const std::int64_t NEG = INT64_MIN / 4;
  // best[v][s]: best value with last Z = v and prefix sum s
  std::vector<std::vector<std::int64_t>> best(n + 1, std::vector<std::int64_t>(smax + 1, NEG));
  for (int v = 0; v <= n; ++v) best[v][v] = 0;
  for (int j = 2; j <= n; ++j) {
    std::vector<std::vector<std::int64_t>> next(n + 1, std::vector<std::int64_t>(smax + 1, NEG));
    for (int v = 0; v <= n; ++v)
      for (int s = 0; s <= smax; ++s) {
        if (best[v][s] == NEG) continue;
        for (int w = 0; w <= v; ++w) {
          if (s + w > smax) break;
          const std::int64_t val = best[v][s] + static_cast<std::int64_t>(w) * (s - static_cast<std::int64_t>(j - 1) * w);
          if (val > next[w][s + w]) next[w][s + w] = val;
        }
      }
    best.swap(next);
  }
  std::int64_t out = NEG;
  for (auto& row : best)
    for (auto x : row) out = std::max(out, x);
  return out;
}

// Deterministic xorshift generator for property tests.
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed ? seed : 1) {}
  std::uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  std::size_t below(std::size_t k) { return static_cast<std::size_t>(next() % k); }
};

inline SymbolMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c, std::size_t k) {
  SymbolMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = static_cast<matdens::Symbol>(rng.below(k));
  return m;
}

}  // namespace oracle
