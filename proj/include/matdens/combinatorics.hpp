#pragma once

#include <cstddef>
#include <vector>

namespace matdens {

/// Advances `idx` (a strictly increasing k-subset of {0..n-1}) to the next
/// subset in lexicographic order. Returns false after the last subset.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i-- > 0) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  return idx;
}

/// Calls fn(const std::vector<std::size_t>&) for every k-subset of {0..n-1}
/// in lexicographic order.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  auto idx = first_combination(k);
  do {
    fn(static_cast<const std::vector<std::size_t>&>(idx));
  } while (next_combination(idx, n));
}

/// Complement of a sorted subset within {0..n-1}.
inline std::vector<std::size_t> complement(const std::vector<std::size_t>& subset, std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n - subset.size());
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p < subset.size() && subset[p] == i) {
      ++p;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace matdens
