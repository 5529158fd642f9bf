#include "matdens/search.hpp"

#include <algorithm>
#include <atomic>
#include <queue>
#include <thread>

#include "matdens/core.hpp"
#include "matdens/error.hpp"

namespace matdens {
namespace {

// Candidate rows of the host matrix, in lexicographic order.
struct RowSet {
  std::size_t width = 0;
  std::vector<Symbol> words;                 // row-major, count() rows of `width`
  std::vector<std::vector<std::uint32_t>> successors;  // monotone: rows dominating row x

  std::size_t count() const { return width == 0 ? 0 : words.size() / width; }
  const Symbol* word(std::size_t x) const { return words.data() + x * width; }
};

RowSet all_rows(const std::vector<Symbol>& syms, std::size_t n) {
  RowSet rs;
  rs.width = n;
  std::vector<std::size_t> digit(n, 0);
  const std::size_t k = syms.size();
  while (true) {
    for (std::size_t j = 0; j < n; ++j) rs.words.push_back(syms[digit[j]]);
    std::size_t p = n;
    while (p > 0 && ++digit[p - 1] == k) digit[--p] = 0;
    if (p == 0) break;
  }
  return rs;
}

RowSet monotone_rows(const std::vector<Symbol>& syms, std::size_t n) {
  RowSet rs;
  rs.width = n;
  std::vector<std::size_t> digit(n, 0);
  const std::size_t k = syms.size();
  while (true) {
    for (std::size_t j = 0; j < n; ++j) rs.words.push_back(syms[digit[j]]);
    // next nondecreasing digit string in lexicographic order
    std::size_t p = n;
    while (p > 0 && digit[p - 1] == k - 1) --p;
    if (p == 0) break;
    ++digit[p - 1];
    for (std::size_t j = p; j < n; ++j) digit[j] = digit[p - 1];
  }
  const std::size_t R = rs.count();
  rs.successors.resize(R);
  for (std::size_t x = 0; x < R; ++x)
    for (std::size_t y = 0; y < R; ++y) {
      const Symbol* a = rs.word(x);
      const Symbol* b = rs.word(y);
      bool dominates = true;
      for (std::size_t j = 0; j < n && dominates; ++j) dominates = b[j] >= a[j];
      if (dominates) rs.successors[x].push_back(static_cast<std::uint32_t>(y));
    }
  return rs;
}

BigInt monotone_count(const RowSet& rs, std::size_t n) {
  const std::size_t R = rs.count();
  std::vector<BigInt> ways(R, 1);
  for (std::size_t d = 1; d < n; ++d) {
    std::vector<BigInt> next(R, 0);
    for (std::size_t x = 0; x < R; ++x)
      for (std::uint32_t y : rs.successors[x]) next[y] += ways[x];
    ways.swap(next);
  }
  BigInt total = 0;
  for (const auto& w : ways) total += w;
  return total;
}

struct ItemResult {
  std::uint64_t value = 0;
  bool found = false;
  std::vector<std::uint32_t> rows;
  std::uint64_t explored = 0;
};

class Searcher {
 public:
  Searcher(const SymbolMatrix& H, const RowSet& rows, std::size_t n, bool monotone)
      : H_(H), rows_(rows), n_(n), monotone_(monotone), R_(rows.count()) {
    if (H.rows() == 2 && R_ <= 4096) build_pair_table();
  }

  ItemResult run(std::uint32_t first_row) const {
    ItemResult res;
    std::vector<std::uint32_t> path(n_);
    path[0] = first_row;
    if (!pair_.empty()) {
      std::vector<std::uint64_t> V(n_ * R_, 0);
      for (std::size_t y = 0; y < R_; ++y) V[R_ + y] = pair_[first_row * R_ + y];
      dfs_pair(1, 0, path, V, res);
    } else {
      PatternCounter counter(H_);
      std::vector<Symbol> host(n_ * n_);
      std::copy_n(rows_.word(first_row), n_, host.begin());
      dfs_generic(1, path, host, counter, res);
    }
    return res;
  }

 private:
  void build_pair_table() {
    PatternCounter counter(H_);
    pair_.assign(R_ * R_, 0);
    std::vector<Symbol> two(2 * n_);
    const std::size_t idx[2] = {0, 1};
    for (std::size_t x = 0; x < R_; ++x)
      for (std::size_t y = 0; y < R_; ++y) {
        std::copy_n(rows_.word(x), n_, two.begin());
        std::copy_n(rows_.word(y), n_, two.begin() + n_);
        pair_[x * R_ + y] = static_cast<std::uint32_t>(counter.count_in_rows(two.data(), n_, idx));
      }
  }

  template <typename Fn>
  void for_allowed(std::uint32_t prev, Fn&& fn) const {
    if (monotone_) {
      for (std::uint32_t y : rows_.successors[prev]) fn(y);
    } else {
      for (std::uint32_t y = 0; y < R_; ++y) fn(y);
    }
  }

  // V[d*R + y] = sum over chosen rows i < d of pair(row_i, y).
  void dfs_pair(std::size_t d, std::uint64_t partial, std::vector<std::uint32_t>& path, std::vector<std::uint64_t>& V,
                ItemResult& res) const {
    const std::uint64_t* Vd = V.data() + d * R_;
    if (d + 1 == n_) {
      for_allowed(path[d - 1], [&](std::uint32_t x) {
        ++res.explored;
        const std::uint64_t val = partial + Vd[x];
        if (!res.found || val > res.value) {
          res.found = true;
          res.value = val;
          res.rows = path;
          res.rows[d] = x;
        }
      });
      return;
    }
    for_allowed(path[d - 1], [&](std::uint32_t x) {
      path[d] = x;
      std::uint64_t* Vn = V.data() + (d + 1) * R_;
      const std::uint32_t* P = pair_.data() + static_cast<std::size_t>(x) * R_;
      for (std::size_t y = 0; y < R_; ++y) Vn[y] = Vd[y] + P[y];
      dfs_pair(d + 1, partial + Vd[x], path, V, res);
    });
  }

  void dfs_generic(std::size_t d, std::vector<std::uint32_t>& path, std::vector<Symbol>& host,
                   PatternCounter& counter, ItemResult& res) const {
    if (d == n_) {
      ++res.explored;
      const auto val = static_cast<std::uint64_t>(counter.count(host.data(), n_, n_));
      if (!res.found || val > res.value) {
        res.found = true;
        res.value = val;
        res.rows = path;
      }
      return;
    }
    for_allowed(path[d - 1], [&](std::uint32_t x) {
      path[d] = x;
      std::copy_n(rows_.word(x), n_, host.begin() + d * n_);
      dfs_generic(d + 1, path, host, counter, res);
    });
  }

  const SymbolMatrix& H_;
  const RowSet& rows_;
  std::size_t n_;
  bool monotone_;
  std::size_t R_;
  std::vector<std::uint32_t> pair_;
};

unsigned worker_count(unsigned requested) {
  if (requested) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

}  // namespace

BigInt search_candidates(const SymbolMatrix& H, std::size_t n, bool monotone_only) {
  const auto syms = H.symbols();
  if (!monotone_only) return power(BigInt(static_cast<unsigned long>(syms.size())), n * n);
  return monotone_count(monotone_rows(syms, n), n);
}

SearchResult f_exact(const SymbolMatrix& H, std::size_t n, const SearchOptions& options) {
  if (!H.is_square() || H.empty()) throw DimensionError("f_exact: pattern must be square and nonempty");
  const std::size_t h = H.rows();
  if (h > n) throw DimensionError("f_exact: pattern order exceeds n");

  const auto syms = H.symbols();
  const BigInt cost = search_candidates(H, n, options.monotone_only);
  if (cost > BigInt(options.budget) || cost.get_d() > options.budget)
    throw BudgetExceeded("f_exact: " + cost.get_str() + " candidate matrices exceed budget", cost.get_d());

  const RowSet rows = options.monotone_only ? monotone_rows(syms, n) : all_rows(syms, n);
  const Searcher searcher(H, rows, n, options.monotone_only);

  const std::size_t items = rows.count();
  std::vector<ItemResult> results(items);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < items; i = next++) results[i] = searcher.run(static_cast<std::uint32_t>(i));
  };
  const unsigned workers = std::min<std::size_t>(worker_count(options.workers), items);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // Deterministic reduction: item order is lexicographic order of the witness.
  const ItemResult* best = nullptr;
  std::uint64_t explored = 0;
  for (const auto& r : results) {
    explored += r.explored;
    if (r.found && (!best || r.value > best->value)) best = &r;
  }
  SearchResult out;
  out.explored = explored;
  out.witness = SymbolMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.witness.at(i, j) = rows.word(best->rows[i])[j];
  const BigInt denom = binomial(n, h) * binomial(n, h);
  out.best_value = ExactFraction(BigInt(static_cast<unsigned long>(best->value)), denom);
  return out;
}

std::vector<ExactFraction> f_sequence(const SymbolMatrix& H, std::size_t n_max, const SearchOptions& options) {
  std::vector<ExactFraction> out;
  for (std::size_t n = H.rows(); n <= n_max; ++n) out.push_back(f_exact(H, n, options).best_value);
  return out;
}

ExactFraction FerrersOptimum::normalized() const {
  const BigInt pairs = binomial(n, 2);
  return ExactFraction(objective, pairs * pairs);
}

FerrersOptimum ferrers_optimum(std::size_t n) {
  if (n < 2) throw DimensionError("ferrers_optimum: n must be at least 2");
  // Min-heap of (marginal cost, index); marginal cost of raising Z_j is (2j-1)(2 Z_j + 1), j 1-based.
  using Item = std::pair<std::uint64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<std::size_t> z(n, 0);
  for (std::size_t j = 0; j < n; ++j) heap.emplace(2 * j + 1, j);

  BigInt cost = 0;
  BigInt best = 0;
  std::vector<std::size_t> best_z = z;
  for (std::size_t s = 1; s <= n * n; ++s) {
    auto [marginal, j] = heap.top();
    heap.pop();
    cost += BigInt(static_cast<unsigned long>(marginal));
    ++z[j];
    if (z[j] < n) heap.emplace((2 * j + 1) * (2 * z[j] + 1), j);
    const BigInt S = static_cast<unsigned long>(s);
    const BigInt objective = (S * S - cost) / 2;
    if (objective > best) {
      best = objective;
      best_z = z;
    }
  }
  FerrersOptimum out;
  out.objective = best;
  out.zero_counts = best_z;
  out.n = n;
  return out;
}

SymbolMatrix ferrers_matrix(const std::vector<std::size_t>& zero_counts, std::size_t cols) {
  SymbolMatrix m(zero_counts.size(), cols, 1);
  for (std::size_t i = 0; i < zero_counts.size(); ++i) {
    if (zero_counts[i] > cols) throw DimensionError("ferrers_matrix: zero count exceeds width");
    for (std::size_t j = 0; j < zero_counts[i]; ++j) m.at(i, j) = 0;
  }
  return m;
}

}  // namespace matdens
