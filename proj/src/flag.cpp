#include "matdens/flag.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matdens/combinatorics.hpp"
#include "matdens/core.hpp"
#include "matdens/error.hpp"
#include "matdens/parallel.hpp"

namespace matdens {
namespace {

std::vector<std::size_t> merge_sorted(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
  return out;
}

// Positions of `marked` inside the sorted index list `all`.
std::vector<std::size_t> positions_in(const std::vector<std::size_t>& marked, const std::vector<std::size_t>& all) {
  std::vector<std::size_t> out;
  out.reserve(marked.size());
  for (std::size_t x : marked)
    out.push_back(static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), x) - all.begin()));
  return out;
}

MarkedMatrix subflag(const MarkedMatrix& K, const std::vector<std::size_t>& extra_rows,
                     const std::vector<std::size_t>& extra_cols) {
  const auto rows = merge_sorted(K.marked_rows, extra_rows);
  const auto cols = merge_sorted(K.marked_cols, extra_cols);
  MarkedMatrix out;
  out.base = K.base.submatrix(rows, cols);
  out.marked_rows = positions_in(K.marked_rows, rows);
  out.marked_cols = positions_in(K.marked_cols, cols);
  return out;
}

bool valid_marking(const std::vector<std::size_t>& idx, std::size_t limit) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= limit) return false;
    if (i > 0 && idx[i] <= idx[i - 1]) return false;
  }
  return true;
}

std::vector<std::size_t> key_of(const MarkedMatrix& m) {
  std::vector<std::size_t> key(m.marked_rows);
  key.insert(key.end(), m.marked_cols.begin(), m.marked_cols.end());
  for (Symbol s : m.base.entries()) key.push_back(s);
  return key;
}

// All k-subsets of `pool` (sorted), with bitmasks over host indices.
struct Choices {
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::uint64_t> masks;
};

Choices choices(const std::vector<std::size_t>& pool, std::size_t k) {
  Choices out;
  for_each_combination(pool.size(), k, [&](const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> s;
    std::uint64_t mask = 0;
    for (std::size_t i : idx) {
      s.push_back(pool[i]);
      mask |= std::uint64_t{1} << pool[i];
    }
    out.sets.push_back(std::move(s));
    out.masks.push_back(mask);
  });
  return out;
}

void require_same_type(const Flag& F, const Flag& G) {
  if (!(F.type() == G.type())) throw DimensionError("flags have different types");
  if (F.rows() != G.rows() || F.cols() != G.cols()) throw DimensionError("flags have different sizes");
}

}  // namespace

bool MarkedMatrix::is_flag_of(const FlagType& type) const {
  if (marked_rows.size() != type.a() || marked_cols.size() != type.b()) return false;
  if (!valid_marking(marked_rows, base.rows()) || !valid_marking(marked_cols, base.cols())) return false;
  for (std::size_t i = 0; i < type.a(); ++i)
    for (std::size_t j = 0; j < type.b(); ++j)
      if (base.at(marked_rows[i], marked_cols[j]) != type.sigma.at(i, j)) return false;
  return true;
}

Flag::Flag(FlagType type, MarkedMatrix marked) : type_(std::move(type)), marked_(std::move(marked)) {
  if (!marked_.is_flag_of(type_)) throw DimensionError("marked rows and columns do not induce the flag type");
}

FlagList::FlagList(FlagType type, std::size_t r, std::size_t c, std::size_t alphabet)
    : type_(std::move(type)), r_(r), c_(c), alphabet_(alphabet) {
  const std::size_t a = type_.a(), b = type_.b();
  if (a > r || b > c) throw DimensionError("enumerate_flags: type does not fit in the flag size");
  if (type_.sigma.alphabet_size() > alphabet) throw DimensionError("enumerate_flags: type uses symbols beyond alphabet");
  const double total = std::pow(static_cast<double>(alphabet), static_cast<double>(r * c - a * b));
  if (total > 1e8) throw BudgetExceeded("enumerate_flags: too many flags", total);

  for_each_combination(r, a, [&](const std::vector<std::size_t>& rows) {
    for_each_combination(c, b, [&](const std::vector<std::size_t>& cols) {
      SymbolMatrix base(r, c);
      std::vector<char> fixed(r * c, 0);
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
          base.at(rows[i], cols[j]) = type_.sigma.at(i, j);
          fixed[rows[i] * c + cols[j]] = 1;
        }
      std::vector<std::size_t> free;
      for (std::size_t cell = 0; cell < r * c; ++cell)
        if (!fixed[cell]) free.push_back(cell);
      std::vector<std::size_t> digit(free.size(), 0);
      while (true) {
        for (std::size_t f = 0; f < free.size(); ++f) base.at(free[f] / c, free[f] % c) = static_cast<Symbol>(digit[f]);
        MarkedMatrix m{base, rows, cols};
        index_.emplace(key_of(m), flags_.size());
        flags_.emplace_back(type_, std::move(m));
        std::size_t p = free.size();
        while (p > 0 && ++digit[p - 1] == alphabet) digit[--p] = 0;
        if (p == 0) break;
      }
    });
  });
}

long FlagList::index_of(const MarkedMatrix& m) const {
  if (m.base.rows() != r_ || m.base.cols() != c_) return -1;
  auto it = index_.find(key_of(m));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

FlagList enumerate_flags(const FlagType& type, std::size_t r, std::size_t c, std::size_t alphabet) {
  return FlagList(type, r, c, alphabet);
}

std::vector<SymbolMatrix> enumerate_matrices(std::size_t r, std::size_t c, std::size_t k, double budget) {
  if (r == 0 || c == 0 || k == 0) throw DimensionError("enumerate_matrices: dimensions and alphabet must be positive");
  const double total = std::pow(static_cast<double>(k), static_cast<double>(r * c));
  if (total > budget) throw BudgetExceeded("enumerate_matrices: " + std::to_string(total) + " matrices exceed budget", total);
  std::vector<SymbolMatrix> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<Symbol> digit(r * c, 0);
  while (true) {
    out.emplace_back(r, c, digit);
    std::size_t p = digit.size();
    while (p > 0 && ++digit[p - 1] == k) digit[--p] = 0;
    if (p == 0) break;
  }
  return out;
}

ExactFraction subflag_density(const Flag& F, const MarkedMatrix& K) {
  if (!K.is_flag_of(F.type())) return ExactFraction(0);
  const std::size_t m = K.base.rows(), n = K.base.cols();
  const std::size_t r = F.rows(), c = F.cols(), a = F.type().a(), b = F.type().b();
  if (m < r || n < c) return ExactFraction(0);
  const auto free_rows = complement(K.marked_rows, m);
  const auto free_cols = complement(K.marked_cols, n);
  const auto R = choices(free_rows, r - a);
  const auto C = choices(free_cols, c - b);
  std::uint64_t hits = 0;
  for (const auto& rs : R.sets)
    for (const auto& cs : C.sets) hits += subflag(K, rs, cs) == F.marked();
  const auto total = static_cast<unsigned long>(R.sets.size() * C.sets.size());
  return ExactFraction(BigInt(static_cast<unsigned long>(hits)), BigInt(total));
}

ExactFraction subflag_density(const Flag& F, const Flag& K) {
  if (!(F.type() == K.type())) throw DimensionError("subflag_density: flags have different types");
  return subflag_density(F, K.marked());
}

std::uint64_t subflag_pair_count(std::size_t m, std::size_t n, std::size_t r, std::size_t c, std::size_t a,
                                 std::size_t b) {
  if (r < a || c < b || m + a < 2 * r || n + b < 2 * c) return 0;
  return binomial_u64(m - a, r - a) * binomial_u64(m - r, r - a) * binomial_u64(n - b, c - b) *
         binomial_u64(n - c, c - b);
}

ExactFraction joint_density(const Flag& F, const Flag& F2, const MarkedMatrix& K) {
  require_same_type(F, F2);
  if (!K.is_flag_of(F.type())) return ExactFraction(0);
  const std::size_t m = K.base.rows(), n = K.base.cols();
  const std::size_t r = F.rows(), c = F.cols(), a = F.type().a(), b = F.type().b();
  const std::uint64_t total = subflag_pair_count(m, n, r, c, a, b);
  if (total == 0) return ExactFraction(0);
  if (m > 64 || n > 64) throw DimensionError("joint_density: host larger than 64 rows or columns");
  const auto R = choices(complement(K.marked_rows, m), r - a);
  const auto C = choices(complement(K.marked_cols, n), c - b);
  // which (row choice, column choice) cells give F and F2
  std::vector<char> isF(R.sets.size() * C.sets.size()), isF2(isF.size());
  for (std::size_t i = 0; i < R.sets.size(); ++i)
    for (std::size_t j = 0; j < C.sets.size(); ++j) {
      const auto s = subflag(K, R.sets[i], C.sets[j]);
      isF[i * C.sets.size() + j] = s == F.marked();
      isF2[i * C.sets.size() + j] = s == F2.marked();
    }
  std::uint64_t hits = 0;
  for (std::size_t i1 = 0; i1 < R.sets.size(); ++i1)
    for (std::size_t i2 = 0; i2 < R.sets.size(); ++i2) {
      if (R.masks[i1] & R.masks[i2]) continue;
      for (std::size_t j1 = 0; j1 < C.sets.size(); ++j1) {
        if (!isF[i1 * C.sets.size() + j1]) continue;
        for (std::size_t j2 = 0; j2 < C.sets.size(); ++j2)
          if (!(C.masks[j1] & C.masks[j2]) && isF2[i2 * C.sets.size() + j2]) ++hits;
      }
    }
  return ExactFraction(BigInt(static_cast<unsigned long>(hits)), BigInt(static_cast<unsigned long>(total)));
}

ExactFraction joint_density(const Flag& F, const Flag& F2, const Flag& K) {
  if (!(F.type() == K.type())) throw DimensionError("joint_density: flags have different types");
  return joint_density(F, F2, K.marked());
}

ExactFraction JointTable::at(std::size_t u, std::size_t v) const {
  auto it = counts.find({u, v});
  if (it == counts.end() || denominator == 0) return ExactFraction(0);
  return ExactFraction(BigInt(static_cast<unsigned long>(it->second)), BigInt(static_cast<unsigned long>(denominator)));
}

JointTable expected_joint_table(const FlagList& flags, const SymbolMatrix& H) {
  const std::size_t m = H.rows(), n = H.cols();
  const std::size_t r = flags.r(), c = flags.c(), a = flags.type().a(), b = flags.type().b();
  const std::uint64_t pairs = subflag_pair_count(m, n, r, c, a, b);
  if (pairs == 0) throw DimensionError("expected_joint_table: host too small for disjoint subflag pairs");
  if (m > 64 || n > 64) throw DimensionError("expected_joint_table: host larger than 64 rows or columns");
  JointTable table;
  table.denominator = binomial_u64(m, a) * binomial_u64(n, b) * pairs;

  std::vector<std::size_t> idx;
  for_each_combination(m, a, [&](const std::vector<std::size_t>& rows) {
    for_each_combination(n, b, [&](const std::vector<std::size_t>& cols) {
      const MarkedMatrix K{H, rows, cols};
      if (!K.is_flag_of(flags.type())) return;
      const auto R = choices(complement(rows, m), r - a);
      const auto C = choices(complement(cols, n), c - b);
      idx.assign(R.sets.size() * C.sets.size(), 0);
      for (std::size_t i = 0; i < R.sets.size(); ++i)
        for (std::size_t j = 0; j < C.sets.size(); ++j) {
          const long k = flags.index_of(subflag(K, R.sets[i], C.sets[j]));
          if (k < 0) throw DimensionError("expected_joint_table: subflag missing from flag list (alphabet mismatch?)");
          idx[i * C.sets.size() + j] = static_cast<std::size_t>(k);
        }
      for (std::size_t i1 = 0; i1 < R.sets.size(); ++i1)
        for (std::size_t i2 = 0; i2 < R.sets.size(); ++i2) {
          if (R.masks[i1] & R.masks[i2]) continue;
          for (std::size_t j1 = 0; j1 < C.sets.size(); ++j1)
            for (std::size_t j2 = 0; j2 < C.sets.size(); ++j2) {
              if (C.masks[j1] & C.masks[j2]) continue;
              ++table.counts[{idx[i1 * C.sets.size() + j1], idx[i2 * C.sets.size() + j2]}];
            }
        }
    });
  });
  return table;
}

ExactFraction expected_joint(const Flag& F, const Flag& F2, const SymbolMatrix& H) {
  require_same_type(F, F2);
  const std::size_t m = H.rows(), n = H.cols(), a = F.type().a(), b = F.type().b();
  if (m < a || n < b) return ExactFraction(0);
  ExactFraction sum;
  for_each_combination(m, a, [&](const std::vector<std::size_t>& rows) {
    for_each_combination(n, b, [&](const std::vector<std::size_t>& cols) {
      sum = sum + joint_density(F, F2, MarkedMatrix{H, rows, cols});
    });
  });
  return sum / ExactFraction(BigInt(binomial(m, a) * binomial(n, b)));
}

ExactFraction coefficient_cH(const JointTable& table, const RationalMatrix& Q) {
  ExactFraction sum;
  for (const auto& [uv, count] : table.counts) {
    const auto [u, v] = uv;
    if (u >= Q.size() || v >= Q[u].size()) throw DimensionError("coefficient_cH: Q smaller than the flag list");
    if (!Q[u][v].is_zero()) sum = sum + Q[u][v] * ExactFraction(BigInt(static_cast<unsigned long>(count)));
  }
  if (table.denominator == 0) return ExactFraction(0);
  return sum / ExactFraction(BigInt(static_cast<unsigned long>(table.denominator)));
}

ExactFraction coefficient_cH(const FlagList& flags, const RationalMatrix& Q, const SymbolMatrix& H) {
  if (Q.size() != flags.size()) throw DimensionError("coefficient_cH: Q must be indexed by the flag list");
  for (const auto& row : Q)
    if (row.size() != flags.size()) throw DimensionError("coefficient_cH: Q must be square");
  return coefficient_cH(expected_joint_table(flags, H), Q);
}

FlagBound flag_bound(const SymbolMatrix& Hstar, std::size_t r, std::size_t c,
                     const std::vector<FlagQuadruple>& quadruples) {
  if (!Hstar.is_square() || Hstar.rows() > std::min(r, c))
    throw DimensionError("flag_bound: pattern must be square and fit in r x c");
  for (const auto& q : quadruples) {
    const std::size_t ri = q.flags.r(), ci = q.flags.c(), a = q.flags.type().a(), b = q.flags.type().b();
    if (r + a < 2 * ri || c + b < 2 * ci) throw DimensionError("flag_bound: r >= 2 r_i - a_i and c >= 2 c_i - b_i required");
    if (q.Q.size() != q.flags.size()) throw DimensionError("flag_bound: Q must be indexed by its flag list");
  }
  const auto hosts = enumerate_matrices(r, c, 2);
  std::vector<ExactFraction> values(hosts.size());
  parallel_for(hosts.size(), 0, [&](std::size_t j) {
    ExactFraction v = density(Hstar, hosts[j]);
    for (const auto& q : quadruples) v = v + coefficient_cH(expected_joint_table(q.flags, hosts[j]), q.Q);
    values[j] = v;
  });
  FlagBound best{values[0], 0};
  for (std::size_t j = 1; j < values.size(); ++j)
    if (values[j] > best.value) best = {values[j], j};
  return best;
}

bool double_counting_check(const SymbolMatrix& Hstar, std::size_t r, std::size_t c, const SymbolMatrix& M) {
  const std::size_t h = Hstar.rows();
  if (!Hstar.is_square() || h > r || h > c || r > M.rows() || c > M.cols())
    throw DimensionError("double_counting_check: need h <= r <= rows(M) and h <= c <= cols(M)");
  std::map<SymbolMatrix, std::uint64_t> histogram;
  for_each_combination(M.rows(), r, [&](const std::vector<std::size_t>& rows) {
    for_each_combination(M.cols(), c, [&](const std::vector<std::size_t>& cols) { ++histogram[M.submatrix(rows, cols)]; });
  });
  ExactFraction rhs;
  for (const auto& [H, count] : histogram) rhs = rhs + density(Hstar, H) * ExactFraction(BigInt(static_cast<unsigned long>(count)));
  rhs = rhs / ExactFraction(BigInt(binomial(M.rows(), r) * binomial(M.cols(), c)));
  return rhs == density(Hstar, M);
}

}  // namespace matdens
