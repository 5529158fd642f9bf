#include "matdens/core.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "matdens/error.hpp"

namespace matdens {

PatternCounter::PatternCounter(const SymbolMatrix& pattern) : pattern_(pattern) {
  if (pattern_.empty()) throw DimensionError("PatternCounter: empty pattern");
  if (pattern_.cols() > 63) throw DimensionError("PatternCounter: pattern wider than 63 columns");
  alphabet_ = pattern_.alphabet_size();
  full_mask_ = (std::uint64_t{1} << pattern_.cols()) - 1;
  symbol_mask_.assign(pattern_.rows() * alphabet_, 0);
  for (std::size_t d = 0; d < pattern_.rows(); ++d)
    for (std::size_t t = 0; t < pattern_.cols(); ++t)
      symbol_mask_[d * alphabet_ + pattern_.at(d, t)] |= std::uint64_t{1} << t;
  dp_.assign(pattern_.cols() + 1, 0);
}

std::uint64_t PatternCounter::count_columns(std::size_t cols, const std::uint64_t* masks) {
  const std::size_t c = pattern_.cols();
  std::fill(dp_.begin(), dp_.end(), 0);
  dp_[0] = 1;
  for (std::size_t j = 0; j < cols; ++j) {
    std::uint64_t m = masks[j];
    while (m) {
      const int t = 63 - __builtin_clzll(m);  // descending so each column is used once
      dp_[t + 1] += dp_[t];
      m &= ~(std::uint64_t{1} << t);
    }
  }
  return dp_[c];
}

void PatternCounter::descend(const Symbol* host, std::size_t rows, std::size_t cols, std::size_t depth,
                             std::size_t first_row, unsigned __int128& total) {
  const std::size_t r = pattern_.rows();
  std::uint64_t* cur = column_masks_.data() + depth * cols;
  const std::uint64_t* prev = depth == 0 ? nullptr : column_masks_.data() + (depth - 1) * cols;
  const std::uint64_t* sym = symbol_mask_.data() + depth * alphabet_;
  for (std::size_t i = first_row; i + (r - depth) <= rows; ++i) {
    const Symbol* row = host + i * cols;
    std::uint64_t seen = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      const std::uint64_t s = row[j] < alphabet_ ? sym[row[j]] : 0;
      cur[j] = prev ? (prev[j] & s) : s;
      seen |= cur[j];
    }
    if (seen != full_mask_) continue;
    if (depth + 1 == r) {
      total += count_columns(cols, cur);
    } else {
      descend(host, rows, cols, depth + 1, i + 1, total);
    }
  }
}

unsigned __int128 PatternCounter::count(const Symbol* host, std::size_t rows, std::size_t cols) {
  if (pattern_.rows() > rows || pattern_.cols() > cols) return 0;
  column_masks_.resize(pattern_.rows() * cols);
  unsigned __int128 total = 0;
  descend(host, rows, cols, 0, 0, total);
  return total;
}

std::uint64_t PatternCounter::count_in_rows(const Symbol* host, std::size_t cols, const std::size_t* row_idx) {
  const std::size_t r = pattern_.rows();
  if (pattern_.cols() > cols) return 0;
  column_masks_.resize(cols);
  std::uint64_t* cur = column_masks_.data();
  std::fill(cur, cur + cols, full_mask_);
  for (std::size_t d = 0; d < r; ++d) {
    const Symbol* row = host + row_idx[d] * cols;
    const std::uint64_t* sym = symbol_mask_.data() + d * alphabet_;
    for (std::size_t j = 0; j < cols; ++j) cur[j] &= row[j] < alphabet_ ? sym[row[j]] : 0;
  }
  return count_columns(cols, cur);
}

namespace {

BigInt to_bigint(unsigned __int128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  BigInt out = hi;
  out <<= 64;
  out += BigInt(static_cast<unsigned long>(lo));
  return out;
}

void check_fits(const SymbolMatrix& H, const SymbolMatrix& M) {
  if (H.empty()) throw DimensionError("pattern is empty");
  if (H.rows() > M.rows() || H.cols() > M.cols())
    throw DimensionError("pattern " + std::to_string(H.rows()) + "x" + std::to_string(H.cols()) +
                         " does not fit in host " + std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
}

}  // namespace

BigInt count_pattern(const SymbolMatrix& H, const SymbolMatrix& M) {
  check_fits(H, M);
  binomial_u64(M.cols(), H.cols());  // per-row-subset counts must fit the recurrence's 64-bit cells
  PatternCounter counter(H);
  return to_bigint(counter.count(M));
}

ExactFraction density(const SymbolMatrix& H, const SymbolMatrix& M) {
  const BigInt hits = count_pattern(H, M);
  return ExactFraction(hits, binomial(M.rows(), H.rows()) * binomial(M.cols(), H.cols()));
}

std::vector<SymbolMatrix> geometric_orbit(const SymbolMatrix& H) {
  std::vector<SymbolMatrix> out;
  const SymbolMatrix r = H.rows_reversed();
  out.push_back(H);
  out.push_back(r);
  out.push_back(H.cols_reversed());
  out.push_back(r.cols_reversed());
  if (H.is_square()) {
    const std::size_t base = out.size();
    for (std::size_t i = 0; i < base; ++i) out.push_back(out[i].transposed());
  }
  return out;
}

SymbolMatrix canonical_form(const SymbolMatrix& H) {
  SymbolMatrix best;
  bool first = true;
  for (const auto& g : geometric_orbit(H)) {
    SymbolMatrix cand = g.relabeled_by_first_occurrence();
    if (first || cand < best) {
      best = std::move(cand);
      first = false;
    }
  }
  return best;
}

bool density_isomorphic(const SymbolMatrix& a, const SymbolMatrix& b) {
  return canonical_form(a) == canonical_form(b);
}

bool is_refinement(const SymbolMatrix& fine, const SymbolMatrix& coarse) {
  if (fine.rows() != coarse.rows() || fine.cols() != coarse.cols())
    throw DimensionError("is_refinement: dimension mismatch");
  std::map<Symbol, Symbol> image;
  const auto f = fine.entries();
  const auto c = coarse.entries();
  for (std::size_t p = 0; p < f.size(); ++p) {
    auto [it, inserted] = image.emplace(f[p], c[p]);
    if (!inserted && it->second != c[p]) return false;
  }
  return true;
}

bool is_monotone(const SymbolMatrix& M) {
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) {
      if (j + 1 < M.cols() && M.at(i, j) > M.at(i, j + 1)) return false;
      if (i + 1 < M.rows() && M.at(i, j) > M.at(i + 1, j)) return false;
    }
  return true;
}

namespace {

// Some symbol order makes g monotone iff the "must be smaller" relation
// between distinct adjacent symbols is acyclic.
bool has_monotone_relabeling(const SymbolMatrix& g) {
  const std::size_t k = g.alphabet_size();
  std::vector<std::set<Symbol>> succ(k);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (j + 1 < g.cols() && g.at(i, j) != g.at(i, j + 1)) succ[g.at(i, j)].insert(g.at(i, j + 1));
      if (i + 1 < g.rows() && g.at(i, j) != g.at(i + 1, j)) succ[g.at(i, j)].insert(g.at(i + 1, j));
    }
  std::vector<int> indeg(k, 0);
  for (const auto& s : succ)
    for (Symbol t : s) ++indeg[t];
  std::vector<Symbol> ready;
  for (std::size_t v = 0; v < k; ++v)
    if (indeg[v] == 0) ready.push_back(static_cast<Symbol>(v));
  std::size_t done = 0;
  while (!ready.empty()) {
    const Symbol v = ready.back();
    ready.pop_back();
    ++done;
    for (Symbol t : succ[v])
      if (--indeg[t] == 0) ready.push_back(t);
  }
  return done == k;
}

}  // namespace

bool is_monotone_up_to_relabeling(const SymbolMatrix& H) { return has_monotone_relabeling(H); }

bool is_monotone_representable(const SymbolMatrix& H) {
  const auto orbit = geometric_orbit(H);
  return std::any_of(orbit.begin(), orbit.end(), has_monotone_relabeling);
}

std::string HasseDiagram::to_dot() const {
  std::ostringstream os;
  os << "digraph refinement {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) os << "  n" << i << " [label=\"" << nodes[i].to_label() << "\"];\n";
  for (const auto& [fine, coarse] : edges) os << "  n" << fine << " -> n" << coarse << ";\n";
  os << "}\n";
  return os.str();
}

namespace {

// Number of set partitions of `cells` labelled cells into at most k blocks.
BigInt restricted_growth_count(std::size_t cells, std::size_t k) {
  // Stirling numbers of the second kind, row by row.
  std::vector<BigInt> s(k + 1, 0);
  s[0] = 1;
  for (std::size_t n = 1; n <= cells; ++n) {
    for (std::size_t j = std::min(n, k); j >= 1; --j) s[j] = BigInt(static_cast<unsigned long>(j)) * s[j] + s[j - 1];
    s[0] = 0;
  }
  BigInt total = 0;
  for (std::size_t j = 0; j <= k; ++j) total += s[j];
  return total;
}

std::vector<std::pair<std::size_t, std::size_t>> cover_edges(const std::vector<std::vector<char>>& below) {
  const std::size_t n = below.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (!below[a][b]) continue;
      bool covered = true;
      for (std::size_t c = 0; c < n && covered; ++c)
        if (below[a][c] && below[c][b]) covered = false;
      if (covered) edges.emplace_back(a, b);
    }
  return edges;
}

}  // namespace

HasseDiagram hasse_diagram(std::size_t h, std::size_t max_symbols, std::uint64_t cap) {
  if (h == 0 || max_symbols == 0) throw DimensionError("hasse_diagram: h and max_symbols must be positive");
  const std::size_t cells = h * h;
  const BigInt work = restricted_growth_count(cells, max_symbols);
  if (work > BigInt(static_cast<unsigned long>(cap)))
    throw BudgetExceeded("hasse_diagram: " + work.get_str() + " matrices exceed cap " + std::to_string(cap),
                         work.get_d());

  // Restricted growth strings enumerate each symbol partition once.
  std::set<SymbolMatrix> classes;
  std::vector<Symbol> rgs(cells, 0);
  std::function<void(std::size_t, Symbol)> rec = [&](std::size_t pos, Symbol used) {
    if (pos == cells) {
      classes.insert(canonical_form(SymbolMatrix(h, h, rgs)));
      return;
    }
    const Symbol limit = static_cast<Symbol>(std::min<std::size_t>(used + 1, max_symbols));
    for (Symbol s = 0; s < limit; ++s) {
      rgs[pos] = s;
      rec(pos + 1, std::max<Symbol>(used, static_cast<Symbol>(s + 1)));
    }
  };
  rgs[0] = 0;
  rec(1, 1);

  HasseDiagram out;
  out.nodes.assign(classes.begin(), classes.end());
  const std::size_t n = out.nodes.size();
  std::vector<std::vector<char>> below(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    const auto orbit = geometric_orbit(out.nodes[a]);
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      below[a][b] = std::any_of(orbit.begin(), orbit.end(),
                                [&](const SymbolMatrix& g) { return is_refinement(g, out.nodes[b]); });
    }
  }
  out.edges = cover_edges(below);
  return out;
}

HasseDiagram refinement_diagram(const std::vector<SymbolMatrix>& representatives) {
  HasseDiagram out;
  out.nodes = representatives;
  const std::size_t n = out.nodes.size();
  std::vector<std::vector<char>> below(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      below[a][b] = a != b && is_refinement(out.nodes[a], out.nodes[b]) && !is_refinement(out.nodes[b], out.nodes[a]);
  out.edges = cover_edges(below);
  return out;
}

SymbolMatrix blowup(const SymbolMatrix& H, const BlowupSpec& spec) {
  if (!H.is_square()) throw DimensionError("blowup: pattern must be square");
  const std::size_t h = H.rows();
  if (spec.row_parts.size() != h || spec.col_parts.size() != h)
    throw DimensionError("blowup: part sequences must have length " + std::to_string(h));
  const std::size_t n = std::accumulate(spec.row_parts.begin(), spec.row_parts.end(), std::size_t{0});
  const std::size_t nc = std::accumulate(spec.col_parts.begin(), spec.col_parts.end(), std::size_t{0});
  if (n != nc) throw DimensionError("blowup: row parts and column parts must have the same sum");
  SymbolMatrix out(n, n);
  std::size_t r0 = 0;
  for (std::size_t bi = 0; bi < h; ++bi) {
    std::size_t c0 = 0;
    for (std::size_t bj = 0; bj < h; ++bj) {
      for (std::size_t i = 0; i < spec.row_parts[bi]; ++i)
        for (std::size_t j = 0; j < spec.col_parts[bj]; ++j) out.at(r0 + i, c0 + j) = H.at(bi, bj);
      c0 += spec.col_parts[bj];
    }
    r0 += spec.row_parts[bi];
  }
  return out;
}

BlowupSpec balanced_spec(std::size_t h, std::size_t n) {
  if (h == 0) throw DimensionError("balanced_spec: h must be positive");
  std::vector<std::size_t> parts(h, n / h);
  for (std::size_t i = 0; i < n % h; ++i) ++parts[i];
  return {parts, parts};
}

SymbolMatrix balanced_blowup(const SymbolMatrix& H, std::size_t n) {
  return blowup(H, balanced_spec(H.rows(), n));
}

}  // namespace matdens
