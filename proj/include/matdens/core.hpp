#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "matdens/fraction.hpp"
#include "matdens/symbol_matrix.hpp"

namespace matdens {

/// Counts occurrences of a fixed pattern as a submatrix (rows and columns
/// taken in increasing order). Buffers are reused between calls, so one
/// counter per thread.
///
/// Row subsets are enumerated with prefix rejection: each host column keeps
/// the set of pattern columns it still agrees with on the rows chosen so far,
/// and a prefix is abandoned as soon as some pattern column has no candidate.
/// Column subsets are then counted by a subsequence recurrence instead of
/// being enumerated.
class PatternCounter {
 public:
  explicit PatternCounter(const SymbolMatrix& pattern);

  const SymbolMatrix& pattern() const { return pattern_; }

  /// Occurrences of the pattern in a row-major host of shape rows x cols.
  unsigned __int128 count(const Symbol* host, std::size_t rows, std::size_t cols);
  unsigned __int128 count(const SymbolMatrix& host) { return count(host.entries().data(), host.rows(), host.cols()); }

  /// Occurrences using exactly the given host rows (sorted, one per pattern row).
  std::uint64_t count_in_rows(const Symbol* host, std::size_t cols, const std::size_t* row_idx);

 private:
  void descend(const Symbol* host, std::size_t rows, std::size_t cols, std::size_t depth, std::size_t first_row,
               unsigned __int128& total);
  std::uint64_t count_columns(std::size_t cols, const std::uint64_t* masks);

  SymbolMatrix pattern_;
  std::size_t alphabet_ = 0;
  std::uint64_t full_mask_ = 0;
  std::vector<std::uint64_t> symbol_mask_;      // [pattern row][symbol] -> pattern columns holding it
  std::vector<std::uint64_t> column_masks_;     // [depth][host column]
  std::vector<std::uint64_t> dp_;
};

/// Number of (row subset, column subset) pairs of M inducing exactly H.
/// Throws DimensionError when H does not fit inside M.
BigInt count_pattern(const SymbolMatrix& H, const SymbolMatrix& M);

/// count_pattern divided by C(rows_M, rows_H) * C(cols_M, cols_H).
ExactFraction density(const SymbolMatrix& H, const SymbolMatrix& M);

/// Minimum, in row-major lexicographic order after first-occurrence symbol
/// relabeling, over the orbit of H under row reversal, column reversal and
/// (square matrices only) transposition.
SymbolMatrix canonical_form(const SymbolMatrix& H);

/// The geometric images of H: 8 for square matrices, 4 otherwise.
std::vector<SymbolMatrix> geometric_orbit(const SymbolMatrix& H);

bool density_isomorphic(const SymbolMatrix& a, const SymbolMatrix& b);

/// True iff equal symbols in `fine` imply equal symbols in `coarse` at the same cells.
bool is_refinement(const SymbolMatrix& fine, const SymbolMatrix& coarse);

/// Entries nondecreasing along every row and down every column.
bool is_monotone(const SymbolMatrix& M);

/// Whether some density-isomorphic image of H is monotone.
bool is_monotone_representable(const SymbolMatrix& H);

/// Whether H becomes monotone under some renaming of its symbols alone.
bool is_monotone_up_to_relabeling(const SymbolMatrix& H);

struct HasseDiagram {
  std::vector<SymbolMatrix> nodes;                           // canonical forms, ascending
  std::vector<std::pair<std::size_t, std::size_t>> edges;    // (finer, coarser) cover relations

  std::string to_dot() const;
};

/// Density-isomorphism classes of h x h matrices over at most max_symbols
/// symbols, with cover edges of the class-level refinement order.
/// Refuses (BudgetExceeded) when more than `cap` matrices would be enumerated.
HasseDiagram hasse_diagram(std::size_t h, std::size_t max_symbols, std::uint64_t cap = 1'000'000);

/// Cover edges of plain refinement among the given matrices, without
/// applying any symmetry. The result depends on which representatives are
/// supplied: the class-level diagram can have more edges.
HasseDiagram refinement_diagram(const std::vector<SymbolMatrix>& representatives);

/// Part sizes of an (R, C)-blowup; both sequences sum to the host order.
struct BlowupSpec {
  std::vector<std::size_t> row_parts;
  std::vector<std::size_t> col_parts;
};

SymbolMatrix blowup(const SymbolMatrix& H, const BlowupSpec& spec);

/// Parts of size floor(n/h) or ceil(n/h), larger parts first.
BlowupSpec balanced_spec(std::size_t h, std::size_t n);
SymbolMatrix balanced_blowup(const SymbolMatrix& H, std::size_t n);

}  // namespace matdens
