#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace matdens {

using Symbol = std::uint16_t;

/// Dense row-major grid of small non-negative symbols. Used for patterns,
/// host matrices, flag types and flag bases alike.
class SymbolMatrix {
 public:
  SymbolMatrix() = default;
  SymbolMatrix(std::size_t rows, std::size_t cols, Symbol fill = 0);
  SymbolMatrix(std::size_t rows, std::size_t cols, std::vector<Symbol> entries);

  static SymbolMatrix from_rows(const std::vector<std::vector<Symbol>>& rows);
  static SymbolMatrix from_rows(std::initializer_list<std::initializer_list<Symbol>> rows);

  /// Inline syntax: rows separated by ';', entries by whitespace, e.g. "0 0;0 1".
  static SymbolMatrix parse_inline(const std::string& text);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  Symbol at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  Symbol& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  std::span<const Symbol> entries() const { return entries_; }
  std::span<const Symbol> row(std::size_t i) const {
    return std::span<const Symbol>(entries_).subspan(i * cols_, cols_);
  }

  /// 1 + largest entry (0 for an empty matrix).
  std::size_t alphabet_size() const;
  /// Sorted distinct symbols.
  std::vector<Symbol> symbols() const;

  /// Throws std::invalid_argument unless every entry is below k.
  void check_alphabet(std::size_t k) const;

  SymbolMatrix submatrix(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;
  SymbolMatrix transposed() const;
  SymbolMatrix rows_reversed() const;
  SymbolMatrix cols_reversed() const;
  /// Relabels symbols in order of first row-major occurrence: 0, 1, 2, ...
  SymbolMatrix relabeled_by_first_occurrence() const;

  /// "0 0;0 1"
  std::string to_inline() const;
  /// Entries concatenated row-major with row separators, used as DOT labels: "00/01".
  std::string to_label() const;

  friend bool operator==(const SymbolMatrix&, const SymbolMatrix&) = default;
  /// Orders by dimensions, then row-major lexicographically on entries.
  friend std::strong_ordering operator<=>(const SymbolMatrix& a, const SymbolMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Symbol> entries_;
};

std::ostream& operator<<(std::ostream& os, const SymbolMatrix& m);

/// Text format: optional header line "rows cols", then one line per row with
/// whitespace-separated entries. Without a header the shape comes from the lines.
SymbolMatrix read_matrix_text(std::istream& in);
SymbolMatrix read_matrix_file(const std::string& path);
/// Always writes the header line.
void write_matrix_text(std::ostream& out, const SymbolMatrix& m);
void write_matrix_file(const std::string& path, const SymbolMatrix& m);

}  // namespace matdens
