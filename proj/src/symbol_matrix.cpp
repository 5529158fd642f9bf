#include "matdens/symbol_matrix.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "matdens/error.hpp"

namespace matdens {
namespace {

std::vector<long long> parse_ints(const std::string& line, const char* context) {
  std::istringstream ss(line);
  std::vector<long long> out;
  std::string token;
  while (ss >> token) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(token, &used);
    } catch (const std::exception&) {
      throw ParseError(std::string(context) + ": not an integer: '" + token + "'");
    }
    if (used != token.size()) throw ParseError(std::string(context) + ": not an integer: '" + token + "'");
    out.push_back(v);
  }
  return out;
}

Symbol to_symbol(long long v, const char* context) {
  if (v < 0 || v > std::numeric_limits<Symbol>::max())
    throw ParseError(std::string(context) + ": symbol out of range: " + std::to_string(v));
  return static_cast<Symbol>(v);
}

}  // namespace

SymbolMatrix::SymbolMatrix(std::size_t rows, std::size_t cols, Symbol fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

SymbolMatrix::SymbolMatrix(std::size_t rows, std::size_t cols, std::vector<Symbol> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_)
    throw DimensionError("SymbolMatrix: entry count " + std::to_string(entries_.size()) + " != " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
}

SymbolMatrix SymbolMatrix::from_rows(const std::vector<std::vector<Symbol>>& rows) {
  if (rows.empty()) return {};
  const std::size_t c = rows.front().size();
  std::vector<Symbol> entries;
  entries.reserve(rows.size() * c);
  for (const auto& r : rows) {
    if (r.size() != c) throw DimensionError("SymbolMatrix: ragged rows");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return SymbolMatrix(rows.size(), c, std::move(entries));
}

SymbolMatrix SymbolMatrix::from_rows(std::initializer_list<std::initializer_list<Symbol>> rows) {
  std::vector<std::vector<Symbol>> v;
  for (const auto& r : rows) v.emplace_back(r);
  return from_rows(v);
}

SymbolMatrix SymbolMatrix::parse_inline(const std::string& text) {
  std::vector<std::vector<Symbol>> rows;
  // rows split on ';' or '/'
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), '/', ';');
  std::stringstream ss(normalized);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto ints = parse_ints(part, "inline matrix");
    if (ints.empty()) throw ParseError("inline matrix: empty row in '" + text + "'");
    std::vector<Symbol> row;
    for (long long v : ints) row.push_back(to_symbol(v, "inline matrix"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("inline matrix: no rows");
  try {
    return from_rows(rows);
  } catch (const DimensionError&) {
    throw ParseError("inline matrix: ragged rows in '" + text + "'");
  }
}

std::size_t SymbolMatrix::alphabet_size() const {
  if (entries_.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(entries_.begin(), entries_.end())) + 1;
}

std::vector<Symbol> SymbolMatrix::symbols() const {
  std::vector<Symbol> s(entries_.begin(), entries_.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

void SymbolMatrix::check_alphabet(std::size_t k) const {
  if (alphabet_size() > k)
    throw std::invalid_argument("SymbolMatrix: entry " + std::to_string(alphabet_size() - 1) +
                                " outside alphabet of size " + std::to_string(k));
}

SymbolMatrix SymbolMatrix::submatrix(std::span<const std::size_t> row_idx,
                                     std::span<const std::size_t> col_idx) const {
  SymbolMatrix out(row_idx.size(), col_idx.size());
  for (std::size_t i = 0; i < row_idx.size(); ++i)
    for (std::size_t j = 0; j < col_idx.size(); ++j) out.at(i, j) = at(row_idx[i], col_idx[j]);
  return out;
}

SymbolMatrix SymbolMatrix::transposed() const {
  SymbolMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
  return out;
}

SymbolMatrix SymbolMatrix::rows_reversed() const {
  SymbolMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.at(rows_ - 1 - i, j) = at(i, j);
  return out;
}

SymbolMatrix SymbolMatrix::cols_reversed() const {
  SymbolMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.at(i, cols_ - 1 - j) = at(i, j);
  return out;
}

SymbolMatrix SymbolMatrix::relabeled_by_first_occurrence() const {
  std::vector<int> map(alphabet_size(), -1);
  int next = 0;
  SymbolMatrix out(rows_, cols_);
  for (std::size_t p = 0; p < entries_.size(); ++p) {
    int& m = map[entries_[p]];
    if (m < 0) m = next++;
    out.entries_[p] = static_cast<Symbol>(m);
  }
  return out;
}

std::string SymbolMatrix::to_inline() const {
  std::string s;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) s += ';';
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) s += ' ';
      s += std::to_string(at(i, j));
    }
  }
  return s;
}

std::string SymbolMatrix::to_label() const {
  std::string s;
  const bool wide = alphabet_size() > 10;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) s += '/';
    for (std::size_t j = 0; j < cols_; ++j) {
      if (wide && j) s += ',';
      s += std::to_string(at(i, j));
    }
  }
  return s;
}

std::strong_ordering operator<=>(const SymbolMatrix& a, const SymbolMatrix& b) {
  if (auto c = a.rows_ <=> b.rows_; c != 0) return c;
  if (auto c = a.cols_ <=> b.cols_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                                                b.entries_.end());
}

std::ostream& operator<<(std::ostream& os, const SymbolMatrix& m) { return os << "(" << m.to_inline() << ")"; }

SymbolMatrix read_matrix_text(std::istream& in) {
  std::vector<std::vector<long long>> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto ints = parse_ints(line, "matrix text");
    if (!ints.empty()) lines.push_back(std::move(ints));
  }
  if (lines.empty()) throw ParseError("matrix text: no data");

  std::size_t first_data = 0;
  std::size_t rows = lines.size();
  std::size_t cols = lines.front().size();
  const auto& head = lines.front();
  if (head.size() == 2 && head[0] > 0 && head[1] > 0 &&
      lines.size() == static_cast<std::size_t>(head[0]) + 1 &&
      std::all_of(lines.begin() + 1, lines.end(),
                  [&](const auto& l) { return l.size() == static_cast<std::size_t>(head[1]); })) {
    first_data = 1;
    rows = static_cast<std::size_t>(head[0]);
    cols = static_cast<std::size_t>(head[1]);
  }
  std::vector<Symbol> entries;
  entries.reserve(rows * cols);
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    if (lines[i].size() != cols)
      throw ParseError("matrix text: row " + std::to_string(i - first_data + 1) + " has " +
                       std::to_string(lines[i].size()) + " entries, expected " + std::to_string(cols));
    for (long long v : lines[i]) entries.push_back(to_symbol(v, "matrix text"));
  }
  return SymbolMatrix(rows, cols, std::move(entries));
}

SymbolMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  return read_matrix_text(in);
}

void write_matrix_text(std::ostream& out, const SymbolMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m.at(i, j);
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const SymbolMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file '" + path + "'");
  write_matrix_text(out, m);
  if (!out) throw IoError("failed writing matrix file '" + path + "'");
}

}  // namespace matdens
