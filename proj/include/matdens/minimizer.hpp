#pragma once

#include <cstddef>
#include <vector>

#include "matdens/fraction.hpp"
#include "matdens/symbol_matrix.hpp"

namespace matdens {

using Word = std::vector<Symbol>;

/// h x h matrix whose first h-1 rows are constant (row i holds i) and whose
/// last row is h-1, h, ..., 2h-2. Uses 2h-1 symbols for h >= 2.
SymbolMatrix theorem2_matrix(std::size_t h);

/// (h!)^2 / h^(2h), the density every h x h pattern reaches in balanced blowups.
ExactFraction minimizer_bound(std::size_t h);

/// Fraction of the C(n,h) position sets of v (n = |v|) that spell w.
ExactFraction word_subseq_density(const Word& w, const Word& v);

struct WordMaximum {
  ExactFraction value;
  Word witness;  // first maximizer in lexicographic order
};

/// Maximum of word_subseq_density(w, .) over words of length n on w's symbols.
/// Throws BudgetExceeded when k^n exceeds the budget.
WordMaximum max_word_density(const Word& w, std::size_t n, double budget = 1e8, unsigned workers = 0);

/// (sum alpha)^(h-1) >= h^h prod alpha for h = alphas.size(), in floating point
/// with relative slack 1e-12. Throws DomainError unless alphas are nonnegative
/// and sum to at most 1.
bool amgm_check(const std::vector<double>& alphas);
bool amgm_check(const std::vector<ExactFraction>& alphas);

/// Every two distinct rows, and every two distinct columns, differ in at
/// least h/4 positions. Throws DomainError for non-binary input.
bool typicality_iii(const SymbolMatrix& H);

Word parse_word(const std::string& text);
std::string word_to_string(const Word& w);

}  // namespace matdens
