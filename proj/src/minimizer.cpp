#include "matdens/minimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <set>
#include <thread>

#include "matdens/error.hpp"

namespace matdens {

SymbolMatrix theorem2_matrix(std::size_t h) {
  if (h == 0) throw DimensionError("theorem2_matrix: h must be positive");
  SymbolMatrix m(h, h);
  for (std::size_t i = 0; i + 1 < h; ++i)
    for (std::size_t j = 0; j < h; ++j) m.at(i, j) = static_cast<Symbol>(i);
  for (std::size_t j = 0; j < h; ++j) m.at(h - 1, j) = static_cast<Symbol>(h - 1 + j);
  return m;
}

ExactFraction minimizer_bound(std::size_t h) {
  if (h == 0) throw DimensionError("minimizer_bound: h must be positive");
  const BigInt f = factorial(h);
  return ExactFraction(f * f, power(BigInt(static_cast<unsigned long>(h)), 2 * h));
}

ExactFraction word_subseq_density(const Word& w, const Word& v) {
  const std::size_t h = w.size();
  const std::size_t n = v.size();
  if (h == 0) throw DimensionError("word_subseq_density: pattern word is empty");
  if (h > n) throw DimensionError("word_subseq_density: pattern longer than host word");
  std::vector<BigInt> dp(h + 1, 0);
  dp[0] = 1;
  for (Symbol x : v)
    for (std::size_t t = h; t-- > 0;)
      if (w[t] == x) dp[t + 1] += dp[t];
  return ExactFraction(dp[h], binomial(n, h));
}

namespace {

struct WordSearch {
  const Word& w;
  std::vector<Symbol> syms;
  std::size_t n;

  struct Best {
    std::uint64_t count = 0;
    bool found = false;
    Word witness;
  };

  // dp rows per depth: dp[d][t] ways to match w[0..t) in the first d letters
  void dfs(std::size_t d, Word& word, std::vector<std::vector<std::uint64_t>>& dp, Best& best) const {
    const std::size_t h = w.size();
    if (d == n) {
      if (!best.found || dp[n][h] > best.count) {
        best.found = true;
        best.count = dp[n][h];
        best.witness = word;
      }
      return;
    }
    for (Symbol x : syms) {
      word[d] = x;
      dp[d + 1] = dp[d];
      for (std::size_t t = h; t-- > 0;)
        if (w[t] == x) dp[d + 1][t + 1] += dp[d][t];
      dfs(d + 1, word, dp, best);
    }
  }
};

}  // namespace

WordMaximum max_word_density(const Word& w, std::size_t n, double budget, unsigned workers) {
  if (w.empty()) throw DimensionError("max_word_density: pattern word is empty");
  if (w.size() > n) throw DimensionError("max_word_density: pattern longer than n");
  const std::set<Symbol> distinct(w.begin(), w.end());
  WordSearch search{w, std::vector<Symbol>(distinct.begin(), distinct.end()), n};
  const std::size_t k = search.syms.size();
  const double cost = std::pow(static_cast<double>(k), static_cast<double>(n));
  if (cost > budget)
    throw BudgetExceeded("max_word_density: " + std::to_string(cost) + " words exceed budget", cost);

  // Work items: fixed prefixes of length L, in lexicographic order.
  std::size_t L = 0, items = 1;
  while (L < n && items < 256) {
    ++L;
    items *= k;
  }
  std::vector<WordSearch::Best> results(items);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t it = next++; it < items; it = next++) {
      Word word(n);
      std::vector<std::vector<std::uint64_t>> dp(n + 1, std::vector<std::uint64_t>(w.size() + 1, 0));
      dp[0][0] = 1;
      std::size_t code = it;
      for (std::size_t d = L; d-- > 0;) {
        word[d] = search.syms[code % k];
        code /= k;
      }
      for (std::size_t d = 0; d < L; ++d) {
        dp[d + 1] = dp[d];
        for (std::size_t t = w.size(); t-- > 0;)
          if (w[t] == word[d]) dp[d + 1][t + 1] += dp[d][t];
      }
      search.dfs(L, word, dp, results[it]);
    }
  };
  unsigned count = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  count = static_cast<unsigned>(std::min<std::size_t>(count, items));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  const WordSearch::Best* best = &results[0];
  for (const auto& r : results)
    if (r.count > best->count) best = &r;
  return {ExactFraction(BigInt(static_cast<unsigned long>(best->count)), binomial(n, w.size())), best->witness};
}

bool amgm_check(const std::vector<double>& alphas) {
  if (alphas.empty()) throw DomainError("amgm_check: empty input");
  double sum = 0, prod = 1;
  for (double a : alphas) {
    if (!(a >= 0)) throw DomainError("amgm_check: negative entry");
    sum += a;
    prod *= a;
  }
  if (sum > 1 + 1e-12) throw DomainError("amgm_check: entries sum to more than 1");
  const double h = static_cast<double>(alphas.size());
  const double lhs = std::pow(sum, h - 1);
  const double rhs = std::pow(h, h) * prod;
  return lhs >= rhs * (1 - 1e-12);
}

bool amgm_check(const std::vector<ExactFraction>& alphas) {
  if (alphas.empty()) throw DomainError("amgm_check: empty input");
  ExactFraction sum, prod(1);
  for (const auto& a : alphas) {
    if (a.sign() < 0) throw DomainError("amgm_check: negative entry");
    sum = sum + a;
    prod = prod * a;
  }
  if (sum > ExactFraction(1)) throw DomainError("amgm_check: entries sum to more than 1");
  const std::size_t h = alphas.size();
  ExactFraction lhs(1);
  for (std::size_t i = 0; i + 1 < h; ++i) lhs = lhs * sum;
  const ExactFraction rhs = ExactFraction(power(BigInt(static_cast<unsigned long>(h)), h)) * prod;
  return lhs >= rhs;
}

bool typicality_iii(const SymbolMatrix& H) {
  if (!H.is_square()) throw DimensionError("typicality_iii: matrix must be square");
  for (Symbol s : H.entries())
    if (s > 1) throw DomainError("typicality_iii: matrix must be 0/1");
  const std::size_t h = H.rows();
  // distance >= h/4  <=>  4 * distance >= h
  for (std::size_t a = 0; a < h; ++a)
    for (std::size_t b = a + 1; b < h; ++b) {
      std::size_t rd = 0, cd = 0;
      for (std::size_t j = 0; j < h; ++j) {
        rd += H.at(a, j) != H.at(b, j);
        cd += H.at(j, a) != H.at(j, b);
      }
      if (4 * rd < h || 4 * cd < h) return false;
    }
  return true;
}

Word parse_word(const std::string& text) {
  Word w;
  bool spaced = text.find_first_of(" ,") != std::string::npos;
  if (!spaced) {
    for (char ch : text) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw ParseError("word: not a digit: '" + text + "'");
      w.push_back(static_cast<Symbol>(ch - '0'));
    }
  } else {
    std::string tok;
    for (char ch : text + " ") {
      if (ch == ' ' || ch == ',') {
        if (!tok.empty()) {
          const auto v = std::stoul(tok);
          if (v > 65535) throw ParseError("word: symbol out of range");
          w.push_back(static_cast<Symbol>(v));
          tok.clear();
        }
      } else if (std::isdigit(static_cast<unsigned char>(ch))) {
        tok += ch;
      } else {
        throw ParseError("word: unexpected character in '" + text + "'");
      }
    }
  }
  if (w.empty()) throw ParseError("word: empty");
  return w;
}

std::string word_to_string(const Word& w) {
  bool small = std::all_of(w.begin(), w.end(), [](Symbol s) { return s < 10; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!small && i) out += ' ';
    out += std::to_string(w[i]);
  }
  return out;
}

}  // namespace matdens
