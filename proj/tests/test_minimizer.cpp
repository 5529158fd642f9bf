#include <cmath>

#include "doctest.h"
#include "matdens/core.hpp"
#include "matdens/error.hpp"
#include "matdens/minimizer.hpp"
#include "matdens/search.hpp"
#include "oracles.hpp"

using namespace matdens;

TEST_CASE("construction") {
  CHECK(theorem2_matrix(1) == SymbolMatrix::parse_inline("0"));
  CHECK(theorem2_matrix(2) == SymbolMatrix::parse_inline("0 0;1 2"));
  CHECK(theorem2_matrix(3) == SymbolMatrix::parse_inline("0 0 0;1 1 1;2 3 4"));
  for (std::size_t h = 2; h <= 6; ++h) CHECK(theorem2_matrix(h).symbols().size() == 2 * h - 1);
  CHECK(canonical_form(theorem2_matrix(2)) == canonical_form(SymbolMatrix::parse_inline("0 0;1 2")));
}

TEST_CASE("generic bound") {
  CHECK(minimizer_bound(1) == ExactFraction(1));
  CHECK(minimizer_bound(2) == ExactFraction(1, 4));
  CHECK(minimizer_bound(3) == ExactFraction(4, 81));
}

TEST_CASE("blowup witnesses") {
  for (std::size_t h = 2; h <= 3; ++h) {
    const auto H = theorem2_matrix(h);
    ExactFraction prev(0);
    for (std::size_t t = 1; t <= 3; ++t) {
      const std::size_t n = h * t;
      const auto d = density(H, balanced_blowup(H, n));
      const BigInt c = binomial(n, h);
      CHECK(d >= ExactFraction(power(BigInt(static_cast<unsigned long>(t)), 2 * h), c * c));
      CHECK(d >= minimizer_bound(h));
      if (t > 1) CHECK(d <= prev);
      prev = d;
    }
  }
}

TEST_CASE("refinements of the construction do not beat it") {
  // refine (0 0;1 2) by splitting a symbol class; f at n = 3 can only drop
  const auto H = theorem2_matrix(2);
  const auto base = f_exact(H, 3).best_value;
  for (const char* s : {"0 1;2 3", "0 3;1 2"}) {
    const auto R = SymbolMatrix::parse_inline(s);
    REQUIRE(is_refinement(R, H));
    CHECK(f_exact(R, 3).best_value <= base);
  }
}

TEST_CASE("word densities") {
  const Word w = parse_word("010");
  CHECK(word_subseq_density(w, w) == ExactFraction(1));
  CHECK(word_subseq_density(w, parse_word("0101")) == ExactFraction(1, 4));
  CHECK_THROWS_AS(word_subseq_density(w, parse_word("01")), DimensionError);
  // brute force over index triples
  oracle::Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    Word v(3 + rng.below(6));
    for (auto& x : v) x = static_cast<Symbol>(rng.below(2));
    std::uint64_t hits = 0;
    for (std::size_t a = 0; a < v.size(); ++a)
      for (std::size_t b = a + 1; b < v.size(); ++b)
        for (std::size_t c = b + 1; c < v.size(); ++c) hits += v[a] == 0 && v[b] == 1 && v[c] == 0;
    CHECK(word_subseq_density(w, v) == ExactFraction(BigInt(static_cast<unsigned long>(hits)), binomial(v.size(), 3)));
  }
}

TEST_CASE("word maxima") {
  const Word w = parse_word("010");
  const auto three = max_word_density(w, 3);
  CHECK(three.value == ExactFraction(1));
  CHECK(three.witness == w);
  ExactFraction prev(1);
  for (std::size_t n = 6; n <= 15; ++n) {
    const auto r = max_word_density(w, n);
    CHECK(word_subseq_density(w, r.witness) == r.value);
    CHECK(r.value <= prev);
    prev = r.value;
  }
  // three balanced blocks of 5 give 6 * 125 / C(15,3); the limit of that family is 2/9
  CHECK(prev >= ExactFraction(25, 91));
  CHECK(prev > ExactFraction(2, 9));
  const auto a = max_word_density(parse_word("01"), 4);
  const auto b = max_word_density(parse_word("01"), 5);
  CHECK(b.value <= a.value);
  CHECK(a.value == ExactFraction(4, 6));
  CHECK(max_word_density(w, 10, 1e8, 1).witness == max_word_density(w, 10, 1e8, 3).witness);
  CHECK_THROWS_AS(max_word_density(w, 30, 1e6), BudgetExceeded);
}

TEST_CASE("AM-GM inequality") {
  for (std::size_t h = 2; h <= 6; ++h) {
    CHECK(amgm_check(std::vector<double>(h, 1.0 / h)));
    CHECK(amgm_check(std::vector<ExactFraction>(h, ExactFraction(1, static_cast<long>(h)))));
    std::vector<double> with_zero(h, 0.1);
    with_zero[0] = 0;
    CHECK(amgm_check(with_zero));
  }
  oracle::Rng rng(6);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t h = 2 + rng.below(5);
    std::vector<ExactFraction> exact;
    std::vector<double> approx;
    long total = 0;
    std::vector<long> raw(h);
    for (auto& r : raw) total += (r = static_cast<long>(rng.below(1000)));
    const long scale = total + static_cast<long>(rng.below(1000)) + 1;
    for (long r : raw) {
      exact.emplace_back(r, scale);
      approx.push_back(static_cast<double>(r) / static_cast<double>(scale));
    }
    CHECK(amgm_check(exact));
    CHECK(amgm_check(approx));
  }
  CHECK_THROWS_AS(amgm_check(std::vector<double>{0.7, 0.7}), DomainError);
  CHECK_THROWS_AS(amgm_check(std::vector<double>{-0.1, 0.5}), DomainError);
}

TEST_CASE("typicality condition") {
  CHECK(typicality_iii(SymbolMatrix::parse_inline("0 1;1 0")));
  CHECK_FALSE(typicality_iii(SymbolMatrix::parse_inline("0 1 1;0 1 1;1 0 0")));
  CHECK_THROWS_AS(typicality_iii(SymbolMatrix::parse_inline("0 2;1 0")), DomainError);
  oracle::Rng rng(64);
  int pass = 0;
  for (int t = 0; t < 100; ++t) pass += typicality_iii(oracle::random_matrix(rng, 64, 64, 2));
  // a pair of lines within Hamming distance 15 occurs with probability about 0.07
  CHECK(pass >= 85);
}
