#include "doctest.h"
#include "matdens/core.hpp"
#include "matdens/error.hpp"
#include "matdens/search.hpp"
#include "oracles.hpp"

using namespace matdens;

namespace {
SymbolMatrix M(const char* s) { return SymbolMatrix::parse_inline(s); }

SearchOptions monotone() {
  SearchOptions o;
  o.monotone_only = true;
  return o;
}
}  // namespace

TEST_CASE("f_exact small cases") {
  const auto r = f_exact(M("0 0;0 1"), 2, monotone());
  CHECK(r.best_value == ExactFraction(1));
  CHECK(r.witness == M("0 0;0 1"));

  const auto b = f_exact(M("0 0;1 1"), 4);
  CHECK(b.best_value == ExactFraction(2, 3));
  CHECK(density(M("0 0;1 1"), b.witness) == b.best_value);
  CHECK(b.explored == (1u << 16));

  const auto x4 = f_exact(M("0 1;1 0"), 4);
  const auto x3 = f_exact(M("0 1;1 0"), 3);
  CHECK(x4.best_value >= ExactFraction(1, 4));
  CHECK(x4.best_value <= x3.best_value);
}

TEST_CASE("witness is consistent and uses only pattern symbols") {
  for (const char* s : {"0 0;0 1", "0 1;1 0", "0 0;1 2", "0 1;1 2", "3 5;5 3"}) {
    const auto H = M(s);
    const auto r = f_exact(H, 3);
    CHECK(density(H, r.witness) == r.best_value);
    const auto syms = H.symbols();
    for (Symbol v : r.witness.entries()) CHECK(std::find(syms.begin(), syms.end(), v) != syms.end());
  }
}

TEST_CASE("witness is the lexicographically first maximizer") {
  // Exhaustive check over 2^9 binary 3x3 matrices.
  const auto H = M("0 1;1 0");
  const auto r = f_exact(H, 3);
  for (unsigned bits = 0; bits < 512; ++bits) {
    SymbolMatrix m(3, 3);
    for (unsigned c = 0; c < 9; ++c) m.at(c / 3, c % 3) = (bits >> (8 - c)) & 1;
    if (m == r.witness) break;
    CHECK(density(H, m) < r.best_value);
  }
}

TEST_CASE("results do not depend on worker count") {
  SearchOptions one;
  one.workers = 1;
  SearchOptions many;
  many.workers = 5;
  for (const char* s : {"0 0;0 1", "0 1;1 2"}) {
    const auto a = f_exact(M(s), 3, one);
    const auto b = f_exact(M(s), 3, many);
    CHECK(a.best_value == b.best_value);
    CHECK(a.witness == b.witness);
    CHECK(a.explored == b.explored);
  }
}

TEST_CASE("budget refusal") {
  SearchOptions o;
  o.budget = 1000;
  try {
    f_exact(M("0 0;0 1"), 4, o);
    FAIL("expected refusal");
  } catch (const BudgetExceeded& e) {
    CHECK(e.estimated_cost() == doctest::Approx(65536.0));
  }
  CHECK_THROWS_AS(f_exact(M("0 0;0 1"), 1), DimensionError);
}

TEST_CASE("sequence is nonincreasing and above the generic bound") {
  for (const char* s : {"0 0;0 1", "0 1;1 0", "0 0;1 1"}) {
    const auto seq = f_sequence(M(s), 5);
    REQUIRE(seq.size() == 4);
    for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] <= seq[i - 1]);
    for (const auto& v : seq) CHECK(v >= ExactFraction(1, 4));
  }
  const auto mono = f_sequence(M("0 0;0 1"), 3, monotone());
  CHECK(mono[0] == ExactFraction(1));
  CHECK(mono[1] == ExactFraction(5, 9));
}

TEST_CASE("isomorphic patterns have equal maxima") {
  const auto d = hasse_diagram(2, 4);
  for (const auto& node : d.nodes) {
    const auto base = f_exact(node, 3).best_value;
    for (const auto& img : geometric_orbit(node)) CHECK(f_exact(img, 3).best_value == base);
  }
}

TEST_CASE("refinement lowers the maximum along cover edges") {
  const auto d = hasse_diagram(2, 4);
  for (std::size_t n = 3; n <= 4; ++n) {
    for (auto [fine, coarse] : d.edges) {
      if (d.nodes[fine].symbols().size() > 3 || (n == 4 && d.nodes[fine].symbols().size() > 2)) continue;
      CHECK(f_exact(d.nodes[coarse], n).best_value >= f_exact(d.nodes[fine], n).best_value);
    }
  }
}

TEST_CASE("Ferrers optimum") {
  auto two = ferrers_optimum(2);
  CHECK(two.objective == 1);
  CHECK(two.zero_counts == std::vector<std::size_t>{2, 1});
  CHECK(two.normalized() == ExactFraction(1));
  auto three = ferrers_optimum(3);
  CHECK(three.objective == 5);
  CHECK(three.zero_counts == std::vector<std::size_t>{3, 2, 1});
  CHECK(three.normalized() == ExactFraction(5, 9));
  CHECK_THROWS_AS(ferrers_optimum(1), DimensionError);

  for (int n = 2; n <= 12; ++n) {
    const auto opt = ferrers_optimum(n);
    CHECK(opt.objective == oracle::ferrers_dp(n));
    for (std::size_t i = 1; i < opt.zero_counts.size(); ++i) CHECK(opt.zero_counts[i] <= opt.zero_counts[i - 1]);
    const auto host = ferrers_matrix(opt.zero_counts, n);
    CHECK(is_monotone(host));
    CHECK(density(M("0 0;0 1"), host) == opt.normalized());
  }
  for (std::size_t n = 2; n <= 5; ++n)
    CHECK(ferrers_optimum(n).normalized() == f_exact(M("0 0;0 1"), n, monotone()).best_value);
}
