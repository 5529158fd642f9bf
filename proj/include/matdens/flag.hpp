#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "matdens/fraction.hpp"
#include "matdens/symbol_matrix.hpp"

namespace matdens {

/// A small matrix that marked rows and columns of a flag must induce.
struct FlagType {
  SymbolMatrix sigma;

  std::size_t a() const { return sigma.rows(); }
  std::size_t b() const { return sigma.cols(); }
  friend bool operator==(const FlagType&, const FlagType&) = default;
};

/// A matrix with some rows and columns marked (sorted index lists). Not
/// necessarily a flag of any particular type.
struct MarkedMatrix {
  SymbolMatrix base;
  std::vector<std::size_t> marked_rows;
  std::vector<std::size_t> marked_cols;

  bool is_flag_of(const FlagType& type) const;
  friend bool operator==(const MarkedMatrix&, const MarkedMatrix&) = default;
};

/// A marked matrix whose marked submatrix equals its type.
class Flag {
 public:
  /// Throws DimensionError when the marking does not induce the type.
  Flag(FlagType type, MarkedMatrix marked);

  const FlagType& type() const { return type_; }
  const MarkedMatrix& marked() const { return marked_; }
  const SymbolMatrix& base() const { return marked_.base; }
  std::size_t rows() const { return marked_.base.rows(); }
  std::size_t cols() const { return marked_.base.cols(); }

  friend bool operator==(const Flag&, const Flag&) = default;

 private:
  FlagType type_;
  MarkedMatrix marked_;
};

/// All r x c flags of one type, in enumeration order: marked row subsets in
/// lexicographic order, then marked column subsets in lexicographic order,
/// then the unmarked cells as a row-major odometer (first cell most significant).
class FlagList {
 public:
  FlagList(FlagType type, std::size_t r, std::size_t c, std::size_t alphabet = 2);

  const FlagType& type() const { return type_; }
  std::size_t r() const { return r_; }
  std::size_t c() const { return c_; }
  std::size_t alphabet() const { return alphabet_; }
  std::size_t size() const { return flags_.size(); }
  const Flag& operator[](std::size_t i) const { return flags_[i]; }
  const std::vector<Flag>& flags() const { return flags_; }

  /// Position of a marked matrix in the list, or -1.
  long index_of(const MarkedMatrix& m) const;

 private:
  FlagType type_;
  std::size_t r_, c_, alphabet_;
  std::vector<Flag> flags_;
  std::map<std::vector<std::size_t>, std::size_t> index_;
};

FlagList enumerate_flags(const FlagType& type, std::size_t r, std::size_t c, std::size_t alphabet = 2);

/// All r x c matrices over k symbols in row-major odometer order.
std::vector<SymbolMatrix> enumerate_matrices(std::size_t r, std::size_t c, std::size_t k, double budget = 1e7);

/// Probability that a uniform r x c subflag of K equals F. Zero when K is
/// too small or is not a flag of F's type.
ExactFraction subflag_density(const Flag& F, const MarkedMatrix& K);
/// Throws DimensionError when F and K have different types.
ExactFraction subflag_density(const Flag& F, const Flag& K);

/// Probability that a uniform ordered pair of subflags of K, with disjoint
/// unmarked rows and disjoint unmarked columns, equals (F, F2).
ExactFraction joint_density(const Flag& F, const Flag& F2, const MarkedMatrix& K);
ExactFraction joint_density(const Flag& F, const Flag& F2, const Flag& K);

/// Joint densities of all flag pairs averaged over every marking of H, as
/// integer counts over a common denominator: markings x subflag pairs.
struct JointTable {
  std::uint64_t denominator = 0;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> counts;

  ExactFraction at(std::size_t u, std::size_t v) const;
};

/// Number of ordered subflag pairs with disjoint unmarked rows and columns
/// in an m x n host, for r x c flags of an a x b type.
std::uint64_t subflag_pair_count(std::size_t m, std::size_t n, std::size_t r, std::size_t c, std::size_t a,
                                 std::size_t b);

JointTable expected_joint_table(const FlagList& flags, const SymbolMatrix& H);

/// Average of joint_density(F, F2, (H, marking)) over all markings of H.
ExactFraction expected_joint(const Flag& F, const Flag& F2, const SymbolMatrix& H);

using RationalMatrix = std::vector<std::vector<ExactFraction>>;

/// sum over u, v of Q[u][v] * expected_joint(F_u, F_v, H).
ExactFraction coefficient_cH(const FlagList& flags, const RationalMatrix& Q, const SymbolMatrix& H);
ExactFraction coefficient_cH(const JointTable& table, const RationalMatrix& Q);

struct FlagQuadruple {
  FlagList flags;
  RationalMatrix Q;
};

struct FlagBound {
  ExactFraction value;
  std::size_t argmax = 0;  // index into enumerate_matrices(r, c, 2)
};

/// max over binary r x c matrices H of density(Hstar, H) + sum_i c_H(Q_i).
/// Q_i must be positive semidefinite for the result to bound f(Hstar); that
/// is the caller's responsibility (see the certificate path).
FlagBound flag_bound(const SymbolMatrix& Hstar, std::size_t r, std::size_t c,
                     const std::vector<FlagQuadruple>& quadruples);

/// Checks d(Hstar, M) = sum over r x c matrices H of d(Hstar, H) d(H, M) exactly.
bool double_counting_check(const SymbolMatrix& Hstar, std::size_t r, std::size_t c, const SymbolMatrix& M);

}  // namespace matdens
