#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "matdens/fraction.hpp"
#include "matdens/symbol_matrix.hpp"

namespace matdens {

enum class Direction { kNonincreasing, kNondecreasing };

/// Piecewise constant function on [0,1]: values[a] on [breakpoints[a], breakpoints[a+1]).
struct StepFunction {
  std::vector<double> breakpoints;
  std::vector<double> values;
  Direction direction = Direction::kNonincreasing;

  /// Throws DomainError unless breakpoints run from 0 to 1 increasingly,
  /// values lie in [0,1] and follow `direction`.
  void validate() const;

  /// Steps of width 1/n with value zero_counts[i]/n, as for a Ferrers vector.
  static StepFunction from_zero_counts(const std::vector<std::size_t>& zero_counts);
};

/// Same with exact breakpoints and values.
struct ExactStepFunction {
  std::vector<ExactFraction> breakpoints;
  std::vector<ExactFraction> values;

  void validate() const;
  static ExactStepFunction from_zero_counts(const std::vector<std::size_t>& zero_counts);
};

/// The optimal boundary: 1 on [0, 1/e], 1/(e x) on [1/e, 1].
double eval_gstar(double x);

/// Value of the double integral over 0 <= x < y <= 1 of g(y) (g(x) - g(y)).
/// Closed form for step functions: sum over cells a < b of len_a len_b v_b (v_a - v_b).
double functional_F(const StepFunction& g);
ExactFraction functional_F(const ExactStepFunction& g);

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
};

struct QuadratureOptions {
  double tolerance = 1e-9;
  /// Points where g is not smooth; integration is split there.
  std::vector<double> breakpoints;
  /// Grid used to reject non-monotone or out-of-range input.
  std::size_t monotonicity_samples = 2001;
};

/// functional_F for a nonincreasing boundary given as a callable.
QuadratureResult functional_F(const std::function<double(double)>& g, const QuadratureOptions& options = {});

/// functional_F(eval_gstar) with the breakpoint at 1/e.
QuadratureResult functional_F_gstar(double tolerance = 1e-9);

/// A measure on [0,1] made of density pieces a + c/x^2 on [lo, hi) and point masses.
/// Pieces may overlap; their densities add.
struct AtomicMeasure {
  struct Piece {
    double lo = 0;
    double hi = 0;
    double a = 0;
    double c = 0;
  };
  std::vector<Piece> pieces;
  std::vector<std::pair<double, double>> atoms;  // (location, mass)

  double total_mass() const;
  /// Sum of two measures, the second scaled by t (masses may go negative; see validate).
  AtomicMeasure plus(const AtomicMeasure& other, double t) const;
  /// Throws DomainError on negative mass anywhere or total mass off 1 by more than tol.
  void validate(double tol = 1e-12) const;

  /// Density c/x^2 on (alpha, 1) and mass beta at 1.
  static AtomicMeasure power_law(double alpha, double beta, double c);
  /// alpha = beta = c = 1/e.
  static AtomicMeasure canonical();
  static AtomicMeasure uniform();
  static AtomicMeasure point_mass(double location);
};

/// Expected value of u (v - u) where u <= v are two independent samples,
/// restricted to the ordered region (the double integral over u < v).
double kenyon_objective(const AtomicMeasure& mu);

/// Signed perturbation: piecewise constant on a uniform grid of [0,1], plus atoms.
struct Perturbation {
  std::vector<double> grid_values;
  std::vector<std::pair<double, double>> atoms;

  double total() const;
  AtomicMeasure as_measure() const;
};

struct PerturbationReport {
  double base = 0;
  double perturbed = 0;
  double difference = 0;
};

/// Objective change from mu to mu + t eta. Throws DomainError when eta
/// does not integrate to zero or mu + t eta has negative mass.
PerturbationReport perturbation_check(const AtomicMeasure& mu, const Perturbation& eta, double t);

/// n x n 0/1 matrix with entry (i,j) (1-based) equal to 0 iff j/n <= g*(i/n).
SymbolMatrix sample_matrix(std::size_t n);

/// Zero counts floor(n g*(i/n)) of sample_matrix(n), computed without rounding error.
std::vector<std::size_t> sample_zero_counts(std::size_t n);

/// Points (x, g*(x)) on a uniform grid of the given size, for plotting.
std::vector<std::pair<double, double>> gstar_curve(std::size_t points);

}  // namespace matdens
