#include "matdens/limit.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "matdens/error.hpp"

namespace matdens {
namespace {

constexpr double kE = std::numbers::e;
constexpr double kInvE = 1.0 / std::numbers::e;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

template <typename T>
void check_breakpoints(const std::vector<T>& bp, std::size_t cells) {
  if (cells == 0 || bp.size() != cells + 1) throw DomainError("step function: need one more breakpoint than values");
  if (bp.front() != T(0) || bp.back() != T(1)) throw DomainError("step function: breakpoints must run from 0 to 1");
  for (std::size_t a = 0; a + 1 < bp.size(); ++a)
    if (!(bp[a] < bp[a + 1])) throw DomainError("step function: breakpoints must increase");
}

// Integral of x^k (a + c/x^2) over [p, q].
struct Moments {
  double m0 = 0, m1 = 0, m2 = 0;
};

Moments moments(double p, double q, double a, double c) {
  Moments m;
  m.m0 = a * (q - p);
  m.m1 = a * (q * q - p * p) / 2;
  m.m2 = a * (q * q * q - p * p * p) / 3;
  if (c != 0) {
    m.m0 += c * (1 / p - 1 / q);
    m.m1 += c * std::log(q / p);
    m.m2 += c * (q - p);
  }
  return m;
}

struct Interval {
  double lo, hi, a, c;
};

// Disjoint sorted intervals with summed densities, and merged sorted atoms.
struct Normalized {
  std::vector<Interval> intervals;
  std::vector<std::pair<double, double>> atoms;
};

Normalized normalize(const AtomicMeasure& mu, double tol) {
  Normalized out;
  std::vector<double> cuts;
  for (const auto& p : mu.pieces) {
    if (!(p.lo >= 0 && p.hi <= 1 && p.lo <= p.hi)) throw DomainError("measure: piece outside [0,1]");
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Interval iv{cuts[k], cuts[k + 1], 0, 0};
    for (const auto& p : mu.pieces)
      if (p.lo <= iv.lo && p.hi >= iv.hi) {
        iv.a += p.a;
        iv.c += p.c;
      }
    if (iv.a == 0 && iv.c == 0) continue;
    if (iv.c != 0 && iv.lo == 0) throw DomainError("measure: c/x^2 density must stay away from 0");
    // a + c/x^2 is monotone in x, so the endpoints bound it.
    const double at_lo = iv.a + iv.c / (iv.lo * iv.lo);
    const double at_hi = iv.a + iv.c / (iv.hi * iv.hi);
    if (iv.c == 0 ? iv.a < -tol : std::min(at_lo, at_hi) < -tol)
      throw DomainError("measure: negative density on [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + ")");
    out.intervals.push_back(iv);
  }
  std::map<double, double> atoms;
  for (auto [x, w] : mu.atoms) {
    if (!(x >= 0 && x <= 1)) throw DomainError("measure: atom outside [0,1]");
    atoms[x] += w;
  }
  for (auto [x, w] : atoms) {
    if (w < -tol) throw DomainError("measure: negative atom at " + std::to_string(x));
    if (w != 0) out.atoms.emplace_back(x, w);
  }
  return out;
}

// Integral over p <= x < y <= q of x (y - x) d(x) d(y) for d = a + c/x^2.
// The inner integral is (a/2) x (q-x)^2 + c (x ln(q/x) - x + x^2/q).
double same_interval_term(const Interval& iv) {
  const double a = iv.a, c = iv.c, q = iv.hi;
  auto poly = [&](double x) {
    double v = a * a / 2 * (q * q * x * x / 2 - 2 * q * x * x * x / 3 + x * x * x * x / 4);
    if (c != 0) {
      const double L = std::log(q / x);
      v += a * c * (x * x / 2 * L + x * x / 4 - x * x / 2 + x * x * x / (3 * q));
      v += a * c / 2 * (q * q * std::log(x) - 2 * q * x + x * x / 2);
      v += c * c * (-L * L / 2 - std::log(x) + x / q);
    }
    return v;
  };
  return poly(iv.hi) - poly(iv.lo);
}

}  // namespace

void StepFunction::validate() const {
  check_breakpoints(breakpoints, values.size());
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (!(values[a] >= 0 && values[a] <= 1)) throw DomainError("step function: values must lie in [0,1]");
    if (a == 0) continue;
    const bool ok = direction == Direction::kNonincreasing ? values[a] <= values[a - 1] : values[a] >= values[a - 1];
    if (!ok) throw DomainError("step function: values are not monotone in the declared direction");
  }
}

StepFunction StepFunction::from_zero_counts(const std::vector<std::size_t>& zero_counts) {
  StepFunction g;
  const std::size_t n = zero_counts.size();
  for (std::size_t i = 0; i <= n; ++i) g.breakpoints.push_back(static_cast<double>(i) / static_cast<double>(n));
  for (std::size_t z : zero_counts) g.values.push_back(static_cast<double>(z) / static_cast<double>(n));
  return g;
}

void ExactStepFunction::validate() const {
  check_breakpoints(breakpoints, values.size());
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] < ExactFraction(0) || values[a] > ExactFraction(1))
      throw DomainError("step function: values must lie in [0,1]");
    if (a > 0 && values[a] > values[a - 1]) throw DomainError("step function: values must be nonincreasing");
  }
}

ExactStepFunction ExactStepFunction::from_zero_counts(const std::vector<std::size_t>& zero_counts) {
  ExactStepFunction g;
  const long n = static_cast<long>(zero_counts.size());
  for (long i = 0; i <= n; ++i) g.breakpoints.emplace_back(BigInt(i), BigInt(n));
  for (std::size_t z : zero_counts) g.values.emplace_back(BigInt(static_cast<unsigned long>(z)), BigInt(n));
  return g;
}

double eval_gstar(double x) {
  if (!(x >= 0 && x <= 1)) throw DomainError("eval_gstar: x must lie in [0,1]");
  return x <= kInvE ? 1.0 : 1.0 / (kE * x);
}

double functional_F(const StepFunction& g) {
  g.validate();
  if (g.direction != Direction::kNonincreasing) throw DomainError("functional_F: boundary must be nonincreasing");
  double total = 0, len_before = 0, weighted_before = 0;
  for (std::size_t b = 0; b < g.values.size(); ++b) {
    const double len = g.breakpoints[b + 1] - g.breakpoints[b];
    const double v = g.values[b];
    total += len * v * (weighted_before - v * len_before);
    len_before += len;
    weighted_before += len * v;
  }
  return total;
}

ExactFraction functional_F(const ExactStepFunction& g) {
  g.validate();
  ExactFraction total, len_before, weighted_before;
  for (std::size_t b = 0; b < g.values.size(); ++b) {
    const ExactFraction len = g.breakpoints[b + 1] - g.breakpoints[b];
    const ExactFraction& v = g.values[b];
    total = total + len * v * (weighted_before - v * len_before);
    len_before = len_before + len;
    weighted_before = weighted_before + len * v;
  }
  return total;
}

QuadratureResult functional_F(const std::function<double(double)>& g, const QuadratureOptions& options) {
  const std::size_t m = std::max<std::size_t>(options.monotonicity_samples, 2);
  double prev = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double v = g(static_cast<double>(k) / static_cast<double>(m - 1));
    if (!(v >= 0 && v <= 1)) throw DomainError("functional_F: boundary leaves [0,1]");
    if (k > 0 && v > prev + 1e-12) throw DomainError("functional_F: boundary is not nonincreasing");
    prev = v;
  }

  std::vector<double> cuts = {0.0, 1.0};
  for (double b : options.breakpoints)
    if (b > 0 && b < 1) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Integrates f over [lo, hi], split at the cuts inside.
  auto piecewise = [&](const auto& f, double lo, double hi, double tol, double& err) {
    double sum = 0;
    double left = lo;
    for (std::size_t k = 0; k < cuts.size() && left < hi; ++k) {
      if (cuts[k] <= left) continue;
      const double right = std::min(cuts[k], hi);
      double e = 0;
      sum += Kronrod::integrate(f, left, right, 15, tol, &e);
      err += e;
      left = right;
    }
    return sum;
  };

  double inner_err = 0;
  auto inner = [&](double x) {
    const double gx = g(x);
    double e = 0;
    const double v = piecewise([&](double y) { const double gy = g(y); return gy * (gx - gy); }, x, 1.0,
                               options.tolerance * 0.1, e);
    inner_err = std::max(inner_err, e);
    return v;
  };
  QuadratureResult out;
  double outer_err = 0;
  out.value = piecewise(inner, 0.0, 1.0, options.tolerance, outer_err);
  out.error_estimate = outer_err + inner_err;
  return out;
}

QuadratureResult functional_F_gstar(double tolerance) {
  QuadratureOptions o;
  o.tolerance = tolerance;
  o.breakpoints = {kInvE};
  return functional_F([](double x) { return eval_gstar(x); }, o);
}

double AtomicMeasure::total_mass() const {
  double total = 0;
  for (const auto& p : pieces) {
    if (p.hi > p.lo) total += moments(p.lo, p.hi, p.a, p.c).m0;
  }
  for (auto [x, w] : atoms) total += w;
  return total;
}

AtomicMeasure AtomicMeasure::plus(const AtomicMeasure& other, double t) const {
  AtomicMeasure out = *this;
  for (auto p : other.pieces) {
    p.a *= t;
    p.c *= t;
    out.pieces.push_back(p);
  }
  for (auto [x, w] : other.atoms) out.atoms.emplace_back(x, t * w);
  return out;
}

void AtomicMeasure::validate(double tol) const {
  normalize(*this, tol);
  const double mass = total_mass();
  if (std::abs(mass - 1) > tol) throw DomainError("measure: total mass " + std::to_string(mass) + " is not 1");
}

AtomicMeasure AtomicMeasure::power_law(double alpha, double beta, double c) {
  AtomicMeasure mu;
  mu.pieces.push_back({alpha, 1.0, 0.0, c});
  if (beta != 0) mu.atoms.emplace_back(1.0, beta);
  return mu;
}

AtomicMeasure AtomicMeasure::canonical() { return power_law(kInvE, kInvE, kInvE); }

AtomicMeasure AtomicMeasure::uniform() {
  AtomicMeasure mu;
  mu.pieces.push_back({0.0, 1.0, 1.0, 0.0});
  return mu;
}

AtomicMeasure AtomicMeasure::point_mass(double location) {
  AtomicMeasure mu;
  mu.atoms.emplace_back(location, 1.0);
  return mu;
}

double kenyon_objective(const AtomicMeasure& mu) {
  mu.validate();
  const Normalized nm = normalize(mu, 1e-12);
  double total = 0;

  // density x density, distinct intervals: m1(I) m1(J) - m2(I) m0(J) for I left of J
  double m1_before = 0, m2_before = 0;
  for (const auto& iv : nm.intervals) {
    const Moments m = moments(iv.lo, iv.hi, iv.a, iv.c);
    total += m.m1 * m1_before - m.m0 * m2_before;
    m1_before += m.m1;
    m2_before += m.m2;

    total += same_interval_term(iv);
  }

  // atom x density
  for (auto [t, w] : nm.atoms)
    for (const auto& iv : nm.intervals) {
      if (iv.lo < t) {
        const Moments m = moments(iv.lo, std::min(iv.hi, t), iv.a, iv.c);
        total += w * (t * m.m1 - m.m2);
      }
      if (iv.hi > t) {
        const Moments m = moments(std::max(iv.lo, t), iv.hi, iv.a, iv.c);
        total += w * (t * m.m1 - t * t * m.m0);
      }
    }

  // atom x atom (sorted by location)
  for (std::size_t i = 0; i < nm.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < nm.atoms.size(); ++j) {
      const auto [x, wx] = nm.atoms[i];
      const auto [y, wy] = nm.atoms[j];
      total += wx * wy * x * (y - x);
    }
  return total;
}

double Perturbation::total() const { return as_measure().total_mass(); }

AtomicMeasure Perturbation::as_measure() const {
  AtomicMeasure eta;
  const double m = static_cast<double>(grid_values.size());
  for (std::size_t k = 0; k < grid_values.size(); ++k)
    if (grid_values[k] != 0)
      eta.pieces.push_back({static_cast<double>(k) / m, static_cast<double>(k + 1) / m, grid_values[k], 0.0});
  eta.atoms = atoms;
  return eta;
}

PerturbationReport perturbation_check(const AtomicMeasure& mu, const Perturbation& eta, double t) {
  if (std::abs(eta.total()) > 1e-12) throw DomainError("perturbation: must integrate to zero");
  const AtomicMeasure moved = mu.plus(eta.as_measure(), t);
  try {
    normalize(moved, 1e-15);
  } catch (const DomainError& e) {
    throw DomainError(std::string("perturbation is infeasible: ") + e.what());
  }
  PerturbationReport r;
  r.base = kenyon_objective(mu);
  r.perturbed = kenyon_objective(moved);
  r.difference = r.perturbed - r.base;
  return r;
}

std::vector<std::size_t> sample_zero_counts(std::size_t n) {
  // zeros in row i: largest j <= n with e*i*j <= n^2, or n when i <= n/e.
  std::vector<std::size_t> z(n);
  const long double e = std::numbers::e_v<long double>;
  const long double nn = static_cast<long double>(n) * static_cast<long double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const long double ii = static_cast<long double>(i);
    if (e * ii <= static_cast<long double>(n)) {
      z[i - 1] = n;
      continue;
    }
    auto j = static_cast<std::size_t>(std::floor(nn / (e * ii)));
    while (j < n && e * ii * static_cast<long double>(j + 1) <= nn) ++j;
    while (j > 0 && e * ii * static_cast<long double>(j) > nn) --j;
    z[i - 1] = std::min(j, n);
  }
  return z;
}

SymbolMatrix sample_matrix(std::size_t n) {
  if (n == 0) throw DimensionError("sample_matrix: n must be positive");
  const auto z = sample_zero_counts(n);
  SymbolMatrix m(n, n, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < z[i]; ++j) m.at(i, j) = 0;
  return m;
}

std::vector<std::pair<double, double>> gstar_curve(std::size_t points) {
  std::vector<std::pair<double, double>> out;
  if (points < 2) points = 2;
  for (std::size_t k = 0; k < points; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(points - 1);
    out.emplace_back(x, eval_gstar(x));
  }
  return out;
}

}  // namespace matdens
