#pragma once
// Kullback-Leibler divergence, binomial probabilities and the inequality
// suites built on them.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mdl {

namespace detail {

/// log(1 + x) - x without cancellation near 0.
template <class Real>
Real log1p_minus_x(Real x) {
  using std::fabs;
  using std::log1p;
  if (fabs(x) < Real(0.1)) {
    // -x^2/2 + x^3/3 - ...
    Real power = x * x;
    Real sum = 0;
    for (int k = 2; k < 60; ++k) {
      const Real term = ((k % 2 == 0) ? -power : power) / Real(k);
      sum += term;
      if (fabs(term) <= std::numeric_limits<Real>::epsilon() * fabs(sum) * Real(0.25)) break;
      power *= x;
    }
    return sum;
  }
  return log1p(x) - x;
}

}  // namespace detail

/// D(a || t) in nats, with 0 ln 0 = 0 and x ln(x/0) = +inf for x > 0.
/// Evaluated as (a-t)^2/(t(1-t)) plus log1p remainders, which stays accurate
/// when a and t are close.
template <class Real>
Real divergence(Real a, Real t) {
  using std::log;
  using std::log1p;
  if (a == t) return Real(0);
  const Real inf = std::numeric_limits<Real>::infinity();
  if (t <= 0) return a > 0 ? inf : Real(0);
  if (t >= 1) return a < 1 ? inf : Real(0);
  if (a <= 0) return -log1p(-t);
  if (a >= 1) return -log(t);
  const Real d = a - t;
  const Real u = d / t;
  const Real v = -d / (1 - t);
  const Real value = d * d / (t * (1 - t)) + a * detail::log1p_minus_x(u) + (1 - a) * detail::log1p_minus_x(v);
  return value > 0 ? value : Real(0);
}

struct KlValue {
  double value = 0.0;          ///< nats, possibly +inf
  bool zero_log_zero = false;  ///< a term 0 ln 0 was taken as 0
  bool infinite = false;       ///< a term x ln(x/0), x > 0, made the value +inf
};

KlValue kl(double alpha, double theta);

/// Tolerance on relative slack below which an inequality counts as violated.
inline constexpr double kSlackTolerance = 1e-12;

/// Outcome of one inequality over a grid.
struct StatementCheck {
  std::string statement;
  std::size_t checked = 0;
  std::size_t excluded = 0;  ///< grid points outside this statement's domain
  std::size_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> worst_point{};

  /// Records lhs <= rhs. Slack is (rhs - lhs) / max(|lhs|, |rhs|).
  void record(double lhs, double rhs, std::initializer_list<double> point);
  /// Same, for positive quantities given by their logarithms.
  void record_log(double log_lhs, double log_rhs, std::initializer_list<double> point);
  void record_slack(double slack, std::initializer_list<double> point);
  void merge(const StatementCheck& other);
};

struct InequalityReport {
  std::string lemma;
  std::string grid;
  std::vector<StatementCheck> statements;

  std::size_t violations() const;
  bool passed() const { return violations() == 0; }
  StatementCheck& statement(const std::string& name);
  const StatementCheck& statement(const std::string& name) const;
  void merge(const InequalityReport& other);
};

/// CSV: lemma,statement,grid_size,excluded,violations,worst_slack
void write_report_csv_header(std::ostream& out);
void write_report_csv(std::ostream& out, const InequalityReport& report);

/// Entropy inequalities (i)-(iv) plus the mirrored (iii') and (iv') over
/// (theta, theta~) pairs. Points outside a statement's domain are counted as
/// excluded for that statement.
InequalityReport check_lemma1(std::span<const std::pair<double, double>> grid);

/// Random pairs drawn from the domain of one lemma-1 statement:
/// "i", "ii", "iii", "iii'", "iv", "iv'".
std::vector<std::pair<double, double>> lemma1_domain_sample(const std::string& statement, std::size_t count,
                                                            std::uint64_t seed);

/// log of C(n,k) t^k (1-t)^(n-k), via the saddle-point form (Stirling
/// remainders and deviance terms).
double binom_log_pmf(std::uint64_t n, std::uint64_t k, double theta0);
double binom_pmf(std::uint64_t n, std::uint64_t k, double theta0);

/// Stirling envelopes for every 2 <= n <= n_max and 1 <= k <= n - 1.
InequalityReport check_lemma2(std::uint64_t n_max, std::span<const double> theta0_grid, int threads = 0);

/// Series S1(z) = sum sqrt(n) exp(-z^2 n), S2(z) = sum n^-1/2 exp(-z^2 n)
/// with certified remainders.
struct SeriesValue {
  double partial = 0.0;
  double tail_bound = 0.0;
  std::uint64_t terms = 0;
};
SeriesValue lemma3_s1(double z);
SeriesValue lemma3_s2(double z);
/// Smallest z for which the series above stay within the term budget.
double lemma3_min_feasible_z();

InequalityReport check_lemma3(std::span<const double> z_grid);

}  // namespace mdl
