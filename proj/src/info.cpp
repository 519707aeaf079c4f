#include "mdl/info.hpp"

#include "mdl/summation.hpp"

#include <omp.h>

#include <algorithm>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace mdl {

KlValue kl(double alpha, double theta) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("kl: arguments must lie in [0,1]");
  KlValue out;
  out.value = divergence(alpha, theta);
  out.zero_log_zero = alpha == 0.0 || alpha == 1.0;
  out.infinite = std::isinf(out.value);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

void StatementCheck::record_slack(double slack, std::initializer_list<double> point) {
  ++checked;
  if (slack < -kSlackTolerance) ++violations;
  if (slack < worst_slack) {
    worst_slack = slack;
    worst_point.assign(point.begin(), point.end());
  }
}

void StatementCheck::record(double lhs, double rhs, std::initializer_list<double> point) {
  const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
  double slack = 0.0;
  if (scale > 0.0) slack = (rhs - lhs) / scale;
  if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
  record_slack(slack, point);
}

void StatementCheck::record_log(double log_lhs, double log_rhs, std::initializer_list<double> point) {
  double slack;
  if (log_lhs == log_rhs) {
    slack = 0.0;
  } else if (log_rhs > log_lhs) {
    slack = -std::expm1(log_lhs - log_rhs);
  } else {
    slack = std::expm1(log_rhs - log_lhs);
  }
  record_slack(slack, point);
}

void StatementCheck::merge(const StatementCheck& other) {
  checked += other.checked;
  excluded += other.excluded;
  violations += other.violations;
  if (other.worst_slack < worst_slack) {
    worst_slack = other.worst_slack;
    worst_point = other.worst_point;
  }
}

std::size_t InequalityReport::violations() const {
  std::size_t v = 0;
  for (const auto& s : statements) v += s.violations;
  return v;
}

StatementCheck& InequalityReport::statement(const std::string& name) {
  for (auto& s : statements)
    if (s.statement == name) return s;
  statements.push_back(StatementCheck{name});
  return statements.back();
}

const StatementCheck& InequalityReport::statement(const std::string& name) const {
  for (const auto& s : statements)
    if (s.statement == name) return s;
  throw std::out_of_range("no statement " + name + " in report " + lemma);
}

void InequalityReport::merge(const InequalityReport& other) {
  for (const auto& s : other.statements) statement(s.statement).merge(s);
}

void write_report_csv_header(std::ostream& out) { out << "lemma,statement,grid_size,excluded,violations,worst_slack\n"; }

void write_report_csv(std::ostream& out, const InequalityReport& report) {
  char buf[64];
  for (const auto& s : report.statements) {
    std::snprintf(buf, sizeof buf, "%.17g", s.worst_slack);
    out << report.lemma << ',' << s.statement << ',' << s.checked << ',' << s.excluded << ',' << s.violations << ','
        << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Lemma 1

namespace {

bool in_closed(double x, double lo, double hi) { return x >= lo && x <= hi; }

}  // namespace

InequalityReport check_lemma1(std::span<const std::pair<double, double>> grid) {
  InequalityReport report{"lemma1", std::to_string(grid.size()) + " pairs", {}};
  for (const char* name : {"(i)", "(ii)", "(iii)", "(iii')", "(iv)", "(iv')"}) report.statement(name);
  auto& s1 = report.statement("(i)");
  auto& s2 = report.statement("(ii)");
  auto& s3 = report.statement("(iii)");
  auto& s3m = report.statement("(iii')");
  auto& s4 = report.statement("(iv)");
  auto& s4m = report.statement("(iv')");

  for (const auto& [t, tt] : grid) {
    const bool interior = t > 0.0 && t < 1.0 && tt > 0.0 && tt < 1.0;
    if (!interior) {
      for (auto* s : {&s1, &s2, &s3, &s3m, &s4, &s4m}) ++s->excluded;
      continue;
    }
    const double d = divergence(t, tt);
    const double sq = (t - tt) * (t - tt);
    // Ties in distance to 1/2 pick the first argument.
    const double star = std::fabs(t - 0.5) <= std::fabs(tt - 0.5) ? t : tt;
    const double curv = 2.0 * star * (1.0 - star);

    s1.record(2.0 * sq, d, {t, tt});

    if (in_closed(t, 0.25, 0.75) && in_closed(tt, 0.25, 0.75))
      s2.record(d, 8.0 / 3.0 * sq, {t, tt});
    else
      ++s2.excluded;

    if (t <= 0.5 && tt <= 0.5)
      s3.record(sq / curv, d, {t, tt});
    else
      ++s3.excluded;

    if (t >= 0.5 && tt >= 0.5)
      s3m.record(sq / curv, d, {t, tt});
    else
      ++s3m.excluded;

    if (t <= 0.25 && in_closed(tt, t / 3.0, 3.0 * t))
      s4.record(d, 3.0 * sq / curv, {t, tt});
    else
      ++s4.excluded;

    const double ct = 1.0 - t;
    if (t >= 0.75 && in_closed(tt, 1.0 - 3.0 * ct, 1.0 - ct / 3.0))
      s4m.record(d, 3.0 * sq / curv, {t, tt});
    else
      ++s4m.excluded;
  }
  return report;
}

std::vector<std::pair<double, double>> lemma1_domain_sample(const std::string& statement, std::size_t count,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    double x;
    do {
      x = std::uniform_real_distribution<double>(lo, hi)(rng);
    } while (!(x > 0.0 && x < 1.0));
    return x;
  };
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (statement == "i") {
      out.emplace_back(uniform(0.0, 1.0), uniform(0.0, 1.0));
    } else if (statement == "ii") {
      out.emplace_back(uniform(0.25, 0.75), uniform(0.25, 0.75));
    } else if (statement == "iii") {
      out.emplace_back(uniform(0.0, 0.5), uniform(0.0, 0.5));
    } else if (statement == "iii'") {
      out.emplace_back(uniform(0.5, 1.0), uniform(0.5, 1.0));
    } else if (statement == "iv") {
      const double t = uniform(0.0, 0.25);
      out.emplace_back(t, uniform(t / 3.0, 3.0 * t));
    } else if (statement == "iv'") {
      const double t = uniform(0.75, 1.0);
      const double c = 1.0 - t;
      out.emplace_back(t, uniform(1.0 - 3.0 * c, 1.0 - c / 3.0));
    } else {
      throw std::invalid_argument("unknown lemma-1 statement '" + statement + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binomial probabilities

namespace {

constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;

// ln(n!) - ln(sqrt(2 pi n) (n/e)^n)
double stirling_remainder(double n) {
  constexpr double s0 = 1.0 / 12.0, s1 = 1.0 / 360.0, s2 = 1.0 / 1260.0, s3 = 1.0 / 1680.0, s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    const long double ln = static_cast<long double>(n);
    return static_cast<double>(std::lgamma(ln + 1.0L) - (ln + 0.5L) * std::log(ln) + ln - static_cast<long double>(kLnSqrt2Pi));
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x ln(x / np) + np - x
double deviance(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

}  // namespace

double binom_log_pmf(std::uint64_t n, std::uint64_t k, double theta0) {
  if (k > n) throw std::invalid_argument("binom_pmf: k > n");
  const double inf = std::numeric_limits<double>::infinity();
  const double p = theta0;
  const double q = 1.0 - theta0;
  if (p == 0.0) return k == 0 ? 0.0 : -inf;
  if (q == 0.0) return k == n ? 0.0 : -inf;
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  if (k == 0) return p < 0.1 ? -deviance(dn, dn * q) - dn * p : dn * std::log(q);
  if (k == n) return q < 0.1 ? -deviance(dn, dn * p) - dn * q : dn * std::log(p);
  const double lc = stirling_remainder(dn) - stirling_remainder(dk) - stirling_remainder(dn - dk) - deviance(dk, dn * p) -
                    deviance(dn - dk, dn * q);
  const double lf = 2.0 * kLnSqrt2Pi + std::log(dk) + std::log1p(-dk / dn);
  return lc - 0.5 * lf;
}

double binom_pmf(std::uint64_t n, std::uint64_t k, double theta0) { return std::exp(binom_log_pmf(n, k, theta0)); }

// ---------------------------------------------------------------------------
// Lemma 2

InequalityReport check_lemma2(std::uint64_t n_max, std::span<const double> theta0_grid, int threads) {
  if (n_max < 2) throw std::invalid_argument("check_lemma2: n_max must be >= 2");
  InequalityReport report{"lemma2", "2<=n<=" + std::to_string(n_max) + ", 1<=k<=n-1, " + std::to_string(theta0_grid.size()) + " theta0",
                          {}};
  report.statement("(i)");
  report.statement("(ii)");
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  std::vector<InequalityReport> partial(static_cast<std::size_t>(nthreads), report);

#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
  for (std::int64_t ni = 2; ni <= static_cast<std::int64_t>(n_max); ++ni) {
    auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
    auto& upper = local.statements[0];
    auto& lower = local.statements[1];
    const auto n = static_cast<std::uint64_t>(ni);
    const double dn = static_cast<double>(n);
    for (double t0 : theta0_grid) {
      for (std::uint64_t k = 1; k < n; ++k) {
        const double a = static_cast<double>(k) / dn;
        const double log_p = binom_log_pmf(n, k, t0);
        const double nd = dn * divergence(a, t0);
        const double var = a * (1.0 - a) * dn;
        const double log_upper = -nd - 0.5 * std::log(2.0 * std::numbers::pi * var);
        const double log_lower = -nd - 0.5 * std::log(8.0 * var);
        upper.record_log(log_p, log_upper, {dn, static_cast<double>(k), t0});
        lower.record_log(log_lower, log_p, {dn, static_cast<double>(k), t0});
      }
    }
  }
  for (const auto& p : partial) report.merge(p);
  return report;
}

// ---------------------------------------------------------------------------
// Lemma 3

namespace {

constexpr double kSeriesTailTarget = 1e-15;
constexpr double kSeriesTermBudget = 1e9;

// Rough count of terms needed before the certified tail drops below target.
double lemma3_terms_needed(double z) {
  const double z2 = z * z;
  const double denom = -std::log1p(-std::exp(-z2));
  double n = 1.0;
  for (int it = 0; it < 50; ++it) n = std::max(1.0, (-std::log(kSeriesTailTarget) + 0.5 * std::log(n) + denom) / z2);
  return n;
}

void require_feasible(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("lemma 3 series need z > 0");
  const double need = lemma3_terms_needed(z);
  if (need > kSeriesTermBudget) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "z = %.6g needs about %.3g series terms (budget %.0e); use z >= %.6g", z, need,
                  kSeriesTermBudget, lemma3_min_feasible_z());
    throw std::invalid_argument(buf);
  }
}

template <class Term, class Ratio>
SeriesValue certified_series(Term term, Ratio ratio_bound) {
  CompensatedSum sum;
  SeriesValue out;
  for (std::uint64_t m = 1;; ++m) {
    sum.add(term(m));
    // Terms beyond m shrink at least by ratio_bound(m) per step.
    const double rho = ratio_bound(m);
    if (rho < 1.0) {
      const double tail = term(m + 1) / (1.0 - rho);
      if (tail < kSeriesTailTarget) {
        out.partial = sum.value();
        out.tail_bound = tail;
        out.terms = m;
        return out;
      }
    }
  }
}

}  // namespace

double lemma3_min_feasible_z() {
  double lo = 1e-8, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (lemma3_terms_needed(mid) > kSeriesTermBudget)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

SeriesValue lemma3_s1(double z) {
  require_feasible(z);
  const double z2 = z * z;
  const double decay = std::exp(-z2);
  return certified_series([z2](std::uint64_t n) { return std::sqrt(static_cast<double>(n)) * std::exp(-z2 * static_cast<double>(n)); },
                          [decay](std::uint64_t m) {
                            const double md = static_cast<double>(m);
                            return std::sqrt((md + 2.0) / (md + 1.0)) * decay;
                          });
}

SeriesValue lemma3_s2(double z) {
  require_feasible(z);
  const double z2 = z * z;
  const double decay = std::exp(-z2);
  return certified_series([z2](std::uint64_t n) { return std::exp(-z2 * static_cast<double>(n)) / std::sqrt(static_cast<double>(n)); },
                          [decay](std::uint64_t) { return decay; });
}

InequalityReport check_lemma3(std::span<const double> z_grid) {
  InequalityReport report{"lemma3", std::to_string(z_grid.size()) + " z values", {}};
  auto& lower = report.statement("(i) lower");
  auto& upper = report.statement("(i) upper");
  auto& second = report.statement("(ii)");
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::e);
  for (double z : z_grid) {
    const SeriesValue s1 = lemma3_s1(z);
    const SeriesValue s2 = lemma3_s2(z);
    const double main = sqrt_pi / (2.0 * z * z * z);
    // partial <= true sum <= partial + tail
    lower.record(main - c / z, s1.partial, {z});
    upper.record(s1.partial + s1.tail_bound, main + c / z, {z});
    second.record(s2.partial + s2.tail_bound, sqrt_pi / z, {z});
  }
  return report;
}

}  // namespace mdl
