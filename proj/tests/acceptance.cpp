// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "mdl/bounds.hpp"
#include "mdl/coding.hpp"
#include "mdl/info.hpp"
#include "mdl/intervals.hpp"
#include "mdl/loss_engine.hpp"
#include "mdl/oracle.hpp"
#include "mdl/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mdl;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_seconds > 0 && secs > limit_seconds) {
    o.passed = false;
    o.detail += " [over time limit]";
  }
  if (!o.passed) ++failures;
  std::printf("criterion %2d %s: %s | %s | %.1fs\n", id, o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string csv_of(const LossCurve& c, const std::string& label) {
  std::ostringstream out;
  write_curve_csv(out, c, label);
  return out.str();
}

std::string csv_of(const Partition& p, const ContributionMatrix& m) {
  std::ostringstream out;
  write_contributions_csv(out, p, m);
  return out.str();
}

Dyadic D(const char* s) { return Dyadic::parse(s); }

}  // namespace

int main() {
  // Lower-bound scenario, shared by criteria 1, 2 and 10.
  const ParamClass prop4 = prop4_class(3);
  const Partition prop4_part = prop4_partition(3);
  EngineOptions hoeff;
  hoeff.window = WindowPolicy::hoeffding;
  hoeff.threads = 1;
  ContributionRun serial_run;
  ContributionRun parallel_run;

  report(1, "prop4 N=3 cumulative MDL loss >= 3/84 (horizon 2^18, Hoeffding windows)", 600, [&] {
    serial_run = interval_contributions(prop4, Predictor::mdl, std::uint64_t{1} << 18, prop4_part, hoeff);
    const double lower = serial_run.curve.lower();
    const double bound = prop4_lower_bound(3);
    return Outcome{lower >= bound, "cumulative_lower=" + fmt("%.10g", lower) + " bound=" + fmt("%.10g", bound) +
                                       " cumulative_upper=" + fmt("%.10g", serial_run.curve.upper())};
  });

  report(2, "per-interval contributions C(5..7) > 1/84 and sum_k C(k) = cumulative_lower", 0, [&] {
    bool ok = true;
    std::string detail;
    for (std::size_t b = 0; b < prop4_part.bucket_count(); ++b) {
      const long key = prop4_part.key(b);
      if (key < 5 || key > 7) continue;
      const double c = serial_run.matrix.by_alpha(b);
      ok = ok && c > 1.0 / 84.0;
      detail += "C(" + std::to_string(key) + ")=" + fmt("%.6g", c) + " ";
    }
    double sum = 0;
    for (std::size_t b = 0; b < prop4_part.bucket_count(); ++b) sum += serial_run.matrix.by_alpha(b);
    const double diff = std::fabs(sum - serial_run.curve.lower());
    ok = ok && diff <= 1e-9;
    return Outcome{ok, detail + "|sum-lower|=" + fmt("%.3g", diff)};
  });

  report(3, "instantaneous MDL bound for 3 <= n <= 10^4 (full windows)", 120, [&] {
    EngineOptions full;
    full.window = WindowPolicy::full;
    std::string detail;
    bool ok = true;
    const std::vector<std::pair<std::string, ParamClass>> cases{{"prop4:N=3", prop4},
                                                               {"qbstar:max_len=10,theta0=3/16", qbstar_class(10, D("3/16"))}};
    for (const auto& [name, cls] : cases) {
      const auto curve = cumulative_loss(cls, Predictor::mdl, 10000, full);
      const auto c = check_instantaneous(curve, cls.truth().kw, 3, 10000);
      ok = ok && c.passed() && c.checked == 9998;
      detail += name + ": checked=" + std::to_string(c.checked) + " violations=" + std::to_string(c.violations) +
                " max_ratio=" + fmt("%.4g", c.worst_ratio) + "; ";
    }
    return Outcome{ok, detail};
  });

  report(4, "mixture partial sums <= Kw ln 2 (qbstar max_len=8, theta0=1/2, horizon 10^4)", 120, [&] {
    const auto cls = qbstar_class(8, D("1/2"));
    const double kraft = kraft_sum(cls.kws());
    EngineOptions full;
    full.window = WindowPolicy::full;
    const auto curve = cumulative_loss(cls, Predictor::bayes, 10000, full);
    const double bound = mixture_bound(cls.truth().kw);
    const auto c = check_partial_sums(curve, bound);
    return Outcome{kraft <= 1.0 && cls.truth().kw == 3 && c.passed() && c.checked == 10000,
                   "kraft_sum=" + fmt("%.6g", kraft) + " final=" + fmt("%.10g", curve.lower()) + " bound=" +
                       fmt("%.10g", bound) + " violations=" + std::to_string(c.violations)};
  });

  std::vector<std::string> half_kw_csv_serial;
  report(5, "cumulative MDL loss <= Kw/2 on qbstar max_len=12 (horizon 10^5)", 0, [&] {
    bool ok = true;
    std::string detail;
    EngineOptions opts;
    opts.threads = 1;
    for (const char* t : {"1/2", "3/16", "5/32"}) {
      const auto cls = qbstar_class(12, D(t));
      const auto curve = cumulative_loss(cls, Predictor::mdl, 100000, opts);
      half_kw_csv_serial.push_back(csv_of(curve, t));
      const double half = 0.5 * cls.truth().kw;
      ok = ok && curve.lower() <= half;
      detail += std::string("theta0=") + t + ": " + fmt("%.6g", curve.lower()) + " <= " + fmt("%g", half) + "; ";
    }
    return Outcome{ok, detail};
  });

  report(6, "entropy, Stirling and series inequality suites", 0, [&] {
    std::size_t v1 = 0;
    for (const std::string st : {"i", "ii", "iii", "iii'", "iv", "iv'"}) {
      const auto r = check_lemma1(lemma1_domain_sample(st, 10000, 1));
      const auto& s = r.statement("(" + st + ")");
      v1 += s.violations + (s.checked == 10000 ? 0 : 1);
    }
    std::vector<double> thetas;
    for (int i = 1; i <= 9; ++i) thetas.push_back(i / 10.0);
    const auto l2 = check_lemma2(2000, thetas);
    std::vector<double> zs;
    for (int i = 1; i <= 30; ++i) zs.push_back(i / 10.0);
    const auto l3 = check_lemma3(zs);
    return Outcome{v1 == 0 && l2.passed() && l3.passed(), "lemma1 violations=" + std::to_string(v1) +
                                                             " lemma2 violations=" + std::to_string(l2.violations()) +
                                                             " lemma3 violations=" + std::to_string(l3.violations())};
  });

  report(7, "interval construction: figure reproduction and invariants", 0, [&] {
    const auto fig = build_construction(D("3/16"), 4);
    const std::vector<std::pair<std::string, std::string>> expected{{"[0,1/2)", "[1/2,1)"},
                                                                    {"[1/8,3/8)", "[0,1/8) U [3/8,1/2)"},
                                                                    {"[1/8,1/4)", "[1/4,3/8)"},
                                                                    {"[5/32,7/32)", "[1/8,5/32) U [7/32,1/4)"}};
    std::string types;
    bool fig_ok = fig.size() == 4;
    for (std::size_t i = 0; i < fig.size(); ++i) {
      types += to_char(fig[i].type);
      fig_ok = fig_ok && fig[i].J.str() == expected[i].first && fig[i].I_str() == expected[i].second;
    }
    fig_ok = fig_ok && types == "lclc";
    std::mt19937_64 rng(20);
    std::size_t problems = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int len = 1 + static_cast<int>(rng() % 10);
      const std::uint64_t m = (rng() % (std::uint64_t{1} << (len - 1))) * 2 + 1;
      const Dyadic theta0 = Dyadic::from_fraction(BigInt(m), static_cast<std::uint32_t>(len));
      problems += construction_violations(theta0, build_construction(theta0, 20)).size();
    }
    return Outcome{fig_ok && problems == 0, "types=" + types + " J4=" + fig[3].J.str() + " I4=" + fig[3].I_str() +
                                                " invariant violations=" + std::to_string(problems)};
  });

  report(8, "spacing condition and derivative-order parameters", 0, [&] {
    bool ok = true;
    std::string detail;
    for (const char* t : {"1/2", "3/16"}) {
      const auto r = condition14_check(qbstar_class(10, D(t)), 1, 0, 24);
      ok = ok && r.passed;
      detail += std::string("qbstar ") + t + (r.passed ? " pass" : " fail") + "; ";
    }
    const auto r = condition14_check(prop4, 1, 0, 24);
    const bool witness_ok = !r.passed && r.witness && r.witness->k == 4 && *prop4[r.witness->index].exact == D("9/16");
    ok = ok && witness_ok;
    if (r.witness)
      detail += "prop4 fails at k=" + std::to_string(r.witness->k) + " theta=" + prop4[r.witness->index].label() + "; ";
    struct Poly {
      const char* coeffs;
      const char* t0;
      double eps;
      int order;
      double c;
    };
    const std::vector<Poly> polys{{"0,1", "3/8", 0.25, 1, 1.0}, {"0,0,1", "1/2", 0.125, 1, 0.75}, {"0.375,0.75,-1.5,1", "1/2", 0.25, 3, 6.0}};
    for (const auto& p : polys) {
      const auto h = corollary9_bound_params(parse_polynomial(p.coeffs), D(p.t0), p.eps);
      const bool good = h.order == p.order && std::fabs(h.c - p.c) <= 1e-9 * p.c && h.a == p.order;
      ok = ok && good;
      detail += std::string("phi=") + p.coeffs + ": n=" + std::to_string(h.order) + " c=" + fmt("%g", h.c) + "; ";
    }
    return Outcome{ok, detail};
  });

  report(9, "fast engine matches exact rational oracle for n <= 32", 60, [&] {
    std::vector<ParamClass> classes{prop4_class(1), prop4_class(2)};
    for (int len : {2, 3})
      for (const auto& t : enumerate_qbstar(len)) classes.push_back(qbstar_class(len, t));
    double worst = 0;
    std::size_t compared = 0;
    for (const auto& cls : classes)
      for (auto p : {Predictor::mdl, Predictor::bayes, Predictor::ml}) {
        const auto c = compare_with_oracle(cls, p, kOracleMaxN);
        worst = std::max(worst, c.worst_relative);
        compared += c.compared;
      }
    return Outcome{worst <= 1e-10, "compared=" + std::to_string(compared) + " max_relative_difference=" + fmt("%.3g", worst)};
  });

  report(10, "byte-identical CSVs for 1 and 8 threads (criteria 1 and 5)", 0, [&] {
    EngineOptions eight = hoeff;
    eight.threads = 8;
    parallel_run = interval_contributions(prop4, Predictor::mdl, std::uint64_t{1} << 18, prop4_part, eight);
    bool ok = csv_of(serial_run.curve, "prop4") == csv_of(parallel_run.curve, "prop4") &&
              csv_of(prop4_part, serial_run.matrix) == csv_of(prop4_part, parallel_run.matrix);
    const bool first = ok;
    EngineOptions opts;
    opts.threads = 8;
    std::size_t i = 0;
    for (const char* t : {"1/2", "3/16", "5/32"}) {
      const auto curve = cumulative_loss(qbstar_class(12, D(t)), Predictor::mdl, 100000, opts);
      ok = ok && i < half_kw_csv_serial.size() && csv_of(curve, t) == half_kw_csv_serial[i];
      ++i;
    }
    return Outcome{ok, std::string("prop4 ") + (first ? "identical" : "differs") + ", qbstar " + (ok ? "identical" : "differs")};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
