#include "mdl/model.hpp"

#include "mdl/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mdl;

namespace {

// Straight long double argmin with the documented tie rule; used only on
// classes without near-ties.
std::size_t brute_select(const ParamClass& cls, SufficientStat s, bool use_kw) {
  const long double a = s.n ? static_cast<long double>(s.ones) / s.n : 0.0L;
  std::size_t best = 0;
  long double best_score = INFINITY;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const long double t = cls[i].value;
    long double d = 0;
    if (s.n) {
      if ((t == 0 && a > 0) || (t == 1 && a < 1)) d = INFINITY;
      else {
        if (a > 0) d += a * std::log(a / t);
        if (a < 1) d += (1 - a) * std::log((1 - a) / (1 - t));
      }
    }
    const long double score = s.n * d + (use_kw ? cls[i].kw * std::log(2.0L) : 0.0L);
    if (score < best_score || (score == best_score && use_kw && cls[i].kw < cls[best].kw)) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("class validation") {
  CHECK_THROWS(ParamClass({}, 0));
  CHECK_THROWS(ParamClass({Param::real(0.5, 1)}, 1));
  CHECK_THROWS(ParamClass({Param::real(0.6, 1), Param::real(0.5, 1)}, 0));
  CHECK_THROWS(ParamClass({Param::real(0.5, 1), Param::real(0.5, 1)}, 0));
  CHECK_THROWS(ParamClass({Param::real(1.5, 1)}, 0));
  CHECK_THROWS(ParamClass({Param::real(0.5, -1)}, 0));
  const auto cls = ParamClass::from_unsorted({Param::real(0.7, 1), Param::real(0.3, 2)}, Param::real(0.7, 1));
  CHECK(cls.true_index() == 1);
  CHECK(cls.min_kw() == 1);
  CHECK_THROWS(ParamClass::from_unsorted({Param::real(0.7, 1)}, Param::real(0.2, 1)));
}

TEST_CASE("selection matches brute force") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Param> ps;
    for (int i = 0; i < 12; ++i) ps.push_back(Param::real(u(rng), std::floor(u(rng) * 10)));
    const Param truth = ps[0];
    const auto cls = ParamClass::from_unsorted(ps, truth);
    for (std::uint64_t n : {1u, 5u, 37u, 400u})
      for (std::uint64_t k = 0; k <= n; ++k) {
        const SufficientStat s(n, k);
        CHECK(mdl_select(cls, s) == brute_select(cls, s, true));
        CHECK(ml_select(cls, s) == brute_select(cls, s, false));
      }
  }
}

TEST_CASE("tie rules") {
  // n = 0: penalty only
  const ParamClass c({Param::real(0.2, 3), Param::real(0.4, 1), Param::real(0.6, 1)}, 0);
  CHECK(mdl_select(c, SufficientStat(0, 0)) == 1);
  // symmetric pair around alpha with equal Kw: smaller value wins
  const ParamClass sym({Param::dyadic(Dyadic::parse("1/4"), 2), Param::dyadic(Dyadic::parse("3/4"), 2)}, 0);
  CHECK(mdl_select(sym, SufficientStat(2, 1)) == 0);
  CHECK(ml_select(sym, SufficientStat(2, 1)) == 0);
  // same, lower Kw wins
  const ParamClass sym2({Param::dyadic(Dyadic::parse("1/4"), 3), Param::dyadic(Dyadic::parse("3/4"), 2)}, 0);
  CHECK(mdl_select(sym2, SufficientStat(2, 1)) == 1);
  // fair coin, prop4 N=2, alpha = 1 picks 3/4 and alpha = 0 picks 1/2
  const auto p4 = prop4_class(2);
  CHECK(p4[mdl_select(p4, SufficientStat(1, 1))].value == 0.75);
  CHECK(p4[mdl_select(p4, SufficientStat(1, 0))].value == 0.5);
}

TEST_CASE("endpoints are chosen only on matching data") {
  const ParamClass c({Param::real(0.0, 1), Param::real(0.5, 5), Param::real(1.0, 1)}, 1);
  CHECK(mdl_select(c, SufficientStat(10, 0)) == 0);
  CHECK(mdl_select(c, SufficientStat(10, 10)) == 2);
  CHECK(mdl_select(c, SufficientStat(10, 1)) == 1);
  CHECK(mdl_select(c, SufficientStat(1, 0)) == 0);
}

TEST_CASE("the selected parameter beats every other") {
  const auto cls = qbstar_class(5, Dyadic::parse("3/16"));
  for (std::uint64_t n : {1u, 9u, 64u})
    for (std::uint64_t k = 0; k <= n; ++k) {
      const SufficientStat s(n, k);
      const std::size_t sel = mdl_select(cls, s);
      bool ok = true;
      for (std::size_t j = 0; j < cls.size(); ++j) ok = ok && beats(cls, sel, j, s);
      CHECK(ok);
    }
}

TEST_CASE("posterior mean") {
  const auto cls = qbstar_class(4, Dyadic::parse("1/2"));
  for (std::uint64_t n : {0u, 1u, 10u, 300u})
    for (std::uint64_t k = 0; k <= n; ++k) {
      const double p = bayes_predict(cls, SufficientStat(n, k));
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  const ParamClass two({Param::real(0.25, 1), Param::real(0.75, 1)}, 0);
  CHECK(bayes_predict(two, SufficientStat(0, 0)) == doctest::Approx(0.5));
  // one 1: weights 1/4 and 3/4
  CHECK(bayes_predict(two, SufficientStat(1, 1)) == doctest::Approx(0.25 * 0.25 + 0.75 * 0.75));
  CHECK(predict(two, Predictor::bayes, SufficientStat(1, 1)) == doctest::Approx(0.625));
  CHECK(predict(two, Predictor::mdl, SufficientStat(1, 1)) == 0.75);
  CHECK(parse_predictor("ml") == Predictor::ml);
  CHECK_THROWS(parse_predictor("map"));
}
