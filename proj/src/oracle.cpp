#include "mdl/oracle.hpp"

#include "mdl/loss_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mdl {

namespace {

mpq_class power(const mpq_class& x, std::uint64_t e) {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), x.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), x.get_den_mpz_t(), e);
  mpq_class out(num, den);
  out.canonicalize();
  return out;
}

mpq_class pow2_neg(long e) {
  mpz_class den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  return mpq_class(mpz_class(1), den);
}

/// theta^k (1-theta)^(n-k) times the prior weight, exactly.
std::vector<mpq_class> exact_scores(const ParamClass& cls, SufficientStat stat, bool use_kw) {
  std::vector<mpq_class> out;
  out.reserve(cls.size());
  for (const auto& p : cls.params()) {
    const mpq_class t = exact_value(p);
    mpq_class s = power(t, stat.ones) * power(1 - t, stat.n - stat.ones);
    if (use_kw) s *= pow2_neg(static_cast<long>(p.kw));
    out.push_back(s);
  }
  return out;
}

}  // namespace

mpq_class exact_value(const Param& p) {
  if (!p.exact) throw std::invalid_argument("oracle: parameter " + p.label() + " has no exact dyadic value");
  mpz_class num(p.exact->mantissa().str());
  mpz_class den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), p.exact->exponent());
  mpq_class out(num, den);
  out.canonicalize();
  return out;
}

std::size_t oracle_select(const ParamClass& cls, SufficientStat stat, bool use_kw) {
  const auto& ps = cls.params();
  auto better_tiebreak = [&](std::size_t i, std::size_t j) { return use_kw && ps[i].kw < ps[j].kw; };
  if (!use_kw || cls.integer_kw()) {
    const auto scores = exact_scores(cls, stat, use_kw);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ps.size(); ++i) {
      const int c = cmp(scores[i], scores[best]);
      if (c > 0 || (c == 0 && better_tiebreak(i, best))) best = i;
    }
    return best;
  }
  const long double ln2 = 0.693147180559945309417232121458176568L;
  const long double inf = std::numeric_limits<long double>::infinity();
  std::vector<long double> scores;
  for (const auto& p : ps) {
    const long double t = p.exact ? p.exact->to_long_double() : static_cast<long double>(p.value);
    long double l = -static_cast<long double>(p.kw) * ln2;
    if (stat.ones > 0) l += t > 0 ? static_cast<long double>(stat.ones) * std::log(t) : -inf;
    if (stat.n > stat.ones) l += t < 1 ? static_cast<long double>(stat.n - stat.ones) * std::log1p(-t) : -inf;
    scores.push_back(l);
  }
  long double top = -inf;
  for (auto s : scores) top = std::max(top, s);
  const long double margin = 1e-15L * std::max(1.0L, std::fabs(top));
  std::size_t best = ps.size();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(scores[i] >= top - margin)) continue;
    if (best == ps.size() || better_tiebreak(i, best)) best = i;
  }
  return best;
}

mpq_class oracle_bayes_predict(const ParamClass& cls, SufficientStat stat) {
  if (!cls.integer_kw()) throw std::invalid_argument("oracle: exact posterior needs integer complexities");
  const auto scores = exact_scores(cls, stat, true);
  mpq_class total = 0;
  mpq_class weighted = 0;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    total += scores[i];
    weighted += scores[i] * exact_value(cls[i]);
  }
  if (total == 0) throw std::runtime_error("oracle: every posterior weight is zero");
  return weighted / total;
}

mpq_class oracle_expected_loss(const ParamClass& cls, Predictor predictor, std::uint64_t n) {
  if (n > kOracleMaxN) throw std::invalid_argument("oracle: n must be <= 32");
  if (!cls.all_exact()) throw std::invalid_argument("oracle: class values must all be exact dyadics");
  const mpq_class theta0 = exact_value(cls.truth());
  mpq_class total = 0;
  mpz_class binom = 1;
  for (std::uint64_t k = 0; k <= n; ++k) {
    if (k > 0) {
      binom *= static_cast<unsigned long>(n - k + 1);
      binom /= static_cast<unsigned long>(k);
    }
    const mpq_class prob = mpq_class(binom) * power(theta0, k) * power(1 - theta0, n - k);
    if (prob == 0) continue;
    const SufficientStat stat(n, k);
    mpq_class prediction;
    switch (predictor) {
      case Predictor::mdl:
        prediction = exact_value(cls[oracle_select(cls, stat, true)]);
        break;
      case Predictor::ml:
        prediction = exact_value(cls[oracle_select(cls, stat, false)]);
        break;
      case Predictor::bayes:
        prediction = oracle_bayes_predict(cls, stat);
        break;
    }
    const mpq_class err = prediction - theta0;
    total += prob * err * err;
  }
  return total;
}

OracleComparison compare_with_oracle(const ParamClass& cls, Predictor predictor, std::uint64_t n_max, int threads) {
  EngineOptions options;
  options.window = WindowPolicy::full;
  options.threads = threads;
  const LossCurve curve = cumulative_loss(cls, predictor, n_max, options);
  OracleComparison out;
  for (const auto& p : curve.points) {
    const double exact = oracle_expected_loss(cls, predictor, p.n).get_d();
    double rel = 0.0;
    if (exact != p.window_loss) rel = std::fabs(p.window_loss - exact) / std::max(std::fabs(exact), std::fabs(p.window_loss));
    ++out.compared;
    if (out.worst_n == 0 || rel > out.worst_relative) {
      out.worst_relative = rel;
      out.worst_n = p.n;
    }
  }
  return out;
}

}  // namespace mdl
