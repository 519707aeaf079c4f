#include "mdl/model.hpp"

#include "mdl/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mdl {

namespace {

constexpr long double kLn2L = 0.693147180559945309417232121458176568L;

// Relative score band inside which double-precision scores are re-evaluated.
constexpr double kNearTieBand = 1e-9;

long double tie_tolerance(long double score) {
  return 64.0L * std::numeric_limits<long double>::epsilon() * std::max(1.0L, std::fabs(score));
}

long double exact_or_value(const Param& p) { return p.exact ? p.exact->to_long_double() : static_cast<long double>(p.value); }

long double alpha_ld(SufficientStat s) {
  return s.n == 0 ? 0.0L : static_cast<long double>(s.ones) / static_cast<long double>(s.n);
}

long double penalized_score_ld(const Param& p, SufficientStat s, bool use_kw) {
  const long double d = divergence(alpha_ld(s), exact_or_value(p));
  const long double penalty = use_kw ? static_cast<long double>(p.kw) * kLn2L : 0.0L;
  if (std::isinf(d)) return d;
  return static_cast<long double>(s.n) * d + penalty;
}

}  // namespace

std::string Param::label() const {
  if (exact) return exact->str();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

bool param_less(const Param& a, const Param& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact;
  return a.value < b.value;
}

ParamClass::ParamClass(std::vector<Param> params, std::size_t true_index)
    : params_(std::move(params)), true_index_(true_index) {
  if (params_.empty()) throw std::invalid_argument("parameter class is empty");
  if (true_index_ >= params_.size()) throw std::invalid_argument("true index out of range");
  min_kw_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Param& p = params_[i];
    if (!(p.value >= 0.0 && p.value <= 1.0)) throw std::invalid_argument("parameter " + p.label() + " outside [0,1]");
    if (!(p.kw >= 0.0) || !std::isfinite(p.kw)) throw std::invalid_argument("parameter " + p.label() + " has invalid Kw");
    if (i > 0 && !param_less(params_[i - 1], p))
      throw std::invalid_argument("parameter values must be strictly increasing (" + params_[i - 1].label() + ", " + p.label() + ")");
    min_kw_ = std::min(min_kw_, p.kw);
    all_exact_ = all_exact_ && p.exact.has_value();
    integer_kw_ = integer_kw_ && p.kw == std::floor(p.kw);
  }
}

ParamClass ParamClass::from_unsorted(std::vector<Param> params, const Param& truth) {
  std::stable_sort(params.begin(), params.end(), param_less);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Param& p = params[i];
    const bool same = (p.exact && truth.exact) ? *p.exact == *truth.exact : p.value == truth.value;
    if (same) return ParamClass(std::move(params), i);
  }
  throw std::invalid_argument("true parameter " + truth.label() + " is not a member of the class");
}

std::vector<double> ParamClass::kws() const {
  std::vector<double> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.kw);
  return out;
}

SufficientStat::SufficientStat(std::uint64_t n_, std::uint64_t ones_) : n(n_), ones(ones_) {
  if (ones > n) throw std::invalid_argument("sufficient statistic: ones > n");
}

std::string_view to_string(Predictor p) {
  switch (p) {
    case Predictor::mdl:
      return "mdl";
    case Predictor::bayes:
      return "bayes";
    case Predictor::ml:
      return "ml";
  }
  return "?";
}

Predictor parse_predictor(std::string_view name) {
  if (name == "mdl") return Predictor::mdl;
  if (name == "bayes") return Predictor::bayes;
  if (name == "ml") return Predictor::ml;
  throw std::invalid_argument("unknown predictor '" + std::string(name) + "' (expected mdl, bayes or ml)");
}

namespace detail {

std::size_t penalized_select(const ParamClass& cls, SufficientStat stat, bool use_kw) {
  const auto& ps = cls.params();
  if (stat.n == 0) {
    if (!use_kw) return 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (ps[i].kw == cls.min_kw()) return i;
  }
  const double alpha = stat.alpha();
  const double dn = static_cast<double>(stat.n);
  const double ln2 = std::numbers::ln2;

  std::vector<double> score(ps.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double d = divergence(alpha, ps[i].value);
    score[i] = std::isinf(d) ? d : dn * d + (use_kw ? ps[i].kw * ln2 : 0.0);
    best = std::min(best, score[i]);
  }

  std::vector<std::size_t> band;
  if (std::isinf(best)) {
    for (std::size_t i = 0; i < ps.size(); ++i) band.push_back(i);
  } else {
    const double limit = best + kNearTieBand * std::max(1.0, std::fabs(best));
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (score[i] <= limit) band.push_back(i);
  }
  if (band.size() == 1) return band.front();

  // Extended-precision re-score, then lowest Kw, then smallest value.
  std::vector<long double> refined(band.size());
  long double best_ld = std::numeric_limits<long double>::infinity();
  for (std::size_t b = 0; b < band.size(); ++b) {
    refined[b] = penalized_score_ld(ps[band[b]], stat, use_kw);
    best_ld = std::min(best_ld, refined[b]);
  }
  const long double tol = std::isinf(best_ld) ? 0.0L : tie_tolerance(best_ld);
  std::size_t chosen = ps.size();
  for (std::size_t b = 0; b < band.size(); ++b) {
    const bool tied = std::isinf(best_ld) ? true : refined[b] <= best_ld + tol;
    if (!tied) continue;
    const std::size_t i = band[b];
    const double kw_i = use_kw ? ps[i].kw : 0.0;
    if (chosen == ps.size() || kw_i < (use_kw ? ps[chosen].kw : 0.0)) chosen = i;
  }
  return chosen;
}

}  // namespace detail

std::size_t mdl_select(const ParamClass& cls, SufficientStat stat) { return detail::penalized_select(cls, stat, true); }

std::size_t ml_select(const ParamClass& cls, SufficientStat stat) { return detail::penalized_select(cls, stat, false); }

bool beats(const ParamClass& cls, std::size_t i, std::size_t j, SufficientStat stat) {
  if (i >= cls.size() || j >= cls.size()) throw std::out_of_range("beats: index out of range");
  const long double a = alpha_ld(stat);
  const long double di = divergence(a, exact_or_value(cls[i]));
  const long double dj = divergence(a, exact_or_value(cls[j]));
  const long double rhs = kLn2L * (static_cast<long double>(cls[i].kw) - static_cast<long double>(cls[j].kw));
  if (stat.n > 0) {
    if (std::isinf(di) && std::isinf(dj)) return rhs <= 0.0L;
    if (std::isinf(dj)) return true;
    if (std::isinf(di)) return false;
  }
  const long double lhs = static_cast<long double>(stat.n) * (dj - di);
  // Same tolerance as the selection tie rule, so the selected index always
  // beats or ties the rest.
  const long double scale = static_cast<long double>(stat.n) * std::max(di, dj) + std::fabs(rhs);
  return lhs >= rhs - tie_tolerance(scale);
}

namespace {

struct Posterior {
  long double weight_sum = 0.0L;
  long double weighted_offset = 0.0L;
};

Posterior posterior(const ParamClass& cls, SufficientStat stat, double reference) {
  const auto& ps = cls.params();
  const long double k = static_cast<long double>(stat.ones);
  const long double m = static_cast<long double>(stat.n - stat.ones);
  std::vector<long double> logw(ps.size());
  long double top = -std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const long double t = exact_or_value(ps[i]);
    long double l = -static_cast<long double>(ps[i].kw) * kLn2L;
    if (stat.ones > 0) l += t > 0.0L ? k * std::log(t) : -std::numeric_limits<long double>::infinity();
    if (stat.n > stat.ones) l += t < 1.0L ? m * std::log1p(-t) : -std::numeric_limits<long double>::infinity();
    logw[i] = l;
    top = std::max(top, l);
  }
  if (std::isinf(top)) throw std::runtime_error("bayes_predict: every posterior weight vanished");
  Posterior post;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const long double w = std::exp(logw[i] - top);
    post.weight_sum += w;
    post.weighted_offset += w * (static_cast<long double>(ps[i].value) - static_cast<long double>(reference));
  }
  return post;
}

}  // namespace

double bayes_predict_offset(const ParamClass& cls, SufficientStat stat, double reference) {
  const Posterior post = posterior(cls, stat, reference);
  return static_cast<double>(post.weighted_offset / post.weight_sum);
}

double bayes_predict(const ParamClass& cls, SufficientStat stat) {
  const double mean = bayes_predict_offset(cls, stat, 0.0);
  const double lo = cls.params().front().value;
  const double hi = cls.params().back().value;
  return std::clamp(mean, lo, hi);
}

double predict(const ParamClass& cls, Predictor p, SufficientStat stat) {
  switch (p) {
    case Predictor::mdl:
      return cls[mdl_select(cls, stat)].value;
    case Predictor::ml:
      return cls[ml_select(cls, stat)].value;
    case Predictor::bayes:
      return bayes_predict(cls, stat);
  }
  return 0.0;
}

}  // namespace mdl
