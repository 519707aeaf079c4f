#pragma once
// Parameter classes and the MDL / Bayes / maximum-likelihood predictors.

#include "mdl/dyadic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mdl {

/// One Bernoulli parameter with its complexity in bits. `exact` is present
/// whenever the value is a finite binary fraction; `value` is then its
/// nearest double.
struct Param {
  double value = 0.0;
  std::optional<Dyadic> exact;
  double kw = 0.0;

  static Param dyadic(const Dyadic& d, double kw) { return Param{d.to_double(), d, kw}; }
  static Param real(double v, double kw) { return Param{v, std::nullopt, kw}; }
  std::string label() const;
};

/// Exact when both sides carry a dyadic value, double comparison otherwise.
bool param_less(const Param& a, const Param& b);

/// Finite parameter class with strictly increasing values and a designated
/// true parameter.
class ParamClass {
 public:
  ParamClass(std::vector<Param> params, std::size_t true_index);

  /// Sorts `params` and locates the one equal to `truth`.
  static ParamClass from_unsorted(std::vector<Param> params, const Param& truth);

  const std::vector<Param>& params() const noexcept { return params_; }
  const Param& operator[](std::size_t i) const { return params_[i]; }
  std::size_t size() const noexcept { return params_.size(); }
  std::size_t true_index() const noexcept { return true_index_; }
  const Param& truth() const { return params_[true_index_]; }
  double theta0() const { return params_[true_index_].value; }
  double min_kw() const noexcept { return min_kw_; }
  bool all_exact() const noexcept { return all_exact_; }
  bool integer_kw() const noexcept { return integer_kw_; }
  std::vector<double> kws() const;

  /// Same parameters, true index moved to `index`.
  ParamClass with_truth(std::size_t index) const { return ParamClass(params_, index); }

 private:
  std::vector<Param> params_;
  std::size_t true_index_;
  double min_kw_ = 0.0;
  bool all_exact_ = true;
  bool integer_kw_ = true;
};

/// Sequence length and number of ones.
struct SufficientStat {
  std::uint64_t n = 0;
  std::uint64_t ones = 0;

  SufficientStat() = default;
  SufficientStat(std::uint64_t n_, std::uint64_t ones_);
  double alpha() const { return n == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(n); }
};

enum class Predictor { mdl, bayes, ml };
std::string_view to_string(Predictor p);
Predictor parse_predictor(std::string_view name);

/// argmin of n D(alpha || theta) + Kw(theta) ln 2. Ties go to the lowest Kw,
/// then the smallest value; near-ties are re-scored in extended precision.
std::size_t mdl_select(const ParamClass& cls, SufficientStat stat);

/// mdl_select with every Kw taken as 0.
std::size_t ml_select(const ParamClass& cls, SufficientStat stat);

/// True iff n (D(alpha||theta_j) - D(alpha||theta_i)) >= ln 2 (Kw_i - Kw_j).
bool beats(const ParamClass& cls, std::size_t i, std::size_t j, SufficientStat stat);

/// Posterior-mean next-bit probability under prior weights 2^-Kw.
double bayes_predict(const ParamClass& cls, SufficientStat stat);
/// bayes_predict(cls, stat) - reference, summed as a weighted mean of
/// (theta - reference) to avoid cancellation.
double bayes_predict_offset(const ParamClass& cls, SufficientStat stat, double reference);

/// Prediction of `p` for the given statistic (value of the selected parameter
/// for mdl/ml, posterior mean for bayes).
double predict(const ParamClass& cls, Predictor p, SufficientStat stat);

namespace detail {

/// Shared by mdl_select (use_kw) and ml_select (!use_kw).
std::size_t penalized_select(const ParamClass& cls, SufficientStat stat, bool use_kw);

}  // namespace detail

}  // namespace mdl
