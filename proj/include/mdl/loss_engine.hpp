#pragma once
// Exact expected square loss of a predictor under Binomial(n, theta0), per n
// and cumulated over a horizon.

#include "mdl/intervals.hpp"
#include "mdl/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdl {

enum class WindowPolicy { full, hoeffding, automatic };

std::string_view to_string(WindowPolicy w);
WindowPolicy parse_window(std::string_view name);

struct EngineOptions {
  WindowPolicy window = WindowPolicy::automatic;
  int threads = 0;                          ///< 0: OpenMP default
  std::uint64_t full_window_limit = 10000;  ///< automatic: full for n <= this
  double budget = 1e11;                     ///< rough operation count allowed per run
};

/// Range of k = number of ones kept for a given n.
struct Window {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  double tail_bound = 0.0;  ///< bound on the omitted contribution; 0 when full
};

/// c_n = sqrt(ln(2 n^2)); keeps every k with |k/n - theta0| <= c_n / sqrt(n).
Window hoeffding_window(std::uint64_t n, double theta0);
Window select_window(std::uint64_t n, double theta0, WindowPolicy policy, std::uint64_t full_window_limit = 10000);

struct LossPoint {
  std::uint64_t n = 0;
  double window_loss = 0.0;
  double tail_bound = 0.0;
};

struct LossCurve {
  Predictor predictor = Predictor::mdl;
  std::vector<LossPoint> points;  ///< n = 1..horizon
  std::vector<double> cumulative_lower;
  std::vector<double> cumulative_upper;
  bool beyond_horizon = true;  ///< the upper sums cover n <= horizon only

  std::uint64_t horizon() const noexcept { return points.size(); }
  double lower() const { return cumulative_lower.empty() ? 0.0 : cumulative_lower.back(); }
  double upper() const { return cumulative_upper.empty() ? 0.0 : cumulative_upper.back(); }
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double estimate, double budget);
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// Operation-count estimate used for the budget check.
double estimate_cost(const ParamClass& cls, Predictor predictor, std::uint64_t horizon, const EngineOptions& options);

LossPoint instantaneous_loss(const ParamClass& cls, Predictor predictor, std::uint64_t n, WindowPolicy policy,
                             std::uint64_t full_window_limit = 10000);

/// Parallel over chunks of n; bit-identical for any thread count.
LossCurve cumulative_loss(const ParamClass& cls, Predictor predictor, std::uint64_t horizon, const EngineOptions& options = {});

/// Serial, scores every parameter at every k and evaluates each binomial
/// probability independently. Slow; for testing.
LossCurve cumulative_loss_reference(const ParamClass& cls, Predictor predictor, std::uint64_t horizon,
                                    const EngineOptions& options = {});

/// cell(r, c): summed loss where the prediction lies in bucket r and the
/// observed fraction k/n in bucket c.
class ContributionMatrix {
 public:
  ContributionMatrix() = default;
  explicit ContributionMatrix(std::size_t buckets) : buckets_(buckets), cells_(buckets * buckets, 0.0) {}

  std::size_t buckets() const noexcept { return buckets_; }
  double cell(std::size_t prediction_bucket, std::size_t alpha_bucket) const {
    return cells_.at(prediction_bucket * buckets_ + alpha_bucket);
  }
  double& cell(std::size_t prediction_bucket, std::size_t alpha_bucket) {
    return cells_.at(prediction_bucket * buckets_ + alpha_bucket);
  }
  double by_prediction(std::size_t bucket) const;
  double by_alpha(std::size_t bucket) const;
  double total() const;

 private:
  std::size_t buckets_ = 0;
  std::vector<double> cells_;
};

struct ContributionRun {
  LossCurve curve;
  ContributionMatrix matrix;
};

ContributionRun interval_contributions(const ParamClass& cls, Predictor predictor, std::uint64_t horizon,
                                       const Partition& partition, const EngineOptions& options = {});

/// n,window_loss,tail_bound,cumulative_lower,cumulative_upper,predictor,scenario
void write_curve_csv(std::ostream& out, const LossCurve& curve, std::string_view scenario);

/// prediction_bucket,alpha_bucket,prediction_label,alpha_label,value
void write_contributions_csv(std::ostream& out, const Partition& partition, const ContributionMatrix& matrix);

}  // namespace mdl
