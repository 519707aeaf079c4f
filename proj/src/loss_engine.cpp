#include "mdl/loss_engine.hpp"

#include "mdl/info.hpp"
#include "mdl/summation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>

namespace mdl {

namespace {

constexpr std::uint64_t kChunk = 4096;
// Score gap, relative to the score magnitude, under which the envelope
// answer is replaced by the exhaustive selection.
constexpr double kEnvelopeTieBand = 1e-9;
// Posterior terms more than e^-50 below the largest offset term are dropped.
constexpr double kBayesCutoff = 50.0;

struct Context {
  const ParamClass* cls = nullptr;
  Predictor predictor = Predictor::mdl;
  WindowPolicy policy = WindowPolicy::automatic;
  std::uint64_t full_limit = 10000;
  double theta0 = 0.0;

  std::vector<double> value, kw_ln2, slope, base, log_t, log_1mt, sqdist, log_dist;
  std::vector<std::size_t> interior;
  double min_kw_ln2 = 0.0;

  const Partition* partition = nullptr;
  std::vector<std::size_t> param_bucket;
};

Context make_context(const ParamClass& cls, Predictor predictor, WindowPolicy policy, std::uint64_t full_limit) {
  Context ctx;
  ctx.cls = &cls;
  ctx.predictor = predictor;
  ctx.policy = policy;
  ctx.full_limit = full_limit;
  ctx.theta0 = cls.theta0();
  const double ln2 = std::numbers::ln2;
  const double inf = std::numeric_limits<double>::infinity();
  ctx.min_kw_ln2 = cls.min_kw() * ln2;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const double t = cls[i].value;
    ctx.value.push_back(t);
    ctx.kw_ln2.push_back(cls[i].kw * ln2);
    ctx.log_t.push_back(t > 0.0 ? std::log(t) : -inf);
    ctx.log_1mt.push_back(t < 1.0 ? std::log1p(-t) : -inf);
    ctx.slope.push_back(t > 0.0 && t < 1.0 ? ctx.log_1mt.back() - ctx.log_t.back() : 0.0);
    ctx.base.push_back(t < 1.0 ? -ctx.log_1mt.back() : 0.0);
    ctx.sqdist.push_back((t - ctx.theta0) * (t - ctx.theta0));
    ctx.log_dist.push_back(std::log(std::fabs(t - ctx.theta0)));
    if (t > 0.0 && t < 1.0) ctx.interior.push_back(i);
  }
  return ctx;
}

void attach_partition(Context& ctx, const Partition& partition) {
  ctx.partition = &partition;
  ctx.param_bucket.clear();
  for (const auto& p : ctx.cls->params()) ctx.param_bucket.push_back(partition.bucket_of(p));
}

struct Workspace {
  std::vector<double> pmf;
  std::vector<double> intercept;
  std::vector<double> log_weight;  ///< log prior times likelihood, by index
  std::vector<std::size_t> hull;
  std::vector<char> degenerate;
  std::vector<std::uint64_t> segment_start;
};

void fill_pmf(std::uint64_t n, double theta0, const Window& w, std::vector<double>& pmf) {
  pmf.assign(w.hi - w.lo + 1, 0.0);
  if (theta0 == 0.0) {
    if (w.lo == 0) pmf[0] = 1.0;
    return;
  }
  if (theta0 == 1.0) {
    if (w.hi == n) pmf[n - w.lo] = 1.0;
    return;
  }
  auto mode = static_cast<std::uint64_t>(std::floor(static_cast<double>(n + 1) * theta0));
  mode = std::clamp(std::min(mode, n), w.lo, w.hi);
  const double r = theta0 / (1.0 - theta0);
  pmf[mode - w.lo] = binom_pmf(n, mode, theta0);
  for (std::uint64_t k = mode; k < w.hi; ++k)
    pmf[k + 1 - w.lo] = pmf[k - w.lo] * (static_cast<double>(n - k) / static_cast<double>(k + 1)) * r;
  for (std::uint64_t k = mode; k > w.lo; --k)
    pmf[k - 1 - w.lo] = pmf[k - w.lo] * (static_cast<double>(k) / static_cast<double>(n - k + 1)) / r;
}

/// Lower envelope of the lines a_i + slope_i * alpha over interior
/// parameters, in order of decreasing slope.
void build_hull(const Context& ctx, std::uint64_t n, bool use_kw, Workspace& ws) {
  ws.intercept.resize(ctx.value.size());
  ws.hull.clear();
  ws.degenerate.clear();
  const double dn = static_cast<double>(n);
  const auto& b = ctx.slope;
  auto& a = ws.intercept;
  for (std::size_t i : ctx.interior) {
    a[i] = ctx.base[i] + (use_kw ? ctx.kw_ln2[i] / dn : 0.0);
    char degenerate = 0;
    if (!ws.hull.empty() && b[i] == b[ws.hull.back()]) {
      if (a[i] >= a[ws.hull.back()]) {
        ws.degenerate.back() = 1;
        continue;
      }
      ws.hull.pop_back();
      ws.degenerate.pop_back();
      degenerate = 1;
    }
    while (ws.hull.size() >= 2) {
      const std::size_t l1 = ws.hull[ws.hull.size() - 2];
      const std::size_t l2 = ws.hull.back();
      if ((a[i] - a[l1]) * (b[l1] - b[l2]) <= (a[l2] - a[l1]) * (b[l1] - b[i])) {
        ws.hull.pop_back();
        ws.degenerate.pop_back();
      } else {
        break;
      }
    }
    ws.hull.push_back(i);
    ws.degenerate.push_back(degenerate);
  }
}

/// Optional per-cell accumulation for interval contributions.
struct Sink {
  std::vector<CompensatedSum>* cells = nullptr;
  std::size_t buckets = 0;
};

class AlphaBuckets {
 public:
  AlphaBuckets(const Context& ctx, std::uint64_t n, Workspace& ws) : ctx_(ctx), ws_(ws) {
    if (!ctx.partition) return;
    const auto& segs = ctx.partition->segments();
    ws.segment_start.resize(segs.size());
    for (std::size_t s = 0; s < segs.size(); ++s) ws.segment_start[s] = ceil_times(segs[s].lo, n);
  }

  std::size_t operator()(std::uint64_t k) {
    const auto& start = ws_.segment_start;
    while (seg_ + 1 < start.size() && start[seg_ + 1] <= k) ++seg_;
    return ctx_.partition->segments()[seg_].bucket;
  }

 private:
  const Context& ctx_;
  Workspace& ws_;
  std::size_t seg_ = 0;
};

double evaluate_selection(const Context& ctx, std::uint64_t n, const Window& w, Workspace& ws, Sink sink) {
  const bool use_kw = ctx.predictor == Predictor::mdl;
  build_hull(ctx, n, use_kw, ws);
  AlphaBuckets alpha_bucket(ctx, n, ws);
  const double dn = static_cast<double>(n);
  const double ln2 = std::numbers::ln2;
  const auto& hull = ws.hull;
  const auto& a = ws.intercept;
  const auto& b = ctx.slope;
  auto line = [&](std::size_t h, double alpha) { return a[hull[h]] + b[hull[h]] * alpha; };

  CompensatedSum sum;
  std::size_t p = 0;
  for (std::uint64_t k = w.lo; k <= w.hi; ++k) {
    const double prob = ws.pmf[k - w.lo];
    if (prob == 0.0) continue;
    std::size_t sel = 0;
    bool exhaustive = k == 0 || k == n || hull.empty();
    if (!exhaustive) {
      const double alpha = static_cast<double>(k) / dn;
      while (p + 1 < hull.size() && line(p + 1, alpha) < line(p, alpha)) ++p;
      const double here = line(p, alpha);
      double gap = std::numeric_limits<double>::infinity();
      if (p > 0) gap = std::min(gap, line(p - 1, alpha) - here);
      if (p + 1 < hull.size()) gap = std::min(gap, line(p + 1, alpha) - here);
      const double band = kEnvelopeTieBand * std::max(1.0, dn * (std::fabs(here) + ln2));
      exhaustive = ws.degenerate[p] || dn * gap <= band;
      sel = hull[p];
    }
    if (exhaustive) sel = detail::penalized_select(*ctx.cls, SufficientStat(n, k), use_kw);
    const double contribution = prob * ctx.sqdist[sel];
    sum.add(contribution);
    if (sink.cells) (*sink.cells)[ctx.param_bucket[sel] * sink.buckets + alpha_bucket(k)].add(contribution);
  }
  return sum.value();
}

double evaluate_bayes(const Context& ctx, std::uint64_t n, const Window& w, Workspace& ws, Sink sink) {
  AlphaBuckets alpha_bucket(ctx, n, ws);
  const std::size_t size = ctx.value.size();
  const double dn = static_cast<double>(n);
  CompensatedSum sum;
  std::size_t ptr = 0;  // first index with value >= alpha
  for (std::uint64_t k = w.lo; k <= w.hi; ++k) {
    const double prob = ws.pmf[k - w.lo];
    if (prob == 0.0) continue;
    const double alpha = static_cast<double>(k) / dn;
    while (ptr < size && ctx.value[ptr] < alpha) ++ptr;
    const double ones = static_cast<double>(k);
    const double zeros = static_cast<double>(n - k);
    auto loglik = [&](std::size_t i) {
      double l = 0.0;
      if (k > 0) l += ones * ctx.log_t[i];
      if (k < n) l += zeros * ctx.log_1mt[i];
      return l;
    };
    // Scan outward from alpha while a term can still matter next to the
    // largest offset term w_i |theta_i - theta0| seen so far.
    double best = -std::numeric_limits<double>::infinity();
    double best_offset = -std::numeric_limits<double>::infinity();
    auto& logw = ws.log_weight;
    logw.resize(size);
    auto visit = [&](std::size_t i, double u) {
      const double l = u - ctx.kw_ln2[i];
      logw[i] = l;
      best = std::max(best, l);
      if (ctx.value[i] != ctx.theta0) best_offset = std::max(best_offset, l + ctx.log_dist[i]);
    };
    std::size_t lo = ptr;
    std::size_t hi = ptr;  // scanned range [lo, hi)
    for (std::size_t i = ptr; i > 0; --i) {
      const double u = loglik(i - 1);
      if (u - ctx.min_kw_ln2 < best_offset - kBayesCutoff) break;
      visit(i - 1, u);
      lo = i - 1;
    }
    for (std::size_t i = ptr; i < size; ++i) {
      const double u = loglik(i);
      if (u - ctx.min_kw_ln2 < best_offset - kBayesCutoff) break;
      visit(i, u);
      hi = i + 1;
    }
    long double weight = 0.0L;
    long double offset = 0.0L;
    for (std::size_t i = lo; i < hi; ++i) {
      const double wi = std::exp(logw[i] - best);
      weight += wi;
      offset += static_cast<long double>(wi) * (ctx.value[i] - ctx.theta0);
    }
    const double off = static_cast<double>(offset / weight);
    const double contribution = prob * off * off;
    sum.add(contribution);
    if (sink.cells) {
      const std::size_t pb = ctx.partition->bucket_of(std::clamp(ctx.theta0 + off, 0.0, 1.0));
      (*sink.cells)[pb * sink.buckets + alpha_bucket(k)].add(contribution);
    }
  }
  return sum.value();
}

LossPoint evaluate_n(const Context& ctx, std::uint64_t n, Workspace& ws, Sink sink) {
  const Window w = select_window(n, ctx.theta0, ctx.policy, ctx.full_limit);
  fill_pmf(n, ctx.theta0, w, ws.pmf);
  LossPoint pt{n, 0.0, w.tail_bound};
  pt.window_loss = ctx.predictor == Predictor::bayes ? evaluate_bayes(ctx, n, w, ws, sink) : evaluate_selection(ctx, n, w, ws, sink);
  return pt;
}

void finish_curve(LossCurve& curve) {
  CompensatedSum lower;
  CompensatedSum upper;
  curve.cumulative_lower.resize(curve.points.size());
  curve.cumulative_upper.resize(curve.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    lower.add(curve.points[i].window_loss);
    upper.add(curve.points[i].window_loss);
    upper.add(curve.points[i].tail_bound);
    curve.cumulative_lower[i] = lower.value();
    curve.cumulative_upper[i] = upper.value();
  }
  curve.beyond_horizon = true;
}

void check_budget(const ParamClass& cls, Predictor predictor, std::uint64_t horizon, const EngineOptions& options) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const double cost = estimate_cost(cls, predictor, horizon, options);
  if (cost > options.budget) throw BudgetExceeded(cost, options.budget);
}

/// Shared driver: chunks of n evaluated in parallel, contributions merged
/// in ascending chunk order.
LossCurve run_parallel(const Context& ctx, std::uint64_t horizon, int threads, ContributionMatrix* matrix) {
  LossCurve curve;
  curve.predictor = ctx.predictor;
  curve.points.resize(horizon);
  const std::uint64_t chunks = (horizon + kChunk - 1) / kChunk;
  const std::size_t buckets = ctx.partition ? ctx.partition->bucket_count() : 0;
  std::vector<std::vector<CompensatedSum>> chunk_cells(matrix ? chunks : 0);
  std::exception_ptr failure;
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel num_threads(nthreads)
  {
    Workspace ws;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
      try {
        Sink sink;
        if (matrix) {
          chunk_cells[c].assign(buckets * buckets, CompensatedSum{});
          sink = Sink{&chunk_cells[c], buckets};
        }
        const std::uint64_t first = static_cast<std::uint64_t>(c) * kChunk + 1;
        const std::uint64_t last = std::min(horizon, first + kChunk - 1);
        for (std::uint64_t n = first; n <= last; ++n) curve.points[n - 1] = evaluate_n(ctx, n, ws, sink);
      } catch (...) {
#pragma omp critical(mdl_engine_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  if (matrix) {
    *matrix = ContributionMatrix(buckets);
    for (std::size_t r = 0; r < buckets; ++r)
      for (std::size_t col = 0; col < buckets; ++col) {
        CompensatedSum cell;
        for (const auto& cc : chunk_cells) cell.add(cc[r * buckets + col]);
        matrix->cell(r, col) = cell.value();
      }
  }
  finish_curve(curve);
  return curve;
}

}  // namespace

std::string_view to_string(WindowPolicy w) {
  switch (w) {
    case WindowPolicy::full:
      return "full";
    case WindowPolicy::hoeffding:
      return "hoeffding";
    case WindowPolicy::automatic:
      return "auto";
  }
  return "?";
}

WindowPolicy parse_window(std::string_view name) {
  if (name == "full") return WindowPolicy::full;
  if (name == "hoeffding") return WindowPolicy::hoeffding;
  if (name == "auto") return WindowPolicy::automatic;
  throw std::invalid_argument("unknown window policy '" + std::string(name) + "' (expected full, hoeffding or auto)");
}

Window hoeffding_window(std::uint64_t n, double theta0) {
  if (n == 0) return Window{0, 0, 0.0};
  const double dn = static_cast<double>(n);
  const double c2 = std::log(2.0 * dn * dn);
  const double half = std::sqrt(c2) * std::sqrt(dn);
  const double centre = dn * theta0;
  const double lo = std::floor(centre - half);
  const double hi = std::ceil(centre + half);
  Window w;
  w.lo = lo <= 0.0 ? 0 : static_cast<std::uint64_t>(lo);
  w.hi = hi >= dn ? n : static_cast<std::uint64_t>(hi);
  if (w.lo > 0 || w.hi < n) {
    const double m = std::max(theta0, 1.0 - theta0);
    w.tail_bound = 2.0 * std::exp(-2.0 * c2) * m * m;
  }
  return w;
}

Window select_window(std::uint64_t n, double theta0, WindowPolicy policy, std::uint64_t full_window_limit) {
  if (policy == WindowPolicy::full || (policy == WindowPolicy::automatic && n <= full_window_limit)) return Window{0, n, 0.0};
  return hoeffding_window(n, theta0);
}

BudgetExceeded::BudgetExceeded(double estimate, double budget)
    : std::runtime_error([&] {
        char buf[160];
        std::snprintf(buf, sizeof buf, "horizon exceeds the compute budget: estimated %.3g operations, budget %.3g", estimate,
                      budget);
        return std::string(buf);
      }()),
      estimate_(estimate) {}

double estimate_cost(const ParamClass& cls, Predictor predictor, std::uint64_t horizon, const EngineOptions& options) {
  const double H = static_cast<double>(horizon);
  const double size = static_cast<double>(cls.size());
  const double per_k = predictor == Predictor::bayes ? size : 1.0;
  const double per_n = predictor == Predictor::bayes ? 0.0 : 2.0 * size;
  // sum of window widths, bounded above
  auto full_sum = [](double upto) { return upto * (upto + 3.0) / 2.0; };
  auto hoeffding_sum = [](double from, double upto) {
    if (upto <= from) return 0.0;
    const double c = std::sqrt(std::log(2.0 * upto * upto));
    return 2.0 * c * (2.0 / 3.0) * (std::pow(upto, 1.5) - std::pow(from, 1.5)) + 3.0 * (upto - from);
  };
  double widths = 0.0;
  switch (options.window) {
    case WindowPolicy::full:
      widths = full_sum(H);
      break;
    case WindowPolicy::hoeffding:
      widths = std::min(full_sum(H), hoeffding_sum(0.0, H));
      break;
    case WindowPolicy::automatic: {
      const double limit = std::min(H, static_cast<double>(options.full_window_limit));
      widths = full_sum(limit) + hoeffding_sum(limit, H);
      break;
    }
  }
  return widths * per_k + H * per_n;
}

LossPoint instantaneous_loss(const ParamClass& cls, Predictor predictor, std::uint64_t n, WindowPolicy policy,
                             std::uint64_t full_window_limit) {
  if (n < 1) throw std::invalid_argument("instantaneous_loss: n must be >= 1");
  const Context ctx = make_context(cls, predictor, policy, full_window_limit);
  Workspace ws;
  return evaluate_n(ctx, n, ws, Sink{});
}

LossCurve cumulative_loss(const ParamClass& cls, Predictor predictor, std::uint64_t horizon, const EngineOptions& options) {
  check_budget(cls, predictor, horizon, options);
  const Context ctx = make_context(cls, predictor, options.window, options.full_window_limit);
  return run_parallel(ctx, horizon, options.threads, nullptr);
}

LossCurve cumulative_loss_reference(const ParamClass& cls, Predictor predictor, std::uint64_t horizon,
                                    const EngineOptions& options) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const double theta0 = cls.theta0();
  LossCurve curve;
  curve.predictor = predictor;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    const Window w = select_window(n, theta0, options.window, options.full_window_limit);
    CompensatedSum sum;
    for (std::uint64_t k = w.lo; k <= w.hi; ++k) {
      const double prob = binom_pmf(n, k, theta0);
      if (prob == 0.0) continue;
      const SufficientStat stat(n, k);
      double err = 0.0;
      if (predictor == Predictor::bayes) {
        err = bayes_predict_offset(cls, stat, theta0);
      } else {
        const std::size_t sel = predictor == Predictor::mdl ? mdl_select(cls, stat) : ml_select(cls, stat);
        err = cls[sel].value - theta0;
      }
      sum.add(prob * err * err);
    }
    curve.points.push_back(LossPoint{n, sum.value(), w.tail_bound});
  }
  finish_curve(curve);
  return curve;
}

double ContributionMatrix::by_prediction(std::size_t bucket) const {
  CompensatedSum s;
  for (std::size_t c = 0; c < buckets_; ++c) s.add(cell(bucket, c));
  return s.value();
}

double ContributionMatrix::by_alpha(std::size_t bucket) const {
  CompensatedSum s;
  for (std::size_t r = 0; r < buckets_; ++r) s.add(cell(r, bucket));
  return s.value();
}

double ContributionMatrix::total() const {
  CompensatedSum s;
  for (double v : cells_) s.add(v);
  return s.value();
}

ContributionRun interval_contributions(const ParamClass& cls, Predictor predictor, std::uint64_t horizon,
                                       const Partition& partition, const EngineOptions& options) {
  check_budget(cls, predictor, horizon, options);
  Context ctx = make_context(cls, predictor, options.window, options.full_window_limit);
  attach_partition(ctx, partition);
  ContributionRun run;
  run.curve = run_parallel(ctx, horizon, options.threads, &run.matrix);
  return run;
}

void write_curve_csv(std::ostream& out, const LossCurve& curve, std::string_view scenario) {
  out << "n,window_loss,tail_bound,cumulative_lower,cumulative_upper,predictor,scenario\n";
  const std::string tail = "," + std::string(to_string(curve.predictor)) + ",\"" + std::string(scenario) + "\"\n";
  char buf[160];
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g", static_cast<unsigned long long>(p.n), p.window_loss,
                  p.tail_bound, curve.cumulative_lower[i], curve.cumulative_upper[i]);
    out << buf << tail;
  }
}

void write_contributions_csv(std::ostream& out, const Partition& partition, const ContributionMatrix& matrix) {
  out << "prediction_bucket,alpha_bucket,prediction_interval,alpha_interval,value\n";
  char buf[64];
  for (std::size_t r = 0; r < matrix.buckets(); ++r)
    for (std::size_t c = 0; c < matrix.buckets(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", matrix.cell(r, c));
      out << partition.key(r) << ',' << partition.key(c) << ",\"" << partition.label(r) << "\",\"" << partition.label(c) << "\","
          << buf << '\n';
    }
}

}  // namespace mdl
