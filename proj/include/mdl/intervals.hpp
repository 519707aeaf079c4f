#pragma once
// Nested dyadic intervals contracting to the true parameter, complexity gaps
// per interval, and the fast-convergence condition checks.

#include "mdl/dyadic.hpp"
#include "mdl/model.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mdl {

/// [lo, hi) with exact endpoints.
struct HalfOpen {
  Dyadic lo;
  Dyadic hi;

  bool contains(const Dyadic& x) const { return lo <= x && x < hi; }
  bool contains(double x) const { return lo.to_double() <= x && x < hi.to_double(); }
  bool contains(const Param& p) const { return p.exact ? contains(*p.exact) : contains(p.value); }
  Dyadic measure() const { return hi - lo; }
  std::string str() const { return "[" + lo.str() + "," + hi.str() + ")"; }
};

enum class StepType { l, c, r };
char to_char(StepType t);

struct IntervalStep {
  int k = 0;
  HalfOpen J;
  std::vector<HalfOpen> I;  ///< one or two pieces
  Dyadic d;                 ///< width of J_{k-1}, i.e. 2^-(k-1)
  StepType type = StepType::l;

  bool in_I(const Param& p) const;
  Dyadic measure_I() const;
  std::string I_str() const;
};

/// Steps 1..k_max starting from J_0 = [0,1). Rejects theta0 in {0, 1}.
std::vector<IntervalStep> build_construction(const Dyadic& theta0, int k_max);

/// Checks measure(I_k) = measure(J_k) = 2^-k, theta0 in J_k, J_k subset of
/// J_{k-1}, I_k and J_k disjoint with union J_{k-1}, and every point of I_k
/// within 2^-(k-1) of theta0. Returns one line per failure.
std::vector<std::string> construction_violations(const Dyadic& theta0, const std::vector<IntervalStep>& steps);

void write_construction_csv(std::ostream& out, const std::vector<IntervalStep>& steps);

/// Piecewise assignment of [0,1] to buckets; the point 1 joins the segment
/// that ends at 1.
class Partition {
 public:
  struct Segment {
    Dyadic lo;
    Dyadic hi;
    std::size_t bucket;
  };

  Partition(std::vector<Segment> segments, std::vector<long> keys, std::vector<std::string> labels);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::size_t bucket_count() const noexcept { return keys_.size(); }
  long key(std::size_t bucket) const { return keys_.at(bucket); }
  const std::string& label(std::size_t bucket) const { return labels_.at(bucket); }

  std::size_t bucket_of(const Dyadic& x) const;
  std::size_t bucket_of(double x) const;
  std::size_t bucket_of(const Param& p) const { return p.exact ? bucket_of(*p.exact) : bucket_of(p.value); }

 private:
  std::vector<Segment> segments_;
  std::vector<long> keys_;
  std::vector<std::string> labels_;
};

/// Buckets I_1..I_kmax (keys 1..k_max) and the innermost J_kmax (key k_max+1).
Partition construction_partition(const std::vector<IntervalStep>& steps);

/// The 2^N intervals around 1/2 + 2^-k-1 used for the exponential lower
/// bound: I_0 = [0, t_M), I_k = [t_k, t_{k-1}) for 2 <= k <= M, I_1 = [t_1, 1],
/// with M = 2^N - 1. Keys are k.
Partition prop4_partition(int N);

/// Per step: cheapest parameter in I_k and in J_k and the gap Delta(k).
struct DeltaEntry {
  int k = 0;
  std::optional<std::size_t> theta_I;
  std::optional<std::size_t> theta_J;
  double kw_I = 0.0;  ///< +inf when I_k holds no parameter
  double kw_J = 0.0;
  double delta = 0.0;  ///< +inf when I_k holds no parameter
};

struct DeltaProfile {
  std::vector<IntervalStep> steps;
  std::vector<DeltaEntry> entries;
};

/// Requires the class's true parameter to be an exact dyadic in (0,1).
DeltaProfile delta_profile(const ParamClass& cls, int k_max);

void write_delta_csv(std::ostream& out, const ParamClass& cls, const DeltaProfile& profile);

struct Theorem6Rhs {
  double value = 0.0;           ///< Kw(theta0) + sum 2^-Delta sqrt(Delta)
  double last_increment = 0.0;  ///< term at k_max
  int zero_delta_terms = 0;     ///< steps with Delta(k) = 0 (contribute 0)
  int empty_terms = 0;          ///< steps with Delta(k) = inf (contribute 0)
  int k_max = 0;
};

Theorem6Rhs theorem6_rhs(const DeltaProfile& profile, double theta0_kw);

/// Uniform-spacing condition: for every integer k with a Kw0 + b < k <= k_max,
/// each theta != theta0 within 2^-k of theta0 must have Kw >= (k - b)/a.
struct Condition14Witness {
  int k = 0;
  std::size_t index = 0;
  double kw = 0.0;
  double required = 0.0;
};

struct Condition14Result {
  bool passed = true;
  int first_k = 0;  ///< smallest k the condition applies to
  int k_max = 0;
  int checked = 0;  ///< ks with at least one neighbour
  int vacuous = 0;  ///< ks with no parameter other than theta0 in range
  std::optional<Condition14Witness> witness;
};

/// On failure the witness is the first violating k; among its offenders the
/// lowest Kw, then the one farthest from theta0.
Condition14Result condition14_check(const ParamClass& cls, double a, double b, int k_max);

/// Polynomial c0 + c1 t + c2 t^2 + ...
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double t) const;
  Polynomial derivative() const;
  int degree() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1; }
  /// Strictly monotone on a uniform grid of [0,1].
  bool monotone_on_grid(int points = 4097) const;
  /// min |p| on [lo, hi].
  double min_abs(double lo, double hi) const;
};

Polynomial parse_polynomial(const std::string& text);

struct Corollary9Params {
  int order = 0;  ///< n: first derivative order not vanishing at t0
  double c = 0.0;
  double a = 0.0;  ///< = n
  double b = 0.0;  ///< lb(n!) - lb c + 1, possibly negative
  bool injective_on_grid = false;

  /// b raised to 0 where needed; the condition is monotone in b.
  double b_nonneg() const { return b < 0.0 ? 0.0 : b; }
};

Corollary9Params corollary9_bound_params(const Polynomial& phi, const Dyadic& t0, double eps);

}  // namespace mdl
