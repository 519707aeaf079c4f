#include "mdl/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mdl {

char to_char(StepType t) {
  switch (t) {
    case StepType::l:
      return 'l';
    case StepType::c:
      return 'c';
    case StepType::r:
      return 'r';
  }
  return '?';
}

bool IntervalStep::in_I(const Param& p) const {
  return std::any_of(I.begin(), I.end(), [&](const HalfOpen& h) { return h.contains(p); });
}

Dyadic IntervalStep::measure_I() const {
  Dyadic m;
  for (const auto& h : I) m = m + h.measure();
  return m;
}

std::string IntervalStep::I_str() const {
  std::string s;
  for (const auto& h : I) {
    if (!s.empty()) s += " U ";
    s += h.str();
  }
  return s;
}

std::vector<IntervalStep> build_construction(const Dyadic& theta0, int k_max) {
  if (theta0.is_zero() || theta0.is_one()) throw std::invalid_argument("interval construction needs theta0 strictly inside (0,1)");
  if (k_max < 1) throw std::invalid_argument("interval construction needs k_max >= 1");
  const Dyadic quarter = Dyadic::pow2(2);
  const Dyadic half = Dyadic::pow2(1);
  const Dyadic three_eighths = Dyadic::from_fraction(3, 3);
  const Dyadic five_eighths = Dyadic::from_fraction(5, 3);
  const Dyadic three_quarters = Dyadic::from_fraction(3, 2);

  std::vector<IntervalStep> steps;
  steps.reserve(static_cast<std::size_t>(k_max));
  HalfOpen J{Dyadic::zero(), Dyadic::one()};
  for (int k = 1; k <= k_max; ++k) {
    const Dyadic& l = J.lo;
    const Dyadic& r = J.hi;
    const Dyadic d = r - l;
    IntervalStep step;
    step.k = k;
    step.d = d;
    if (theta0 < l + d * three_eighths) {
      step.type = StepType::l;
      step.J = {l, l + d * half};
      step.I = {{l + d * half, r}};
    } else if (theta0 < l + d * five_eighths) {
      step.type = StepType::c;
      step.J = {l + d * quarter, l + d * three_quarters};
      step.I = {{l, l + d * quarter}, {l + d * three_quarters, r}};
    } else {
      step.type = StepType::r;
      step.J = {l + d * half, r};
      step.I = {{l, l + d * half}};
    }
    J = step.J;
    steps.push_back(std::move(step));
  }
  return steps;
}

std::vector<std::string> construction_violations(const Dyadic& theta0, const std::vector<IntervalStep>& steps) {
  std::vector<std::string> out;
  HalfOpen prev{Dyadic::zero(), Dyadic::one()};
  auto fail = [&](int k, const std::string& what) { out.push_back("theta0=" + theta0.str() + " k=" + std::to_string(k) + ": " + what); };
  auto inside = [](const HalfOpen& piece, const HalfOpen& outer) { return outer.lo <= piece.lo && piece.hi <= outer.hi; };
  for (const auto& s : steps) {
    const Dyadic width = Dyadic::pow2(static_cast<std::uint32_t>(s.k));
    if (s.measure_I() != width) fail(s.k, "measure(I) = " + s.measure_I().str());
    if (s.J.measure() != width) fail(s.k, "measure(J) = " + s.J.measure().str());
    if (!s.J.contains(theta0)) fail(s.k, "theta0 outside J = " + s.J.str());
    if (!inside(s.J, prev)) fail(s.k, "J not inside J_{k-1}");
    if (s.d != prev.measure()) fail(s.k, "d = " + s.d.str());
    Dyadic covered = s.J.measure();
    const Dyadic reach = Dyadic::pow2(static_cast<std::uint32_t>(s.k - 1));
    for (const auto& piece : s.I) {
      if (!inside(piece, prev)) fail(s.k, "I piece " + piece.str() + " not inside J_{k-1}");
      if (!(piece.hi <= s.J.lo || s.J.hi <= piece.lo)) fail(s.k, "I piece " + piece.str() + " meets J");
      if (abs_diff(piece.lo, theta0) > reach || abs_diff(piece.hi, theta0) > reach) fail(s.k, "I piece " + piece.str() + " too far");
      covered = covered + piece.measure();
    }
    if (covered != prev.measure()) fail(s.k, "I and J do not cover J_{k-1}");
    prev = s.J;
  }
  return out;
}

void write_construction_csv(std::ostream& out, const std::vector<IntervalStep>& steps) {
  out << "k,type,J,I\n";
  for (const auto& s : steps) out << s.k << ',' << to_char(s.type) << ',' << s.J.str() << ',' << s.I_str() << '\n';
}

// ---------------------------------------------------------------------------
// Partitions

Partition::Partition(std::vector<Segment> segments, std::vector<long> keys, std::vector<std::string> labels)
    : segments_(std::move(segments)), keys_(std::move(keys)), labels_(std::move(labels)) {
  if (segments_.empty()) throw std::invalid_argument("partition has no segments");
  std::sort(segments_.begin(), segments_.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  if (!segments_.front().lo.is_zero() || !segments_.back().hi.is_one())
    throw std::invalid_argument("partition must cover [0,1]");
  for (std::size_t i = 1; i < segments_.size(); ++i)
    if (segments_[i - 1].hi != segments_[i].lo) throw std::invalid_argument("partition segments must be contiguous");
  for (const auto& s : segments_)
    if (s.bucket >= keys_.size()) throw std::invalid_argument("partition bucket out of range");
  if (labels_.size() != keys_.size()) throw std::invalid_argument("partition labels/keys mismatch");
}

std::size_t Partition::bucket_of(const Dyadic& x) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x, [](const Dyadic& v, const Segment& s) { return v < s.hi; });
  if (it == segments_.end()) return segments_.back().bucket;
  return it->bucket;
}

std::size_t Partition::bucket_of(double x) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const Segment& s) { return v < s.hi.to_double(); });
  if (it == segments_.end()) return segments_.back().bucket;
  return it->bucket;
}

Partition construction_partition(const std::vector<IntervalStep>& steps) {
  if (steps.empty()) throw std::invalid_argument("construction_partition: no steps");
  std::vector<Partition::Segment> segments;
  std::vector<long> keys;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (const auto& h : steps[i].I) segments.push_back({h.lo, h.hi, i});
    keys.push_back(steps[i].k);
    labels.push_back("I_" + std::to_string(steps[i].k));
  }
  segments.push_back({steps.back().J.lo, steps.back().J.hi, steps.size()});
  keys.push_back(steps.back().k + 1);
  labels.push_back("J_" + std::to_string(steps.back().k));
  return Partition(std::move(segments), std::move(keys), std::move(labels));
}

Partition prop4_partition(int N) {
  if (N < 1 || N > 8) throw std::invalid_argument("prop4_partition: N must be in 1..8");
  const long M = (1L << N) - 1;
  auto theta = [](long k) { return Dyadic::pow2(1) + Dyadic::pow2(static_cast<std::uint32_t>(k + 1)); };
  std::vector<Partition::Segment> segments;
  std::vector<long> keys;
  std::vector<std::string> labels;
  for (long k = 0; k <= M; ++k) {
    keys.push_back(k);
    labels.push_back("I_" + std::to_string(k));
  }
  segments.push_back({Dyadic::zero(), theta(M), 0});
  for (long k = 2; k <= M; ++k) segments.push_back({theta(k), theta(k - 1), static_cast<std::size_t>(k)});
  segments.push_back({theta(1), Dyadic::one(), 1});
  return Partition(std::move(segments), std::move(keys), std::move(labels));
}

// ---------------------------------------------------------------------------
// Complexity gaps

DeltaProfile delta_profile(const ParamClass& cls, int k_max) {
  const Param& truth = cls.truth();
  if (!truth.exact) throw std::invalid_argument("delta_profile: true parameter must be an exact binary fraction");
  DeltaProfile profile;
  profile.steps = build_construction(*truth.exact, k_max);
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& step : profile.steps) {
    DeltaEntry e;
    e.k = step.k;
    e.kw_I = inf;
    e.kw_J = inf;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const Param& p = cls[i];
      if (step.in_I(p)) {
        if (p.kw < e.kw_I) {
          e.kw_I = p.kw;
          e.theta_I = i;
        }
      } else if (step.J.contains(p)) {
        if (p.kw < e.kw_J) {
          e.kw_J = p.kw;
          e.theta_J = i;
        }
      }
    }
    e.delta = e.theta_I ? std::max(e.kw_I - e.kw_J, 0.0) : inf;
    profile.entries.push_back(e);
  }
  return profile;
}

void write_delta_csv(std::ostream& out, const ParamClass& cls, const DeltaProfile& profile) {
  out << "k,theta_I,theta_J,kw_I,kw_J,delta\n";
  for (const auto& e : profile.entries) {
    out << e.k << ',' << (e.theta_I ? cls[*e.theta_I].label() : "none") << ','
        << (e.theta_J ? cls[*e.theta_J].label() : "none") << ',' << e.kw_I << ',' << e.kw_J << ',' << e.delta << '\n';
  }
}

Theorem6Rhs theorem6_rhs(const DeltaProfile& profile, double theta0_kw) {
  Theorem6Rhs out;
  out.k_max = static_cast<int>(profile.entries.size());
  double sum = 0.0;
  for (const auto& e : profile.entries) {
    double term = 0.0;
    if (std::isinf(e.delta)) {
      ++out.empty_terms;
    } else if (e.delta == 0.0) {
      ++out.zero_delta_terms;
    } else {
      term = std::exp2(-e.delta) * std::sqrt(e.delta);
    }
    sum += term;
    out.last_increment = term;
  }
  out.value = theta0_kw + sum;
  return out;
}

// ---------------------------------------------------------------------------
// Condition (14)

namespace {

// |p - theta0| <= 2^-k, and the distance itself (for witness ordering).
bool within_pow2(const Param& p, const Param& theta0, int k, double& distance) {
  if (p.exact && theta0.exact) {
    const Dyadic diff = abs_diff(*p.exact, *theta0.exact);
    distance = diff.to_double();
    return diff <= Dyadic::pow2(static_cast<std::uint32_t>(k));
  }
  distance = std::fabs(p.value - theta0.value);
  return distance <= std::ldexp(1.0, -k);
}

}  // namespace

Condition14Result condition14_check(const ParamClass& cls, double a, double b, int k_max) {
  if (!(a >= 1.0) || !(b >= 0.0)) throw std::invalid_argument("condition14_check needs a >= 1 and b >= 0");
  Condition14Result out;
  out.k_max = k_max;
  const Param& truth = cls.truth();
  out.first_k = static_cast<int>(std::floor(a * truth.kw + b)) + 1;
  for (int k = std::max(out.first_k, 0); k <= k_max; ++k) {
    const double required = (k - b) / a;
    bool any = false;
    std::optional<Condition14Witness> worst;
    double worst_distance = -1.0;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (i == cls.true_index()) continue;
      double distance = 0.0;
      if (!within_pow2(cls[i], truth, k, distance)) continue;
      any = true;
      if (cls[i].kw >= required) continue;
      const bool better = !worst || cls[i].kw < worst->kw || (cls[i].kw == worst->kw && distance > worst_distance);
      if (better) {
        worst = Condition14Witness{k, i, cls[i].kw, required};
        worst_distance = distance;
      }
    }
    if (!any) {
      ++out.vacuous;
      continue;
    }
    ++out.checked;
    if (worst) {
      out.passed = false;
      out.witness = worst;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distortions

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs.push_back(coeffs[i] * static_cast<double>(i));
  if (d.coeffs.empty()) d.coeffs.push_back(0.0);
  return d;
}

bool Polynomial::monotone_on_grid(int points) const {
  int sign = 0;
  double prev = (*this)(0.0);
  for (int i = 1; i < points; ++i) {
    const double v = (*this)(static_cast<double>(i) / (points - 1));
    const int s = v > prev ? 1 : (v < prev ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) return false;
    sign = s;
    prev = v;
  }
  return true;
}

double Polynomial::min_abs(double lo, double hi) const {
  // |p| on [lo, hi] is minimized at an endpoint, at a critical point, or is 0
  // if p changes sign. Critical points come from sign changes of p' on a fine
  // grid, refined by bisection.
  const Polynomial dp = derivative();
  std::vector<double> points{lo, hi};
  constexpr int kGrid = 4096;
  double prev_t = lo;
  double prev_v = dp(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double t = lo + (hi - lo) * i / kGrid;
    const double v = dp(t);
    if (v == 0.0) {
      points.push_back(t);
    } else if ((prev_v < 0.0) != (v < 0.0) && prev_v != 0.0) {
      double a = prev_t, b = t, fa = prev_v;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = dp(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      points.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_v = v;
  }
  std::sort(points.begin(), points.end());
  double best = std::numeric_limits<double>::infinity();
  double prev = (*this)(points.front());
  for (double t : points) {
    const double v = (*this)(t);
    if ((v < 0.0) != (prev < 0.0) && v != 0.0 && prev != 0.0) return 0.0;
    best = std::min(best, std::fabs(v));
    prev = v;
  }
  return best;
}

Polynomial parse_polynomial(const std::string& text) {
  Polynomial p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad polynomial coefficient '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw std::invalid_argument("bad polynomial coefficient '" + item + "'");
    p.coeffs.push_back(v);
  }
  if (p.coeffs.empty()) throw std::invalid_argument("polynomial has no coefficients");
  return p;
}

Corollary9Params corollary9_bound_params(const Polynomial& phi, const Dyadic& t0, double eps) {
  if (t0.is_zero() || t0.is_one()) throw std::invalid_argument("corollary9_bound_params: t0 must lie in (0,1)");
  if (!(eps > 0.0)) throw std::invalid_argument("corollary9_bound_params: eps must be > 0");
  constexpr double kVanish = 1e-12;
  const double t = t0.to_double();
  const double lo = std::max(0.0, t - eps);
  const double hi = std::min(1.0, t + eps);

  Corollary9Params out;
  out.injective_on_grid = phi.monotone_on_grid();
  Polynomial deriv = phi;
  double factorial = 1.0;
  for (int n = 1; n <= phi.degree(); ++n) {
    deriv = deriv.derivative();
    factorial *= n;
    const double at_t0 = deriv(t);
    const double c = deriv.min_abs(lo, hi);
    if (c > kVanish) {
      out.order = n;
      out.c = c;
      out.a = n;
      out.b = std::log2(factorial) - std::log2(c) + 1.0;
      return out;
    }
    if (std::fabs(at_t0) > kVanish) break;  // lower derivative must vanish at t0
  }
  throw std::invalid_argument("corollary9_bound_params: no derivative order bounded away from 0 near t0");
}

}  // namespace mdl
