#include "mdl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdl {

double prop4_lower_bound(int N) {
  if (N < 1) throw std::invalid_argument("prop4_lower_bound: N must be >= 1");
  return (std::ldexp(1.0, N) - 5.0) / 84.0;
}

double instantaneous_bound(double kw0, std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("instantaneous_bound: n must be >= 2");
  const double ln2 = std::numbers::ln2;
  const double dn = static_cast<double>(n);
  const double ln_n = std::log(dn);
  return ln2 * kw0 / (2.0 * dn) + std::sqrt(2.0 * ln2 * kw0 * ln_n) / dn + 6.0 * ln_n / dn;
}

double mixture_bound(double kw0) { return kw0 * std::numbers::ln2; }

namespace {

void record(BoundCheck& c, std::uint64_t n, double value, double bound) {
  ++c.checked;
  c.worst_ratio = std::max(c.worst_ratio, value / bound);
  if (value > bound) {
    if (c.violations == 0) c.first_violation = n;
    ++c.violations;
  }
}

}  // namespace

BoundCheck check_instantaneous(const LossCurve& curve, double kw0, std::uint64_t n_min, std::uint64_t n_max) {
  BoundCheck c;
  for (const auto& p : curve.points) {
    if (p.n < n_min || p.n > n_max || p.tail_bound != 0.0) continue;
    record(c, p.n, p.window_loss, instantaneous_bound(kw0, p.n));
  }
  return c;
}

BoundCheck check_partial_sums(const LossCurve& curve, double bound) {
  BoundCheck c;
  for (std::size_t i = 0; i < curve.points.size(); ++i) record(c, curve.points[i].n, curve.cumulative_lower[i], bound);
  return c;
}

}  // namespace mdl
