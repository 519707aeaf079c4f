#pragma once
// Loss bounds checked against computed curves.

#include "mdl/loss_engine.hpp"

#include <cstdint>

namespace mdl {

/// (2^N - 5) / 84: lower bound on the cumulative MDL loss for prop4_class(N).
double prop4_lower_bound(int N);

/// ln2 Kw/(2n) + sqrt(2 ln2 Kw ln n)/n + 6 ln n/n on the expected
/// instantaneous MDL loss, for theta0 in (1/4, 3/4).
double instantaneous_bound(double kw0, std::uint64_t n);

/// Kw(theta0) ln 2: cap on every cumulative partial sum of the mixture.
double mixture_bound(double kw0);

struct BoundCheck {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::uint64_t first_violation = 0;  ///< n, or 0 when none
  double worst_ratio = 0.0;           ///< max value / bound
  bool passed() const { return violations == 0; }
};

/// Instantaneous bound at every n in [n_min, n_max] whose window was full.
BoundCheck check_instantaneous(const LossCurve& curve, double kw0, std::uint64_t n_min = 3,
                               std::uint64_t n_max = UINT64_MAX);

/// cumulative_lower(n) <= bound for every n.
BoundCheck check_partial_sums(const LossCurve& curve, double bound);

}  // namespace mdl
