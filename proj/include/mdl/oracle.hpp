#pragma once
// Brute-force exact-rational expected loss for small n.

#include "mdl/model.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <cstddef>

namespace mdl {

inline constexpr std::uint64_t kOracleMaxN = 32;

/// The exact value of a dyadic parameter; throws for real-valued ones.
mpq_class exact_value(const Param& p);

/// Maximizes 2^-Kw theta^k (1-theta)^(n-k) by exact comparison when every Kw
/// is an integer; otherwise by long double log scores, treating scores
/// within 1e-15 relative as ties. Ties: lowest Kw, then smallest value.
std::size_t oracle_select(const ParamClass& cls, SufficientStat stat, bool use_kw);

/// Exact posterior mean; needs integer Kw.
mpq_class oracle_bayes_predict(const ParamClass& cls, SufficientStat stat);

/// sum_k C(n,k) theta0^k (1-theta0)^(n-k) (prediction - theta0)^2, exactly.
/// Requires n <= kOracleMaxN and an all-dyadic class.
mpq_class oracle_expected_loss(const ParamClass& cls, Predictor predictor, std::uint64_t n);

struct OracleComparison {
  std::size_t compared = 0;
  double worst_relative = 0.0;  ///< |fast - exact| / exact, 0 when both vanish
  std::uint64_t worst_n = 0;
};

/// Full-window engine values against the oracle for n = 1..n_max.
OracleComparison compare_with_oracle(const ParamClass& cls, Predictor predictor, std::uint64_t n_max, int threads = 0);

}  // namespace mdl
