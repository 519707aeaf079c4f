#pragma once
// Named constructors for the parameter classes used in experiments.

#include "mdl/coding.hpp"
#include "mdl/intervals.hpp"
#include "mdl/model.hpp"

#include <optional>
#include <span>
#include <string>

namespace mdl {

class Config;

/// theta0 = 1/2 plus 2^N - 1 parameters 1/2 + 2^-k-1, all with Kw = N.
/// `kw0` optionally overrides Kw(theta0).
ParamClass prop4_class(int N, std::optional<double> kw0 = std::nullopt);

/// Every finite binary fraction of length <= max_len plus {0,1}.
ParamClass qbstar_class(int max_len, const Dyadic& theta0, const CodingRule& coding = ExampleCoding{});

struct DistortedClass {
  ParamClass cls;
  Corollary9Params hint;
};

/// Images phi(t) of the max_len binary fractions, computed exactly, with
/// Kw(phi(t)) = kw_example(t) and theta0 = phi(t0).
DistortedClass distorted_class(const Polynomial& phi, int max_len, const Dyadic& t0, double eps);

struct FiniteClass {
  ParamClass cls;
  double bound_quantity = 0.0;  ///< N + Kw(theta0)
};

FiniteClass finite_class(std::span<const Param> params, std::size_t true_index);

/// A resolved class plus the bookkeeping needed for bound comparisons.
struct Scenario {
  std::string name;   ///< prop4, qbstar, distorted, finite, single, explicit
  std::string label;  ///< name plus parameters, e.g. "prop4:N=3"
  ParamClass cls;
  int prop4_N = 0;
  int max_len = 0;
  bool example_coding = false;
  std::optional<Corollary9Params> hint{};
  std::optional<double> finite_bound{};
};

/// Builds the scenario named by the `scenario` key and its parameters.
Scenario resolve_scenario(const Config& config);

}  // namespace mdl
