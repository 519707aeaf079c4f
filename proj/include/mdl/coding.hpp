#pragma once
// Complexity assignments Kw(theta) in bits.

#include "mdl/dyadic.hpp"

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mdl {

/// Prefix-code length on finite binary fractions: 2 for the values 0 and 1,
/// l + 2 floor(lb(l + 1)) otherwise, where l is the bit length.
double kw_example(const Dyadic& theta);

/// {0, 1} together with every binary fraction of length 1..max_len, ascending.
std::vector<Dyadic> enumerate_qbstar(int max_len);

inline constexpr int kMaxQbstarLength = 24;

/// Complexities of a finite parameter list; weights are 2^-Kw.
class ComplexityAssignment {
 public:
  explicit ComplexityAssignment(std::vector<double> kw, bool sub_kraft = false);

  std::span<const double> kw() const noexcept { return kw_; }
  std::size_t size() const noexcept { return kw_.size(); }
  bool declared_sub_kraft() const noexcept { return sub_kraft_; }
  double weight(std::size_t i) const;

 private:
  std::vector<double> kw_;
  bool sub_kraft_;
};

/// Sum of 2^-Kw accumulated with upward rounding, so the result is an upper
/// bound on the exact sum.
double kraft_sum(std::span<const double> kw);
inline double kraft_sum(const ComplexityAssignment& a) { return kraft_sum(a.kw()); }

/// Builtin coding rules: "example-coding" or "uniform:<N>".
struct ExampleCoding {};
struct UniformCoding {
  double kw;
};
using CodingRule = std::variant<ExampleCoding, UniformCoding>;

CodingRule parse_coding(std::string_view name);
double apply_coding(const CodingRule& rule, const Dyadic& theta);

}  // namespace mdl
