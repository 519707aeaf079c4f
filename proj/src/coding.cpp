#include "mdl/coding.hpp"

#include <bit>
#include <cfenv>
#include <cmath>
#include <stdexcept>

namespace mdl {

double kw_example(const Dyadic& theta) {
  if (theta.is_zero() || theta.is_one()) return 2.0;
  const std::uint64_t len = theta.length();
  // floor(lb(len + 1)) is the index of the top set bit of len + 1.
  const auto floor_lb = static_cast<std::uint64_t>(std::bit_width(len + 1) - 1);
  return static_cast<double>(len + 2 * floor_lb);
}

std::vector<Dyadic> enumerate_qbstar(int max_len) {
  if (max_len < 0) throw std::invalid_argument("enumerate_qbstar: max_len must be >= 0");
  if (max_len > kMaxQbstarLength)
    throw std::invalid_argument("enumerate_qbstar: max_len " + std::to_string(max_len) + " exceeds the class size guard of " +
                                std::to_string(kMaxQbstarLength));
  // Every odd m / 2^max_len and its reductions: walk all m in 0..2^max_len.
  const std::uint64_t denom = std::uint64_t{1} << max_len;
  std::vector<Dyadic> out;
  out.reserve(denom + 1);
  for (std::uint64_t m = 0; m <= denom; ++m) out.push_back(Dyadic::from_fraction(BigInt(m), static_cast<std::uint32_t>(max_len)));
  return out;
}

ComplexityAssignment::ComplexityAssignment(std::vector<double> kw, bool sub_kraft)
    : kw_(std::move(kw)), sub_kraft_(sub_kraft) {
  for (double v : kw_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("complexity must be a finite value >= 0");
  if (sub_kraft_ && kraft_sum(kw_) > 1.0) throw std::invalid_argument("assignment declared sub-Kraft but sum 2^-Kw exceeds 1");
}

double ComplexityAssignment::weight(std::size_t i) const { return std::exp2(-kw_.at(i)); }

double kraft_sum(std::span<const double> kw) {
  const int saved = std::fegetround();
  std::fesetround(FE_UPWARD);
  volatile double sum = 0.0;
  for (double k : kw) {
    double term;
    if (k == std::floor(k) && k < 1074.0) {
      term = std::ldexp(1.0, -static_cast<int>(k));
    } else {
      term = std::nextafter(std::exp2(-k), 1.0);
    }
    sum = sum + term;
  }
  const double result = sum;
  std::fesetround(saved);
  return result;
}

CodingRule parse_coding(std::string_view name) {
  if (name == "example-coding") return ExampleCoding{};
  if (name.starts_with("uniform:")) {
    const std::string value(name.substr(8));
    std::size_t used = 0;
    double kw = 0.0;
    try {
      kw = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (value.empty() || used != value.size() || !(kw >= 0.0)) throw std::invalid_argument("bad uniform coding '" + std::string(name) + "'");
    return UniformCoding{kw};
  }
  throw std::invalid_argument("unknown coding '" + std::string(name) + "' (expected example-coding or uniform:<N>)");
}

double apply_coding(const CodingRule& rule, const Dyadic& theta) {
  if (std::holds_alternative<ExampleCoding>(rule)) return kw_example(theta);
  return std::get<UniformCoding>(rule).kw;
}

}  // namespace mdl
