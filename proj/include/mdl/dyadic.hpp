#pragma once
// Exact finite binary fractions in [0,1].

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdl {

using BigInt = boost::multiprecision::cpp_int;

/// A value m / 2^e in [0,1], kept in canonical form: m is odd, or the value
/// is exactly 0 (m = 0, e = 0) or 1 (m = 1, e = 0).
class Dyadic {
 public:
  Dyadic() = default;

  /// Builds 0.b1 b2 ... bn. The empty sequence is 0; a trailing 0 digit is
  /// rejected as non-canonical.
  static Dyadic from_bits(std::span<const int> bits);

  /// numerator / 2^exponent, canonicalized. Throws if the value exceeds 1.
  static Dyadic from_fraction(BigInt numerator, std::uint32_t exponent);

  /// 2^-k for k >= 0.
  static Dyadic pow2(std::uint32_t k);

  static Dyadic zero() { return {}; }
  static Dyadic one() { return from_fraction(1, 0); }

  /// Accepts "0", "1", "0.<binary digits>", "p/q" with q a power of two, and
  /// "p/2^e".
  static Dyadic parse(std::string_view text);

  const BigInt& mantissa() const noexcept { return mantissa_; }
  std::uint32_t exponent() const noexcept { return exponent_; }

  bool is_zero() const noexcept { return mantissa_ == 0; }
  bool is_one() const noexcept { return exponent_ == 0 && mantissa_ == 1; }

  /// Number of binary digits after the point; 0 for the values 0 and 1.
  std::uint32_t length() const noexcept { return exponent_; }

  /// Binary digits b1..bn with bn = 1 (empty for 0 and 1).
  std::vector<int> bits() const;

  double to_double() const;
  long double to_long_double() const;

  /// "3/16", "0", "1".
  std::string str() const;
  /// "0.0011", "0", "1".
  std::string binary_str() const;

  friend bool operator==(const Dyadic&, const Dyadic&) = default;
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  /// Throw std::domain_error when the result leaves [0,1].
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);

  friend Dyadic abs_diff(const Dyadic& a, const Dyadic& b);

 private:
  Dyadic(BigInt m, std::uint32_t e) : mantissa_(std::move(m)), exponent_(e) {}
  void canonicalize();

  BigInt mantissa_{0};
  std::uint32_t exponent_{0};
};

/// Smallest k with k/n >= value (exact).
std::uint64_t ceil_times(const Dyadic& value, std::uint64_t n);

}  // namespace mdl
