#include "mdl/dyadic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace mdl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

BigInt parse_decimal(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("dyadic literal: missing integer in '" + std::string(whole) + "'");
  BigInt v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("dyadic literal: bad digit in '" + std::string(whole) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

void Dyadic::canonicalize() {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  const auto low = static_cast<std::uint32_t>(boost::multiprecision::lsb(mantissa_));
  const std::uint32_t shift = std::min(low, exponent_);
  mantissa_ >>= shift;
  exponent_ -= shift;
  if (mantissa_ > (BigInt(1) << exponent_))
    throw std::domain_error("dyadic value exceeds 1: " + mantissa_.str() + "/2^" + std::to_string(exponent_));
}

Dyadic Dyadic::from_bits(std::span<const int> bits) {
  if (bits.empty()) return {};
  if (bits.back() != 1) throw std::invalid_argument("from_bits: trailing digit must be 1");
  BigInt m = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("from_bits: digits must be 0 or 1");
    m = (m << 1) | b;
  }
  return Dyadic(std::move(m), static_cast<std::uint32_t>(bits.size()));
}

Dyadic Dyadic::from_fraction(BigInt numerator, std::uint32_t exponent) {
  if (numerator < 0) throw std::domain_error("dyadic value below 0");
  Dyadic d(std::move(numerator), exponent);
  d.canonicalize();
  return d;
}

Dyadic Dyadic::pow2(std::uint32_t k) { return Dyadic(BigInt(1), k); }

Dyadic Dyadic::parse(std::string_view text) {
  const std::string_view s = trim(text);
  if (s == "0") return zero();
  if (s == "1") return one();
  if (s.starts_with("0.")) {
    std::vector<int> bits;
    for (char c : s.substr(2)) {
      if (c != '0' && c != '1')
        throw std::invalid_argument("binary fraction may only contain 0/1 digits: '" + std::string(s) + "'");
      bits.push_back(c - '0');
    }
    return from_bits(bits);
  }
  const auto slash = s.find('/');
  if (slash == std::string_view::npos)
    throw std::invalid_argument("unrecognized dyadic literal '" + std::string(s) + "'");
  BigInt num = parse_decimal(trim(s.substr(0, slash)), s);
  std::string_view den = trim(s.substr(slash + 1));
  std::uint32_t exponent = 0;
  if (den.starts_with("2^")) {
    den.remove_prefix(2);
    auto [ptr, ec] = std::from_chars(den.data(), den.data() + den.size(), exponent);
    if (ec != std::errc{} || ptr != den.data() + den.size())
      throw std::invalid_argument("bad exponent in '" + std::string(s) + "'");
  } else {
    BigInt d = parse_decimal(den, s);
    if (d == 0 || (d & (d - 1)) != 0)
      throw std::invalid_argument("denominator is not a power of two in '" + std::string(s) + "'");
    exponent = static_cast<std::uint32_t>(boost::multiprecision::msb(d));
  }
  return from_fraction(std::move(num), exponent);
}

std::vector<int> Dyadic::bits() const {
  std::vector<int> out;
  if (is_zero() || is_one()) return out;
  out.resize(exponent_);
  for (std::uint32_t i = 0; i < exponent_; ++i)
    out[exponent_ - 1 - i] = boost::multiprecision::bit_test(mantissa_, i) ? 1 : 0;
  return out;
}

long double Dyadic::to_long_double() const {
  if (mantissa_ == 0) return 0.0L;
  const auto top = static_cast<std::int64_t>(boost::multiprecision::msb(mantissa_));
  const std::int64_t shift = std::max<std::int64_t>(0, top + 1 - 64);
  const auto head = static_cast<std::uint64_t>(mantissa_ >> shift);
  return std::ldexp(static_cast<long double>(head), static_cast<int>(shift - static_cast<std::int64_t>(exponent_)));
}

double Dyadic::to_double() const {
  if (mantissa_ == 0) return 0.0;
  const auto top = static_cast<std::int64_t>(boost::multiprecision::msb(mantissa_));
  if (top < 53) return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(mantissa_)), -static_cast<int>(exponent_));
  return static_cast<double>(to_long_double());
}

std::string Dyadic::str() const {
  if (is_zero()) return "0";
  if (is_one()) return "1";
  if (exponent_ <= 62) return mantissa_.str() + "/" + std::to_string(std::uint64_t{1} << exponent_);
  return mantissa_.str() + "/2^" + std::to_string(exponent_);
}

std::string Dyadic::binary_str() const {
  if (is_zero()) return "0";
  if (is_one()) return "1";
  std::string s = "0.";
  for (int b : bits()) s.push_back(static_cast<char>('0' + b));
  return s;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const std::uint32_t e = std::max(a.exponent_, b.exponent_);
  const BigInt lhs = a.mantissa_ << (e - a.exponent_);
  const BigInt rhs = b.mantissa_ << (e - b.exponent_);
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  const std::uint32_t e = std::max(a.exponent_, b.exponent_);
  return Dyadic::from_fraction((a.mantissa_ << (e - a.exponent_)) + (b.mantissa_ << (e - b.exponent_)), e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  const std::uint32_t e = std::max(a.exponent_, b.exponent_);
  return Dyadic::from_fraction((a.mantissa_ << (e - a.exponent_)) - (b.mantissa_ << (e - b.exponent_)), e);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic::from_fraction(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

Dyadic abs_diff(const Dyadic& a, const Dyadic& b) { return a < b ? b - a : a - b; }

std::uint64_t ceil_times(const Dyadic& value, std::uint64_t n) {
  const std::uint32_t e = value.exponent();
  if (e < 64 && value.mantissa() <= BigInt(std::numeric_limits<std::uint64_t>::max())) {
    const auto m = static_cast<std::uint64_t>(value.mantissa());
    const unsigned __int128 prod = static_cast<unsigned __int128>(m) * n;
    const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << e) - 1;
    return static_cast<std::uint64_t>(prod >> e) + ((prod & mask) != 0 ? 1 : 0);
  }
  const BigInt prod = value.mantissa() * n;
  BigInt q = prod >> e;
  if ((q << e) != prod) ++q;
  return static_cast<std::uint64_t>(q);
}

}  // namespace mdl
