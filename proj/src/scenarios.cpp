#include "mdl/scenarios.hpp"

#include "mdl/config.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdl {

namespace {

using Rational = boost::multiprecision::cpp_rational;

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("polynomial coefficient is not finite");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  const double frac = std::frexp(x, &exp);
  // frac * 2^53 is an integer for every finite double
  const auto mant = static_cast<long long>(std::ldexp(frac, 53));
  exp -= 53;
  Rational r(mant);
  if (exp >= 0) return r * Rational(BigInt(1) << exp);
  return r / Rational(BigInt(1) << -exp);
}

Rational to_rational(const Dyadic& d) { return Rational(d.mantissa()) / Rational(BigInt(1) << d.exponent()); }

/// phi(t) as a dyadic; throws when it leaves [0,1].
Dyadic evaluate_exact(const std::vector<Rational>& coeffs, const Dyadic& t) {
  const Rational x = to_rational(t);
  Rational acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  if (acc < 0 || acc > 1) throw std::invalid_argument("distorted_class: phi(" + t.str() + ") lies outside [0,1]");
  const BigInt num = boost::multiprecision::numerator(acc);
  const BigInt den = boost::multiprecision::denominator(acc);
  const unsigned e = boost::multiprecision::msb(den);
  if (den != (BigInt(1) << e)) throw std::logic_error("distorted_class: non-dyadic image");
  return Dyadic::from_fraction(num, e);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty entry in list '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

/// Dyadic literal when possible, plain real otherwise.
Param parse_param(const std::string& text, double kw) {
  try {
    return Param::dyadic(Dyadic::parse(text), kw);
  } catch (const std::exception&) {
    return Param::real(parse_real(text), kw);
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

ParamClass prop4_class(int N, std::optional<double> kw0) {
  if (N < 1 || N > 8) throw std::invalid_argument("prop4_class: N must be in 1..8");
  const auto M = (1u << N) - 1u;
  const double kw = N;
  std::vector<Param> params;
  params.reserve(M + 1);
  const Dyadic half = Dyadic::pow2(1);
  params.push_back(Param::dyadic(half, kw0.value_or(kw)));
  // ascending: 1/2 + 2^-M-1 < ... < 1/2 + 2^-2
  for (auto k = M; k >= 1; --k) params.push_back(Param::dyadic(half + Dyadic::pow2(k + 1), kw));
  return ParamClass(std::move(params), 0);
}

ParamClass qbstar_class(int max_len, const Dyadic& theta0, const CodingRule& coding) {
  if (!theta0.is_zero() && !theta0.is_one() && theta0.length() > static_cast<std::uint32_t>(max_len))
    throw std::invalid_argument("qbstar_class: theta0 = " + theta0.str() + " is longer than max_len");
  const auto values = enumerate_qbstar(max_len);
  std::vector<Param> params;
  params.reserve(values.size());
  std::size_t truth = values.size();
  for (const auto& v : values) {
    if (v == theta0) truth = params.size();
    params.push_back(Param::dyadic(v, apply_coding(coding, v)));
  }
  if (truth == values.size()) throw std::invalid_argument("qbstar_class: theta0 not in class");
  return ParamClass(std::move(params), truth);
}

DistortedClass distorted_class(const Polynomial& phi, int max_len, const Dyadic& t0, double eps) {
  if (phi.coeffs.empty()) throw std::invalid_argument("distorted_class: empty polynomial");
  if (!t0.is_zero() && !t0.is_one() && t0.length() > static_cast<std::uint32_t>(max_len))
    throw std::invalid_argument("distorted_class: t0 not in the enumerated set");
  std::vector<Rational> coeffs;
  for (double c : phi.coeffs) coeffs.push_back(exact_rational(c));

  struct Image {
    Dyadic value;
    Dyadic source;
  };
  std::vector<Image> images;
  for (const auto& t : enumerate_qbstar(max_len)) images.push_back({evaluate_exact(coeffs, t), t});
  std::sort(images.begin(), images.end(), [](const Image& a, const Image& b) { return a.value < b.value; });
  for (std::size_t i = 1; i < images.size(); ++i)
    if (images[i].value == images[i - 1].value)
      throw std::invalid_argument("distorted_class: phi(" + images[i - 1].source.str() + ") = phi(" + images[i].source.str() +
                                  ") = " + images[i].value.str());

  std::vector<Param> params;
  std::size_t truth = images.size();
  for (const auto& im : images) {
    if (im.source == t0) truth = params.size();
    params.push_back(Param::dyadic(im.value, kw_example(im.source)));
  }
  if (truth == images.size()) throw std::invalid_argument("distorted_class: t0 not in the enumerated set");
  return DistortedClass{ParamClass(std::move(params), truth), corollary9_bound_params(phi, t0, eps)};
}

FiniteClass finite_class(std::span<const Param> params, std::size_t true_index) {
  if (true_index >= params.size()) throw std::invalid_argument("finite_class: true_index out of range");
  std::vector<Param> list(params.begin(), params.end());
  const Param truth = list[true_index];
  ParamClass cls = ParamClass::from_unsorted(std::move(list), truth);
  const double bound = static_cast<double>(cls.size()) + cls.truth().kw;
  return FiniteClass{std::move(cls), bound};
}

Scenario resolve_scenario(const Config& config) {
  const std::string name = config.require("scenario");
  if (name == "prop4") {
    const int N = static_cast<int>(config.get_int("N", 3));
    std::optional<double> kw0;
    if (config.has("kw0")) kw0 = config.get_double("kw0", 0.0);
    std::string label = "prop4:N=" + std::to_string(N);
    if (kw0) label += ",kw0=" + fmt(*kw0);
    Scenario s{name, label, prop4_class(N, kw0)};
    s.prop4_N = N;
    return s;
  }
  if (name == "qbstar") {
    const int max_len = static_cast<int>(config.get_int("max_len", 8));
    const Dyadic theta0 = Dyadic::parse(config.get_or("theta0", "1/2"));
    const std::string coding_name = config.get_or("coding", "example-coding");
    const CodingRule coding = parse_coding(coding_name);
    Scenario s{name, "qbstar:max_len=" + std::to_string(max_len) + ",theta0=" + theta0.str() + ",coding=" + coding_name,
               qbstar_class(max_len, theta0, coding)};
    s.max_len = max_len;
    s.example_coding = std::holds_alternative<ExampleCoding>(coding);
    return s;
  }
  if (name == "distorted") {
    const std::string poly = config.require("poly");
    const int max_len = static_cast<int>(config.get_int("max_len", 6));
    const Dyadic t0 = Dyadic::parse(config.get_or("t0", "1/2"));
    const double eps = config.get_double("eps", 0.25);
    auto d = distorted_class(parse_polynomial(poly), max_len, t0, eps);
    Scenario s{name, "distorted:poly=" + poly + ",max_len=" + std::to_string(max_len) + ",t0=" + t0.str(), std::move(d.cls)};
    s.max_len = max_len;
    s.hint = d.hint;
    return s;
  }
  if (name == "finite") {
    const auto values = split_list(config.require("values"));
    const auto kws = split_list(config.require("kws"));
    if (values.size() != kws.size()) throw std::invalid_argument("finite: values and kws differ in length");
    std::vector<Param> params;
    for (std::size_t i = 0; i < values.size(); ++i) params.push_back(parse_param(values[i], parse_real(kws[i])));
    const long ti = config.get_int("true_index", 0);
    if (ti < 0) throw std::invalid_argument("finite: true_index must be >= 0");
    auto f = finite_class(params, static_cast<std::size_t>(ti));
    Scenario s{name, "finite:values=" + config.require("values") + ",true_index=" + std::to_string(ti), std::move(f.cls)};
    s.finite_bound = f.bound_quantity;
    return s;
  }
  if (name == "single") {
    const std::string theta0 = config.get_or("theta0", "1/2");
    const double kw = config.get_double("kw", 1.0);
    std::vector<Param> params{parse_param(theta0, kw)};
    auto f = finite_class(params, 0);
    Scenario s{name, "single:theta0=" + theta0, std::move(f.cls)};
    s.finite_bound = f.bound_quantity;
    return s;
  }
  if (name == "explicit") {
    const auto thetas = config.get_all("theta");
    if (thetas.empty()) throw std::invalid_argument("explicit: no theta entries");
    const std::string coding_name = config.get_or("coding", "table");
    std::vector<Param> params;
    if (coding_name == "table") {
      const auto kws = config.get_all("kw");
      if (kws.size() != thetas.size())
        throw std::invalid_argument("explicit: " + std::to_string(thetas.size()) + " theta entries but " +
                                    std::to_string(kws.size()) + " kw entries");
      for (std::size_t i = 0; i < thetas.size(); ++i) params.push_back(Param::dyadic(Dyadic::parse(thetas[i]), parse_real(kws[i])));
    } else {
      const CodingRule coding = parse_coding(coding_name);
      for (const auto& t : thetas) {
        const Dyadic d = Dyadic::parse(t);
        params.push_back(Param::dyadic(d, apply_coding(coding, d)));
      }
    }
    const Dyadic theta0 = Dyadic::parse(config.require("theta0"));
    auto it = std::find_if(params.begin(), params.end(), [&](const Param& p) { return *p.exact == theta0; });
    if (it == params.end()) throw std::invalid_argument("explicit: theta0 not among the theta entries");
    auto f = finite_class(params, static_cast<std::size_t>(it - params.begin()));
    Scenario s{name, "explicit:theta0=" + theta0.str() + ",size=" + std::to_string(params.size()), std::move(f.cls)};
    s.example_coding = coding_name == "example-coding";
    s.finite_bound = f.bound_quantity;
    return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

}  // namespace mdl
