#include "mdl/coding.hpp"

#include <doctest.h>

using namespace mdl;

TEST_CASE("example coding lengths") {
  CHECK(kw_example(Dyadic::zero()) == 2);
  CHECK(kw_example(Dyadic::one()) == 2);
  CHECK(kw_example(Dyadic::parse("1/2")) == 3);
  CHECK(kw_example(Dyadic::parse("1/4")) == 4);
  CHECK(kw_example(Dyadic::parse("3/8")) == 7);
  CHECK(kw_example(Dyadic::parse("3/16")) == 8);
  CHECK(kw_example(Dyadic::parse("5/32")) == 9);
  CHECK(kw_example(Dyadic::pow2(7)) == 13);
}

TEST_CASE("enumeration") {
  const auto v = enumerate_qbstar(4);
  CHECK(v.size() == 17);
  CHECK(v.front().is_zero());
  CHECK(v.back().is_one());
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i - 1] < v[i]);
  CHECK(enumerate_qbstar(0).size() == 2);
  CHECK_THROWS(enumerate_qbstar(kMaxQbstarLength + 1));
}

TEST_CASE("example coding is sub-Kraft on every truncation") {
  for (int len = 0; len <= 14; ++len) {
    std::vector<double> kw;
    for (const auto& d : enumerate_qbstar(len)) kw.push_back(kw_example(d));
    CHECK(kraft_sum(kw) <= 1.0);
    CHECK_NOTHROW(ComplexityAssignment(kw, true));
  }
}

TEST_CASE("kraft sum rounds upward") {
  const std::vector<double> kw(8, 3.0);
  CHECK(kraft_sum(kw) == 1.0);
  const std::vector<double> third{std::log2(3.0), std::log2(3.0), std::log2(3.0)};
  CHECK(kraft_sum(third) >= 1.0);
  CHECK_THROWS(ComplexityAssignment({1.0, 1.0, 1.0}, true));
  CHECK_THROWS(ComplexityAssignment({-1.0}));
  CHECK(ComplexityAssignment({2.0}).weight(0) == 0.25);
}

TEST_CASE("coding rules") {
  CHECK(apply_coding(parse_coding("example-coding"), Dyadic::parse("3/16")) == 8);
  CHECK(apply_coding(parse_coding("uniform:5"), Dyadic::parse("3/16")) == 5);
  CHECK_THROWS(parse_coding("uniform:"));
  CHECK_THROWS(parse_coding("table"));
}
