#include "mdl/scenarios.hpp"

#include "mdl/config.hpp"

#include <doctest.h>

using namespace mdl;

namespace {
Dyadic D(const char* s) { return Dyadic::parse(s); }
}  // namespace

TEST_CASE("prop4 classes") {
  const auto one = prop4_class(1);
  REQUIRE(one.size() == 2);
  CHECK(*one[0].exact == D("1/2"));
  CHECK(*one[1].exact == D("3/4"));
  CHECK(one[1].kw == 1);
  const auto two = prop4_class(2);
  REQUIRE(two.size() == 4);
  CHECK(two[1].exact->str() == "9/16");
  CHECK(two[2].exact->str() == "5/8");
  CHECK(two[3].exact->str() == "3/4");
  CHECK(kraft_sum(prop4_class(3).kws()) == 1.0);
  const auto eight = prop4_class(8);
  CHECK(eight.size() == 256);
  CHECK(eight.all_exact());
  CHECK(eight[1].exact->exponent() == 256);
  CHECK(prop4_class(3, 2.0).truth().kw == 2.0);
  CHECK_THROWS(prop4_class(9));
  CHECK_THROWS(prop4_class(0));
}

TEST_CASE("qbstar classes") {
  const auto q1 = qbstar_class(1, D("1/2"));
  REQUIRE(q1.size() == 3);
  CHECK(q1[0].kw == 2);
  CHECK(q1[1].kw == 3);
  CHECK(q1[2].kw == 2);
  const auto q4 = qbstar_class(4, D("3/16"));
  CHECK(q4.size() == 17);
  CHECK(q4.truth().kw == 8);
  CHECK_NOTHROW(qbstar_class(2, Dyadic::one()));
  CHECK_THROWS(qbstar_class(3, D("1/16")));
  CHECK(qbstar_class(3, D("1/4"), UniformCoding{5}).truth().kw == 5);
}

TEST_CASE("distorted classes") {
  const auto id = distorted_class(parse_polynomial("0,1"), 5, D("3/16"), 0.1);
  const auto q = qbstar_class(5, D("3/16"));
  REQUIRE(id.cls.size() == q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(*id.cls[i].exact == *q[i].exact);
    CHECK(id.cls[i].kw == q[i].kw);
  }
  const auto sq = distorted_class(parse_polynomial("0,0,1"), 6, D("1/2"), 0.125);
  CHECK(*sq.cls.truth().exact == D("1/4"));
  CHECK(sq.cls.truth().kw == 3);
  CHECK(sq.cls.size() == 65);
  const auto cube = distorted_class(parse_polynomial("0.375,0.75,-1.5,1"), 4, D("1/2"), 0.25);
  CHECK(cube.hint.a == 3);
  // 4t(1-t) folds [0,1] onto itself
  CHECK_THROWS_WITH(distorted_class(parse_polynomial("0,4,-4"), 3, D("1/2"), 0.1), doctest::Contains("phi(0) = phi(1) = 0"));
  // (t - 1/2)^2: the lowest colliding value is reported
  CHECK_THROWS_WITH(distorted_class(parse_polynomial("0.25,-1,1"), 2, D("1/2"), 0.1),
                    doctest::Contains("phi(1/4) = phi(3/4) = 1/16"));
  CHECK_THROWS(distorted_class(parse_polynomial("0,2"), 3, D("1/4"), 0.1));
}

TEST_CASE("finite classes") {
  const std::vector<Param> two{Param::real(0.7, 1), Param::real(0.3, 1)};
  const auto f = finite_class(two, 1);
  CHECK(f.bound_quantity == 3.0);
  CHECK(f.cls.theta0() == 0.3);
  const std::vector<Param> one{Param::real(0.4, 2.5)};
  CHECK(finite_class(one, 0).bound_quantity == 3.5);
  std::vector<Param> grid;
  for (int i = 9; i >= 0; --i) grid.push_back(Param::real(0.05 + 0.1 * i, 4));
  const auto g = finite_class(grid, 3);
  CHECK(g.cls.size() == 10);
  CHECK(g.cls.theta0() == doctest::Approx(0.65));
  const std::vector<Param> dup{Param::real(0.4, 1), Param::real(0.4, 2)};
  CHECK_THROWS(finite_class(dup, 0));
}

TEST_CASE("config parsing") {
  const auto cfg = Config::parse_string(
      "# comment\n"
      "scenario = \"explicit\"\n"
      "theta = 0.01  # 1/4\n"
      "kw = 2\n"
      "theta = 1/2\n"
      "kw = 1\n"
      "theta0 = 1/2\n");
  CHECK(cfg.get_all("theta").size() == 2);
  CHECK(cfg.get("scenario") == "explicit");
  const auto s = resolve_scenario(cfg);
  CHECK(s.cls.size() == 2);
  CHECK(s.cls.theta0() == 0.5);
  CHECK(s.cls[0].kw == 2);

  auto missing = Config::parse_string("scenario = explicit\ntheta = 1/2\ntheta = 1/4\nkw = 1\ntheta0 = 1/2\n");
  CHECK_THROWS_WITH(resolve_scenario(missing), doctest::Contains("kw entries"));
  missing.set("coding", "example-coding");
  CHECK(resolve_scenario(missing).cls.truth().kw == 3);

  CHECK_THROWS(Config::parse_string("no equals sign\n"));
  Config c;
  c.apply_scenario_shorthand("prop4:N=2");
  CHECK(resolve_scenario(c).cls.size() == 4);
  CHECK(resolve_scenario(c).label == "prop4:N=2");
  c.apply_scenario_shorthand("finite:values=0.3,0.7,kws=1,1,true_index=1");
  CHECK(c.get("values") == "0.3,0.7");
  const auto f = resolve_scenario(c);
  CHECK(f.cls.theta0() == 0.7);
  CHECK(f.finite_bound == 3.0);
  c.apply_override("true_index=0");
  CHECK(resolve_scenario(c).cls.theta0() == 0.3);
  c.apply_scenario_shorthand("qbstar:max_len=4,theta0=3/16");
  CHECK(resolve_scenario(c).cls.truth().kw == 8);
  c.apply_scenario_shorthand("single:theta0=0.4");
  CHECK(resolve_scenario(c).cls.size() == 1);
  c.apply_scenario_shorthand("nonsense");
  CHECK_THROWS(resolve_scenario(c));
  CHECK_THROWS(Config::parse_string("N = x\n").get_int("N", 0));
}
