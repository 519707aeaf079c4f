#include "mdl/intervals.hpp"

#include "mdl/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace mdl;

namespace {

Dyadic D(const char* s) { return Dyadic::parse(s); }

std::string types(const std::vector<IntervalStep>& steps) {
  std::string out;
  for (const auto& s : steps) out += to_char(s.type);
  return out;
}

}  // namespace

TEST_CASE("construction around 3/16") {
  const auto steps = build_construction(D("3/16"), 4);
  REQUIRE(steps.size() == 4);
  CHECK(types(steps) == "lclc");
  CHECK(steps[0].J.str() == "[0,1/2)");
  CHECK(steps[0].I_str() == "[1/2,1)");
  CHECK(steps[1].J.str() == "[1/8,3/8)");
  CHECK(steps[1].I_str() == "[0,1/8) U [3/8,1/2)");
  CHECK(steps[2].J.str() == "[1/8,1/4)");
  CHECK(steps[2].I_str() == "[1/4,3/8)");
  CHECK(steps[3].J.str() == "[5/32,7/32)");
  CHECK(steps[3].I_str() == "[1/8,5/32) U [7/32,1/4)");
  CHECK(steps[3].d == D("1/8"));
  std::ostringstream csv;
  write_construction_csv(csv, steps);
  CHECK(csv.str().rfind("k,type,J,I\n1,l,", 0) == 0);
}

TEST_CASE("construction around 1/2 starts with a c-step") {
  const auto steps = build_construction(D("1/2"), 1);
  CHECK(steps[0].type == StepType::c);
  CHECK(steps[0].J.str() == "[1/4,3/4)");
  CHECK_THROWS(build_construction(Dyadic::zero(), 3));
  CHECK_THROWS(build_construction(Dyadic::one(), 3));
  CHECK_THROWS(build_construction(D("1/2"), 0));
}

TEST_CASE("construction invariants for random dyadic theta0") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int len = 1 + static_cast<int>(rng() % 10);
    const std::uint64_t m = (rng() % (std::uint64_t{1} << (len - 1))) * 2 + 1;
    const Dyadic theta0 = Dyadic::from_fraction(BigInt(m), len);
    const auto problems = construction_violations(theta0, build_construction(theta0, 20));
    CHECK_MESSAGE(problems.empty(), theta0.str());
  }
}

TEST_CASE("invariant checker notices a broken step") {
  auto steps = build_construction(D("3/16"), 3);
  steps[1].J.hi = D("1/2");
  CHECK_FALSE(construction_violations(D("3/16"), steps).empty());
}

TEST_CASE("partitions") {
  const auto p = prop4_partition(3);
  CHECK(p.bucket_count() == 8);
  CHECK(p.key(p.bucket_of(Dyadic::one())) == 1);
  CHECK(p.key(p.bucket_of(D("3/4"))) == 1);
  CHECK(p.key(p.bucket_of(D("1/2"))) == 0);
  CHECK(p.key(p.bucket_of(D("5/8"))) == 2);
  CHECK(p.key(p.bucket_of(D("129/256"))) == 7);
  CHECK(p.key(p.bucket_of(0.0)) == 0);
  const auto steps = build_construction(D("3/16"), 4);
  const auto c = construction_partition(steps);
  CHECK(c.bucket_count() == 5);
  CHECK(c.key(c.bucket_of(D("3/16"))) == 5);
  CHECK(c.key(c.bucket_of(Dyadic::one())) == 1);
  CHECK(c.key(c.bucket_of(D("7/32"))) == 4);
  CHECK(c.key(c.bucket_of(D("1/16"))) == 2);
  CHECK_THROWS(prop4_partition(0));
}

TEST_CASE("complexity gaps") {
  const auto q = qbstar_class(12, D("3/16"));
  const auto prof = delta_profile(q, 12);
  CHECK(prof.entries[0].delta == 1.0);
  CHECK(q[*prof.entries[0].theta_I].exact == D("1/2"));
  CHECK(q[*prof.entries[0].theta_J].exact == Dyadic::zero());
  // minimizers really are minimal
  for (const auto& e : prof.entries) {
    const auto& step = prof.steps[e.k - 1];
    double best_I = INFINITY, best_J = INFINITY;
    for (const auto& p : q.params()) {
      if (step.in_I(p)) best_I = std::min(best_I, p.kw);
      if (step.J.contains(p)) best_J = std::min(best_J, p.kw);
    }
    CHECK(e.kw_I == best_I);
    CHECK(e.kw_J == best_J);
    CHECK(e.delta == std::max(best_I - best_J, 0.0));
  }

  const ParamClass single({Param::dyadic(D("3/16"), 4)}, 0);
  for (const auto& e : delta_profile(single, 8).entries) CHECK(std::isinf(e.delta));
  CHECK(theorem6_rhs(delta_profile(single, 8), 4).value == 4.0);

  const auto p4 = prop4_class(3);
  for (const auto& e : delta_profile(p4, 10).entries)
    if (e.theta_I) CHECK(e.delta == 0.0);
  CHECK(theorem6_rhs(delta_profile(p4, 10), 3).zero_delta_terms > 0);

  std::ostringstream csv;
  write_delta_csv(csv, q, prof);
  CHECK(csv.str().rfind("k,theta_I,theta_J,kw_I,kw_J,delta\n", 0) == 0);
}

TEST_CASE("theorem 6 sum for linear gaps") {
  DeltaProfile prof;
  for (int k = 1; k <= 60; ++k) prof.entries.push_back(DeltaEntry{k, std::nullopt, std::nullopt, 0, 0, static_cast<double>(k)});
  const auto rhs = theorem6_rhs(prof, 2.0);
  CHECK(rhs.value == doctest::Approx(2.0 + 1.347253752735750).epsilon(1e-14));
  CHECK(rhs.last_increment < 1e-15);
}

TEST_CASE("uniform spacing condition") {
  for (const char* t : {"1/2", "3/16"}) {
    const auto r = condition14_check(qbstar_class(10, D(t)), 1, 0, 24);
    CHECK_MESSAGE(r.passed, t);
  }
  const auto fail = condition14_check(prop4_class(3), 1, 0, 24);
  CHECK_FALSE(fail.passed);
  REQUIRE(fail.witness);
  CHECK(fail.witness->k == 4);
  CHECK(prop4_class(3)[fail.witness->index].exact == D("9/16"));
  CHECK(fail.witness->kw == 3);
  // monotone in (a, b)
  const auto cls = qbstar_class(8, D("5/32"));
  for (double a : {1.0, 1.5, 2.0})
    for (double b : {0.0, 1.0, 3.0}) {
      const bool base = condition14_check(cls, a, b, 16).passed;
      if (base) {
        CHECK(condition14_check(cls, a + 0.5, b, 16).passed);
        CHECK(condition14_check(cls, a, b + 1, 16).passed);
      }
    }
  // nothing but theta0 nearby: vacuous
  const ParamClass lone({Param::dyadic(D("1/2"), 1)}, 0);
  const auto v = condition14_check(lone, 1, 0, 10);
  CHECK(v.passed);
  CHECK(v.vacuous == v.k_max - v.first_k + 1);
}

TEST_CASE("derivative order parameters") {
  const auto id = corollary9_bound_params(parse_polynomial("0,1"), D("3/8"), 0.25);
  CHECK(id.order == 1);
  CHECK(id.c == doctest::Approx(1.0));
  CHECK(id.a == 1);
  CHECK(id.b == doctest::Approx(1.0));
  const auto sq = corollary9_bound_params(parse_polynomial("0,0,1"), D("1/2"), 0.125);
  CHECK(sq.order == 1);
  CHECK(sq.c == doctest::Approx(0.75));
  CHECK(sq.b == doctest::Approx(1.0 - std::log2(0.75)));
  // (t - 1/2)^3 + 1/2
  const auto cube = corollary9_bound_params(parse_polynomial("0.375,0.75,-1.5,1"), D("1/2"), 0.25);
  CHECK(cube.order == 3);
  CHECK(cube.c == doctest::Approx(6.0));
  CHECK(cube.a == 3);
  CHECK(cube.b == doctest::Approx(1.0));
  CHECK(cube.injective_on_grid);
  CHECK_THROWS(corollary9_bound_params(parse_polynomial("0.5"), D("1/2"), 0.1));
  CHECK_THROWS(parse_polynomial("1,x"));
}
