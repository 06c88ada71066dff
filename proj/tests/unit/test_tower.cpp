#include <doctest.h>

#include "tower.hpp"

using namespace kummerlab;
using namespace kummerlab::tower;
using cyclo::CycloElement;
using cyclo::make_cyclo_field;
using cyclo::parse_element;

TEST_CASE("nested chain construction and certificates") {
  auto Q4 = make_cyclo_field(4);
  auto t = build_nested_chain(parse_element(Q4, "1+z"), 2, 2);
  auto cert = verify_nested(t);
  CHECK(cert.valid);
  CHECK(cert.witness_q == 3);
  REQUIRE(cert.degrees.size() == 2);
  CHECK(cert.degrees[1].certified);
  REQUIRE(cert.cyclicity.size() == 1);
  CHECK(cert.cyclicity[0].certified);

  auto Q = make_cyclo_field(1);
  auto t2 = build_nested_chain(CycloElement::rational(Q, 2), 2, 2);
  auto cert2 = verify_nested(t2);
  CHECK_FALSE(cert2.valid);
  CHECK_FALSE(cert2.inconclusive);
  REQUIRE(cert2.cyclicity.size() == 1);
  CHECK_FALSE(cert2.cyclicity[0].certified);
  CHECK(cert2.degrees[0].certified);

  auto t3 = build_nested_chain(parse_element(Q4, "(1+z)^2"), 2, 1);
  auto cert3 = verify_nested(t3);
  CHECK_FALSE(cert3.valid);
  CHECK(cert3.failure.find("p-th power") != std::string::npos);

  // mu_4 in L_1 = Q(i): the parenthetical criterion certifies Q(i)(i^{1/2}...) chains
  auto t4 = build_nested_chain(CycloElement::rational(Q, -1), 2, 3);
  auto cert4 = verify_nested(t4);
  CHECK(cert4.valid);

  CHECK_THROWS_AS(build_nested_chain(CycloElement::rational(Q, 2), 3, 2), PreconditionError);
  CHECK_THROWS_AS(build_nested_chain(CycloElement(Q4), 2, 2), std::invalid_argument);
}

TEST_CASE("datum modification") {
  auto Q4 = make_cyclo_field(4);
  auto a = parse_element(Q4, "1+z");
  CHECK(modify_datum(a, {{11, 2}}) == a * CycloElement::rational(Q4, 121));
  auto Q = make_cyclo_field(1);
  CHECK(modify_datum(CycloElement::rational(Q, 2), {{3, 2}, {5, 4}}).rational_value() == 11250);
  CHECK(modify_datum(a, {}) == a);
  CHECK_THROWS_AS(modify_datum(a, {{0, 2}}), std::invalid_argument);
}

TEST_CASE("ramification profiles follow the tame Kummer rule") {
  auto Q4 = make_cyclo_field(4);
  auto base = build_nested_chain(parse_element(Q4, "1+z"), 2, 2, true);
  auto prof = ramification_profile(with_multipliers(base, {{11, 2}}), 11);
  REQUIRE(prof.e.size() == 3);
  CHECK(prof.e[0] == 1);
  CHECK(prof.e[1] == 2);
  auto prof2 = ramification_profile(with_multipliers(base, {{13, 4}}), 13);
  CHECK(prof2.e == std::vector<u64>{1, 1, 2});
  auto prof3 = ramification_profile(base, 7);
  CHECK(prof3.e == std::vector<u64>{1, 1, 1});
  CHECK_THROWS_AS(ramification_profile(base, 2), PreconditionError);
  // oracle: direct valuation arithmetic for many t
  auto Q = make_cyclo_field(1);
  for (u64 p : {2, 3}) {
    auto field = make_cyclo_field(p == 2 ? 1 : 3);
    auto tw = build_nested_chain(CycloElement::rational(field, 7), p, 3, true);
    for (u64 t = 0; t < 30; ++t) {
      auto pr = ramification_profile(with_multipliers(tw, {{5, t}}), 5);
      for (std::size_t j = 0; j < pr.e.size(); ++j) {
        u64 n = 1;
        for (std::size_t i = 0; i <= j; ++i) n *= p;
        u64 g = gcd_u64(n, t == 0 ? n : t);
        CHECK(pr.e[j] == n / g);
        if (j + 1 < pr.e.size()) CHECK(pr.e[j + 1] % pr.e[j] == 0);
      }
    }
  }
  (void)Q;
}

TEST_CASE("fresh prime planner") {
  auto Q = make_cyclo_field(1);
  auto t = build_nested_chain(CycloElement::rational(Q, -1), 2, 2, true);
  auto plan = fresh_prime_plan(t, {2, 5});
  CHECK(plan.primes == std::vector<u64>{3, 7});
  REQUIRE(plan.multipliers.size() == 2);
  CHECK(plan.multipliers[0] == std::pair<mpq_class, u64>{3, 2});
  CHECK(plan.multipliers[1] == std::pair<mpq_class, u64>{7, 4});
  CHECK(plan.certified);
  auto Q3 = make_cyclo_field(3);
  auto t3 = build_nested_chain(parse_element(Q3, "z"), 3, 1, true);
  auto plan3 = fresh_prime_plan(t3, {});
  CHECK(plan3.primes == std::vector<u64>{2});
  CHECK(plan3.multipliers[0].second == 3);
  auto second = fresh_prime_plan(t, {2, 5, 3, 7});
  for (u64 l : second.primes) CHECK((l != 3 && l != 7));
  auto plan_mod = fresh_prime_plan(t3, {}, true);
  CHECK(plan_mod.primes[0] % 3 == 1);
}

TEST_CASE("multipliers leave lower levels unchanged") {
  auto Q4 = make_cyclo_field(4);
  auto base = build_nested_chain(parse_element(Q4, "1+z"), 2, 2, true);
  auto modified = with_multipliers(base, {{3, 2}, {7, 4}});
  auto rt0 = base.radical(), rt1 = modified.radical();
  // exponent p^i keeps the level-(i-1) field: level 0 after (3, 2), level 1 after (7, 4) needs 3 excluded
  for (u64 q : primes_up_to(500)) {
    if (rt0.excluded(q) || rt1.excluded(q)) continue;
    for (unsigned level : {1u}) {
      auto a = traces_at(rt0, q, level), b = traces_at(rt1, q, level);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].degrees == b[i].degrees);
    }
  }
  auto only7 = with_multipliers(base, {{7, 4}});
  auto rt2 = only7.radical();
  for (u64 q : primes_up_to(300)) {
    if (rt0.excluded(q) || rt2.excluded(q)) continue;
    auto a = traces_at(rt0, q, 2), b = traces_at(rt2, q, 2);
    REQUIRE(a.size() == b.size());
    std::vector<std::vector<unsigned>> da, db;
    for (auto& x : a) da.push_back(x.degrees);
    for (auto& x : b) db.push_back(x.degrees);
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    CHECK(da == db);
  }
}

TEST_CASE("trace lifting") {
  auto Q4 = make_cyclo_field(4);
  auto rt = build_nested_chain(parse_element(Q4, "1+z"), 2, 2).radical();
  auto t3 = traces_at(rt, 3, 2);
  REQUIRE(t3.size() == 1);
  CHECK(t3[0].degrees == std::vector<unsigned>{2, 4, 8});
  CHECK(t3[0].norm() == 6561);
  auto b13 = base_traces(rt, 13);
  REQUIRE(b13.size() == 2);
  CHECK(b13[0].zeta.coeffs()[0] == 5);
  CHECK(lift(b13[0], rt).size() == 1);
  CHECK(lift(b13[1], rt).size() == 2);
  for (const auto& t : traces_at(rt, 13, 2)) {
    // relations y_0^2 = 1 + zeta, y_1^2 = y_0
    CHECK(t.roots[0].pow(u64{2}) == t.zeta + ff::FFElement::constant(t.field, 1));
    CHECK(t.roots[1].pow(u64{2}) == t.roots[0]);
  }
}
