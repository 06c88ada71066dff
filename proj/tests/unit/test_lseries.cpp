#include <doctest.h>

#include <random>

#include "lseries.hpp"

using namespace kummerlab;
using aut::DirichletCharacter;

namespace {

aut::FieldPtr QQ() { return aut::FieldModel::rationals(); }
DirichletCharacter chi4() { return DirichletCharacter::kronecker(-4); }
aut::IsobaricRep rep(std::vector<aut::Component> cs, aut::FieldPtr F = QQ()) { return aut::make_isobaric(F, cs); }

ls::PrimeSelector all_primes(u64 X, aut::FieldPtr F = QQ()) {
  ls::PrimeSelector s;
  s.field = F;
  s.X = X;
  return s;
}

// Z coefficient for 1 vs chi_4 from the closed form.
double z_one_chi4(u64 q, u64 r) { return (q % 4 == 3 && r % 2 == 1) ? 4.0 / static_cast<double>(r) : 0.0; }

// (1/r)|sum chi_i(q)^r - sum chi'_j(q)^r|^2 from character values directly.
double z_direct(const std::vector<DirichletCharacter>& a, const std::vector<DirichletCharacter>& b, u64 q, u64 r) {
  std::complex<double> d = 0;
  for (const auto& c : a) d += std::pow(c.value(q), static_cast<int>(r));
  for (const auto& c : b) d -= std::pow(c.value(q), static_cast<int>(r));
  return std::norm(d) / static_cast<double>(r);
}

DirichletCharacter random_char(std::mt19937_64& rng) {
  static const u64 moduli[] = {3, 4, 5, 7, 8, 9, 13};
  const u64 N = moduli[rng() % 7];
  const auto gens = aut::unit_generators(N);
  std::vector<u64> e;
  for (const auto& g : gens) e.push_back(rng() % g.order);
  return DirichletCharacter::from_generators(N, e);
}

}  // namespace

TEST_CASE("Y coefficients of the trivial pair") {
  const auto one = rep({{DirichletCharacter(), 1}});
  auto sel = all_primes(100);
  sel.only = std::set<u64>{3};
  auto c = ls::rs_coeffs(one, one, sel, 30, ls::SeriesKind::Y);
  REQUIRE(c.coeffs.size() == 3);
  CHECK(c.at(3).rational_value() == 1);
  CHECK(c.at(9).rational_value() == mpq_class(1, 2));
  CHECK(c.at(27).rational_value() == mpq_class(1, 3));
  CHECK(c.at(81).is_zero());
  CHECK(c.at(5).is_zero());

  auto full = ls::rs_coeffs(one, one, all_primes(2000), 2000, ls::SeriesKind::Y);
  for (const auto& [m, v] : full.coeffs) {
    // m = q^r, c = 1/r
    u64 q = 2;
    while (m % q) ++q;
    u64 r = 0, x = m;
    while (x % q == 0) {
      x /= q;
      ++r;
    }
    CHECK(x == 1);
    CHECK(v.rational_value() == mpq_class(1, static_cast<unsigned long>(r)));
  }
}

TEST_CASE("Z coefficients") {
  const auto one = rep({{DirichletCharacter(), 1}});
  const auto c4 = rep({{chi4(), 1}});
  auto sel = all_primes(5000).excluding_ramified(one, c4);
  auto z = ls::rs_coeffs(one, c4, sel, 5000);
  CHECK(z.at(3).rational_value() == 4);
  CHECK(z.at(9).is_zero());
  CHECK(z.at(27).rational_value() == mpq_class(4, 3));
  for (const auto& [m, v] : z.coeffs) {
    u64 q = 2;
    while (m % q) ++q;
    u64 r = 0, x = m;
    while (x % q == 0) {
      x /= q;
      ++r;
    }
    CHECK(v.embed(1).real() == doctest::Approx(z_one_chi4(q, r)));
  }
  auto same = ls::rs_coeffs(c4, c4, sel, 5000);
  for (const auto& [m, v] : same.coeffs) CHECK(v.is_zero());

  // against character values for random pairs
  std::mt19937_64 rng(3);
  for (int it = 0; it < 8; ++it) {
    std::vector<DirichletCharacter> A{random_char(rng), random_char(rng)}, B{random_char(rng), random_char(rng)};
    const auto a = rep({{A[0], 1}, {A[1], 1}}), b = rep({{B[0], 1}, {B[1], 1}});
    auto s = all_primes(3000).excluding_ramified(a, b);
    auto zz = ls::rs_coeffs(a, b, s, 3000);
    for (const auto& [m, v] : zz.coeffs) {
      u64 q = 2;
      while (m % q) ++q;
      u64 r = 0, x = m;
      while (x % q == 0) {
        x /= q;
        ++r;
      }
      CHECK(std::abs(v.embed(1) - z_direct(A, B, q, r)) < 1e-9);
    }
  }

  CHECK_THROWS_AS(ls::rs_coeffs(one, c4, all_primes(100), 100), PreconditionError);
  const auto tw = aut::make_isobaric(QQ(), {{chi4(), 1}}, mpq_class(1, 5));
  CHECK_THROWS_AS(ls::rs_coeffs(one, tw, sel, 100), PreconditionError);
}

TEST_CASE("selector additivity") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 5; ++it) {
    const auto a = rep({{random_char(rng), 1}, {random_char(rng), 1}});
    const auto b = rep({{random_char(rng), 2}});
    auto base = all_primes(2000).excluding_ramified(a, b);
    std::set<u64> y1, y2;
    for (u64 q : primes_up_to(2000)) (rng() % 2 ? y1 : y2).insert(q);
    auto s1 = base, s2 = base;
    s1.only = y1;
    s2.only = y2;
    for (auto kind : {ls::SeriesKind::Y, ls::SeriesKind::Z}) {
      auto whole = ls::rs_coeffs(a, b, base, 2000, kind);
      auto sum = ls::add_series(ls::rs_coeffs(a, b, s1, 2000, kind), ls::rs_coeffs(a, b, s2, 2000, kind));
      REQUIRE(whole.coeffs.size() == sum.coeffs.size());
      for (const auto& [m, v] : whole.coeffs) CHECK(sum.at(m) == v);
    }
  }
}

TEST_CASE("positivity") {
  const auto one = rep({{DirichletCharacter(), 1}});
  const auto c4 = rep({{chi4(), 1}});
  auto sel = all_primes(1000).excluding_ramified(one, c4);
  auto p = ls::positivity_check(one, c4, sel, 1000);
  CHECK(p.ok());
  CHECK(p.min_value == 0);  // m = 9: (1/2)|1 - 1|^2
  auto z = ls::rs_coeffs(one, c4, sel, 1000);
  CHECK(z.at(9).is_zero());
  auto same = ls::positivity_check(c4, c4, sel, 1000);
  CHECK(same.ok());
  CHECK(same.nonzero == 0);
  std::mt19937_64 rng(23);
  for (int it = 0; it < 6; ++it) {
    const auto a = rep({{random_char(rng), 1}, {random_char(rng), 1}, {random_char(rng), 1}});
    const auto b = rep({{random_char(rng), 1}, {random_char(rng), 2}});
    auto s = all_primes(1500).excluding_ramified(a, b);
    auto r = ls::positivity_check(a, b, s, 1500);
    CHECK(r.ok());
    CHECK(r.min_value >= -1e-12);
    CHECK(r.checked > 200);
  }
}

TEST_CASE("pole book") {
  const auto chi7 = DirichletCharacter::from_generators(7, {2});
  auto b1 = ls::pole_book(rep({{chi7, 1}}), rep({{chi7, 1}}));
  CHECK(b1.mu == 1);
  CHECK(b1.mu2 == 1);
  CHECK(b1.shared == 1);
  CHECK(b1.neg_ord == 0);
  auto b2 = ls::pole_book(rep({{DirichletCharacter(), 2}}), rep({{chi4(), 2}}));
  CHECK(b2.mu == 4);
  CHECK(b2.mu2 == 4);
  CHECK(b2.shared == 0);
  CHECK(b2.neg_ord == 8);
  auto b3 = ls::pole_book(rep({{DirichletCharacter(), 1}, {chi4(), 1}}),
                          rep({{chi4(), 1}, {DirichletCharacter::kronecker(8), 1}}));
  CHECK(b3.mu == 2);
  CHECK(b3.mu2 == 2);
  CHECK(b3.shared == 1);
  CHECK(b3.neg_ord == 2);
  // over Q(i), 1 and chi_4 become equal
  const auto Ki = aut::FieldModel::cyclic(split::parse_extension("Q(i)"));
  auto b4 = ls::pole_book(rep({{DirichletCharacter(), 1}}, Ki), rep({{chi4(), 1}}, Ki));
  CHECK(b4.neg_ord == 0);
  CHECK_THROWS_AS(ls::pole_book(aut::make_isobaric(QQ(), {{chi4(), 1}}, mpq_class(1, 3)), rep({{chi4(), 1}})),
                  PreconditionError);
}

TEST_CASE("tail threshold") {
  CHECK(ls::tail_threshold(1) == 2);
  CHECK(ls::tail_threshold(2) == 3);
  CHECK(ls::tail_threshold(3) == 6);
  for (unsigned n = 1; n < 20; ++n) {
    const unsigned d = ls::tail_threshold(n);
    CHECK(2 * d > n * n + 1);
    CHECK(2 * (d - 1) <= n * n + 1);
  }
}

TEST_CASE("log partial Z") {
  const auto one = rep({{DirichletCharacter(), 1}});
  const auto c4 = rep({{chi4(), 1}});
  auto sel = all_primes(100000).excluding_ramified(one, c4);
  CHECK(ls::log_partial_Z(c4, c4, sel, 1.1) == 0);
  auto empty = sel;
  empty.only = std::set<u64>{};
  CHECK(ls::log_partial_Z(one, c4, empty, 1.1) == 0);
  CHECK_THROWS_AS(ls::log_partial_Z(one, c4, sel, 1.0), std::invalid_argument);

  const auto terms = ls::z_terms(one, c4, sel);
  double prev = 0;
  for (double s : {1.5, 1.3, 1.2, 1.1, 1.05}) {
    const double z = ls::eval_terms(terms, s);
    CHECK(z > prev);
    prev = z;
  }
  // closed form
  double oracle = 0;
  for (u64 q : primes_up_to(100000)) {
    if (q % 4 != 3) continue;
    double m = q;
    for (u64 r = 1; m <= 100000; r += 1, m *= q) oracle += z_one_chi4(q, r) * std::pow(m, -1.1);
  }
  CHECK(ls::eval_terms(terms, 1.1) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("slope of log Z near s = 1") {
  const auto one = rep({{DirichletCharacter(), 1}});
  const auto c4 = rep({{chi4(), 1}});
  auto sel = all_primes(200000).excluding_ramified(one, c4);
  auto r = ls::slope_experiment(one, c4, sel, {0.1, 0.05, 0.02, 0.01});
  REQUIRE(r.predicted);
  CHECK(*r.predicted == 2);
  CHECK(r.tail_mean == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(r.completed_slope - 2.0) < std::abs(r.raw_slope - 2.0));
  CHECK(std::abs(r.completed_slope - 2.0) < 0.4);
  for (const auto& row : r.rows) CHECK(row.completed > row.raw);
  CHECK_THROWS_AS(ls::slope_experiment(one, c4, sel, {0.1}), std::invalid_argument);
}

TEST_CASE("tail convergence") {
  const auto Ki = aut::FieldModel::cyclic(split::parse_extension("Q(i)"));
  const auto one = rep({{DirichletCharacter(), 1}}, Ki);
  const auto c3 = rep({{DirichletCharacter::kronecker(-3), 1}}, Ki);
  ls::PrimeSelector sel;
  sel.field = Ki;
  sel.X = 100000;
  sel.degrees = std::set<unsigned>{3, 4};
  sel.over = ls::DegreeBase::Rational;
  sel = sel.excluding_ramified(one, c3);
  auto rep1 = ls::tail_convergence_report(one, c3, 2, sel, {1.1, 1.05});
  CHECK(rep1.places == 0);
  for (const auto& row : rep1.rows) CHECK(row.ratio == 0);

  auto F = cyclo::make_cyclo_field(4);
  tower::RadicalTower T(F, 2, {tower::RadicalStep{cyclo::parse_element(F, "1+z"), {}, ""}});
  const auto M = aut::FieldModel::radical(T, 1, "Q(i)(sqrt(1+i))");
  const auto a = rep({{DirichletCharacter(), 1}, {DirichletCharacter::kronecker(-3), 1}}, M);
  const auto b = rep({{DirichletCharacter::kronecker(5), 1}, {DirichletCharacter::from_generators(7, {1}), 1}}, M);
  ls::PrimeSelector s4;
  s4.field = M;
  s4.X = 1000000;
  s4.degrees = std::set<unsigned>{4};
  s4.over = ls::DegreeBase::Rational;
  s4 = s4.excluding_ramified(a, b);
  auto rep2 = ls::tail_convergence_report(a, b, 2, s4, {1.2, 1.1, 1.05});
  CHECK(rep2.places > 0);
  CHECK(rep2.rows.back().ratio < 0.2);
  CHECK(rep2.rows.back().ratio >= 0);
  CHECK(ls::tail_convergence_report(a, a, 2, s4, {1.05}).rows[0].log_Z == 0);

  auto low = s4;
  low.degrees = std::set<unsigned>{2, 4};
  CHECK_THROWS_AS(ls::tail_convergence_report(a, b, 2, low, {1.05}), std::invalid_argument);
}
