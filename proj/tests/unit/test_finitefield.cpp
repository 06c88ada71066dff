#include <doctest.h>

#include <set>

#include "finitefield.hpp"

using namespace kummerlab;
using namespace kummerlab::ff;

namespace {

// Brute-force irreducibility: no monic factor of degree <= deg/2.
bool irreducible_by_trial(u64 q, const Coeffs& f) {
  const unsigned d = f.size() - 1;
  for (unsigned k = 1; k <= d / 2; ++k) {
    u64 count = 1;
    for (unsigned i = 0; i < k; ++i) count *= q;
    for (u64 idx = 0; idx < count; ++idx) {
      Coeffs g(k + 1, 0);
      g[k] = 1;
      u64 v = idx;
      for (unsigned i = 0; i < k; ++i, v /= q) g[i] = v % q;
      Coeffs r = f;
      for (int i = d; i >= static_cast<int>(k); --i) {
        u64 c = r[i] % q;
        for (unsigned j = 0; j <= k; ++j) r[i - k + j] = (r[i - k + j] + q * q - c * g[j] % q) % q;
      }
      bool zero = true;
      for (unsigned i = 0; i < k; ++i) zero = zero && r[i] % q == 0;
      if (zero) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("canonical moduli") {
  CHECK(make_ext_field(3, 2)->modulus() == Coeffs{1, 0, 1});
  CHECK(make_ext_field(5, 1)->modulus() == Coeffs{0, 1});
  CHECK(make_ext_field(2, 3)->modulus() == Coeffs{1, 1, 0, 1});
  CHECK(make_ext_field(3, 2).get() == make_ext_field(3, 2).get());
  CHECK_THROWS_AS(make_ext_field(4, 2), std::invalid_argument);
}

TEST_CASE("least irreducible agrees with trial division") {
  for (u64 q : {2, 3, 5}) {
    for (unsigned d = 2; d <= 4; ++d) {
      Coeffs f = least_irreducible(q, d);
      CHECK(irreducible_by_trial(q, f));
      // every lexicographically smaller monic is reducible
      u64 count = 1;
      for (unsigned i = 0; i < d; ++i) count *= q;
      for (u64 idx = 0; idx < count; ++idx) {
        Coeffs g(d + 1, 0);
        g[d] = 1;
        u64 v = idx;
        for (unsigned i = 0; i < d; ++i, v /= q) g[i] = v % q;
        bool smaller = std::lexicographical_compare(g.rbegin(), g.rend(), f.rbegin(), f.rend());
        if (smaller) CHECK_FALSE(irreducible_by_trial(q, g));
        CHECK(is_irreducible(q, g) == irreducible_by_trial(q, g));
      }
    }
  }
}

TEST_CASE("p-th powers in small fields") {
  auto f7 = make_ext_field(7, 1);
  CHECK_FALSE(is_pth_power(FFElement::constant(f7, 2), 3).value);
  CHECK(is_pth_power(FFElement::constant(f7, 2), 5).value);
  auto zero = is_pth_power(FFElement(f7), 3);
  CHECK(zero.value);
  CHECK(zero.zero_input);

  auto f9 = make_ext_field(3, 2);
  FFElement one_plus_i(f9, {1, 1});
  CHECK_FALSE(is_pth_power(one_plus_i, 2).value);
  CHECK(mult_order(one_plus_i) == 8);
  CHECK(mult_order(FFElement::constant(f7, 2)) == 3);

  auto f5 = make_ext_field(5, 1);
  auto r = pth_roots(FFElement::constant(f5, 4), 2);
  REQUIRE(r.size() == 2);
  CHECK(r[0].coeffs()[0] == 2);
  CHECK(r[1].coeffs()[0] == 3);
  CHECK(pth_roots(FFElement::constant(f5, 2), 2).empty());
  auto cube_roots = pth_roots(FFElement::constant(f7, 1), 3);
  REQUIRE(cube_roots.size() == 3);
  CHECK(cube_roots[0].coeffs()[0] == 1);
  CHECK(cube_roots[1].coeffs()[0] == 2);
  CHECK(cube_roots[2].coeffs()[0] == 4);
}

TEST_CASE("field axioms and inverse") {
  for (auto [q, d] : std::vector<std::pair<u64, unsigned>>{{2, 5}, {3, 3}, {7, 2}, {101, 3}}) {
    auto F = make_ext_field(q, d);
    for (unsigned long k = 1; k < 60; ++k) {
      FFElement a = FFElement::from_index(F, mpz_class(k * 7919ul) % F->order());
      FFElement b = FFElement::from_index(F, mpz_class(k * 104729ul + 3) % F->order());
      CHECK(a * b == b * a);
      CHECK((a + b) * a == a * a + b * a);
      if (!a.is_zero()) CHECK((a * a.inverse()).is_one());
      CHECK(a.frobenius() == a.pow(q));
      CHECK(a.pow(F->order()) == a);
      CHECK(FFElement::from_index(F, a.index()) == a);
    }
  }
}

TEST_CASE("pth_roots matches exhaustion in mid-sized fields") {
  // Fields above the exhaustion threshold, checked against direct search.
  for (auto [q, d, p] : std::vector<std::tuple<u64, unsigned, u64>>{
           {7, 5, 3}, {3, 8, 2}, {5, 6, 3}, {2, 13, 3}, {8191, 1, 3}, {4099, 1, 2}, {13, 4, 3}}) {
    auto F = make_ext_field(q, d);
    for (unsigned long k = 1; k < 12; ++k) {
      FFElement x = FFElement::from_index(F, mpz_class(k * 7919ul + 11) % F->order());
      if (x.is_zero()) continue;
      FFElement y = x.pow(p);
      auto roots = pth_roots(y, p);
      std::set<mpz_class> got;
      for (auto& r : roots) {
        CHECK(r.pow(p) == y);
        got.insert(r.index());
      }
      CHECK(got.count(x.index()) == 1);
      CHECK(std::is_sorted(roots.begin(), roots.end()));
      // number of roots is gcd(p, Q - 1)
      bool divides = mpz_divisible_ui_p(mpz_class(F->order() - 1).get_mpz_t(), p);
      CHECK(roots.size() == (divides ? p : 1u));
      if (!is_pth_power(x, p).value) CHECK(pth_roots(x, p).empty());
    }
  }
}

TEST_CASE("canonical embedding is the least root of the small modulus") {
  for (auto [q, e, d] : std::vector<std::tuple<u64, unsigned, unsigned>>{
           {3, 2, 4}, {2, 2, 6}, {2, 3, 6}, {5, 2, 4}, {7, 3, 6}, {3, 3, 9}, {2, 1, 4}}) {
    auto small = make_ext_field(q, e);
    auto big = make_ext_field(q, d);
    auto emb = canonical_embedding(q, e, d);
    auto roots = roots_by_exhaustion(small->modulus(), big);
    REQUIRE(!roots.empty());
    CHECK(emb->generator_image() == roots.front());
    // ring homomorphism on samples
    for (unsigned long k = 0; k < 20; ++k) {
      FFElement a = FFElement::from_index(small, mpz_class(k * 31 + 1) % small->order());
      FFElement b = FFElement::from_index(small, mpz_class(k * 17 + 5) % small->order());
      CHECK(emb->apply(a * b) == emb->apply(a) * emb->apply(b));
      CHECK(emb->apply(a + b) == emb->apply(a) + emb->apply(b));
    }
  }
}

TEST_CASE("embedding into large fields") {
  auto emb = canonical_embedding(7, 6, 18);
  auto small = make_ext_field(7, 6);
  CHECK(evaluate(small->modulus(), emb->generator_image()).is_zero());
  FFElement g = emb->generator_image();
  for (unsigned k = 1; k < 6; ++k) CHECK_FALSE(g.frobenius(k) < g);
}
