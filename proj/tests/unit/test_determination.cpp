#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "determination.hpp"

using namespace kummerlab;
using aut::DirichletCharacter;

namespace {

DirichletCharacter chi5() { return DirichletCharacter::from_generators(5, {1}); }

aut::IsobaricRep rep(const aut::FieldPtr& F, std::vector<DirichletCharacter> chars) {
  std::vector<aut::Component> c;
  for (auto& x : chars) c.push_back({x, 1});
  return aut::make_isobaric(F, c);
}

// Multiset comparison of character values at q^f.
bool classes_agree(const std::vector<DirichletCharacter>& a, const std::vector<DirichletCharacter>& b, u64 x) {
  auto key = [&](const std::vector<DirichletCharacter>& v) {
    std::vector<std::pair<long long, long long>> out;
    for (const auto& c : v) {
      const auto z = c.value(x);
      out.emplace_back(std::llround(z.real() * 1e6), std::llround(z.imag() * 1e6));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return key(a) == key(b);
}

// Contexts shared between test cases; building them dominates the cost.
const det::TheoremAContext& sqrt3_context() {
  static const det::TheoremAContext ctx = det::prepare_context(split::parse_extension("Q(sqrt 3)"), 2, {5, 7, 13}, 1000);
  return ctx;
}

}  // namespace

TEST_CASE("choose_r") {
  CHECK(det::choose_r(2, 2).r == 2);
  CHECK_FALSE(det::choose_r(2, 2).direct);
  CHECK(det::choose_r(3, 2).r == 3);
  CHECK(det::choose_r(2, 5).r == 1);
  CHECK(det::choose_r(2, 5).direct);
  CHECK(det::choose_r(1, 2).direct);
  CHECK(det::choose_r(3, 3).r == 2);

  SUBCASE("least r with p^r > (n^2+1)/2, monotone in n and p") {
    const std::vector<u64> ps{2, 3, 5, 7, 11, 13, 31, 47};
    for (unsigned n = 1; n <= 12; ++n)
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto c = det::choose_r(n, ps[i]);
        double pr = std::pow(double(ps[i]), c.r);
        CHECK(2 * pr > n * n + 1);
        if (c.r > 1) CHECK(2 * pr / ps[i] <= n * n + 1);
        CHECK(c.direct == (c.r == 1 && 2 * ps[i] > n * n + 1));
        if (i + 1 < ps.size()) CHECK(det::choose_r(n, ps[i + 1]).r <= c.r);
        if (n > 1) CHECK(det::choose_r(n - 1, ps[i]).r <= c.r);
      }
  }
}

TEST_CASE("prop21 experiment over Q") {
  const auto Q = aut::FieldModel::rationals();
  const auto chi4 = DirichletCharacter::kronecker(-4);

  const auto iso = det::prop21_experiment(rep(Q, {DirichletCharacter(), chi4}), rep(Q, {DirichletCharacter(), chi4}), 20000);
  CHECK(iso.verdict == det::Verdict::Isomorphic);
  CHECK(iso.d0 == 3);
  CHECK(iso.places_checked > 0);
  CHECK(iso.residual.empty());

  const auto swapped = det::prop21_experiment(rep(Q, {DirichletCharacter(), chi4}), rep(Q, {chi4, DirichletCharacter()}), 20000);
  CHECK(swapped.verdict == det::Verdict::Isomorphic);

  const auto bad = det::prop21_experiment(rep(Q, {DirichletCharacter()}), rep(Q, {chi4}), 200000, {0.1, 0.05, 0.02, 0.01});
  CHECK(bad.verdict == det::Verdict::NotHypothesis);
  REQUIRE(bad.witness);
  CHECK(bad.witness->q == 3);  // least q = 3 mod 4
  CHECK(bad.poles.neg_ord == 2);
  REQUIRE(bad.slope);
  CHECK(std::abs(bad.slope->completed_slope - 2.0) < 0.4);
  CHECK(bad.residual.size() == 1);
  CHECK(bad.residual2.size() == 1);

  SUBCASE("peeling removes the common part") {
    const auto r = det::prop21_experiment(rep(Q, {DirichletCharacter(), chi5()}), rep(Q, {chi5(), chi4}), 2000);
    REQUIRE(r.peeled.size() == 1);
    CHECK(r.peeled[0].chi == chi5());
    REQUIRE(r.residual.size() == 1);
    CHECK(r.residual[0].chi.is_trivial());
    REQUIRE(r.residual2.size() == 1);
    CHECK(r.residual2[0].chi == chi4);
  }
  CHECK_THROWS_AS(det::prop21_experiment(aut::make_isobaric(Q, {{chi4, 1}}, mpq_class(1, 2)), rep(Q, {chi4}), 100),
                  PreconditionError);
}

TEST_CASE("build_L") {
  SUBCASE("K = Q(i): K = E, one chain, fresh primes 3 and 7") {
    const auto K = split::parse_extension("Q(i)");
    const auto plan = det::build_L(K, 2, {5});
    CHECK(plan.K_is_E);
    CHECK(plan.r.r == 2);
    REQUIRE(plan.chains.size() == 1);
    CHECK(plan.chains[0].fresh.primes == std::vector<u64>{3, 7});
    CHECK(plan.chains[0].fresh.certified);
    CHECK(plan.steps.size() == 2);
    CHECK(plan.top() == 3);
    // Q(i) lies in no cyclic quartic field: the chain cannot be repaired
    CHECK_FALSE(plan.chains[0].quartic);
    CHECK_FALSE(plan.obstruction.empty());
  }
  SUBCASE("K = Q(sqrt 3): K != E, chains over Q(i) and Q(sqrt -3)") {
    const auto& plan = sqrt3_context().plan;
    CHECK_FALSE(plan.K_is_E);
    REQUIRE(plan.lattice);
    REQUIRE(plan.chains.size() == 2);
    CHECK(plan.chains[0].subfield == "Q(i)");
    CHECK(plan.chains[1].subfield == "Q(sqrt -3)");
    CHECK_FALSE(plan.chains[0].quartic);
    CHECK(plan.chains[1].quartic);
    CHECK(plan.obstruction.empty());
    CHECK(plan.E_level == 2);
    CHECK(plan.steps.size() == 4);
    std::vector<u64> fresh;
    for (const auto& s : plan.steps) fresh.push_back(s.fresh);
    CHECK(std::is_sorted(fresh.begin(), fresh.end()));
    for (u64 l : fresh) {
      CHECK(l != 2);
      CHECK(l != 3);
    }
    CHECK(plan.field_E->name() == "E");
  }
  SUBCASE("direct case needs no tower") {
    const auto plan = det::build_L(split::parse_extension("Q(zeta_5)(2^(1/5))"), 2);
    CHECK(plan.r.direct);
    CHECK(plan.chains.empty());
    CHECK(plan.steps.empty());
  }
  CHECK_THROWS_AS(det::build_L(split::parse_extension("Q"), 2), PreconditionError);
}

TEST_CASE("prop53 degree certificate") {
  SUBCASE("Q(sqrt 3), X = 1000: every inert prime certified") {
    const auto& C = sqrt3_context();
    const auto& r = C.prop53;
    CHECK(r.ok());
    CHECK(r.inert_checked > 80);
    CHECK(r.inert_certified == r.inert_checked);
    CHECK(r.bound == 4);
    CHECK(r.min_degree >= 4);
    REQUIRE(r.index_counts.size() == 3);
    CHECK(r.index_counts[0] == 0);
    CHECK(r.index_counts[1] + r.index_counts[2] == r.inert_checked);
    CHECK(r.index_counts[1] > 0);
    CHECK(r.index_counts[2] > 0);
  }
  SUBCASE("independent check through the whole compositum") {
    // every prime of L above an inert prime of Q has degree >= 4 over K
    const auto& plan = sqrt3_context().plan;
    const auto& T = *plan.compositum;
    u64 seen = 0;
    for (u64 q : primes_up_to(150)) {
      if (T.excluded(q) || q % 12 == 1 || q % 12 == 11) continue;  // 3 is a square mod q
      for (const auto& w : tower::traces_at(T, q, plan.top())) {
        CHECK(w.degrees[1] == 2);
        CHECK(w.degrees.back() / w.degrees[1] >= 4);
        ++seen;
      }
    }
    CHECK(seen > 0);
  }
  SUBCASE("below the least inert prime the statement is vacuous") {
    const auto r = det::verify_prop53(sqrt3_context().plan, 4);
    CHECK(r.ok());
    CHECK(r.inert_checked == 0);
  }
  SUBCASE("corrupted plan is flagged") {
    const auto bad = det::corrupt_plan(sqrt3_context().plan);
    CHECK(bad.corrupted);
    const auto r = det::verify_prop53(bad, 300);
    CHECK_FALSE(r.ok());
    CHECK(r.inert_certified < r.inert_checked);
  }
  SUBCASE("Q(i): every inert prime splits at the first chain layer") {
    const auto plan = det::build_L(split::parse_extension("Q(i)"), 2, {5});
    const auto r = det::verify_prop53(plan, 300);
    CHECK_FALSE(r.ok());
    CHECK(r.inert_certified == 0);
    CHECK(r.exceptions.size() == r.inert_checked);
  }
  SUBCASE("p = 2, K = E over Q(zeta_3): the repaired chain certifies") {
    const auto plan = det::build_L(split::parse_extension("Q(zeta_3)(3^(1/2))"), 2);
    CHECK(plan.K_is_E);
    CHECK(plan.chains[0].quartic);
    const auto r = det::verify_prop53(plan, 500);
    CHECK(r.ok());
    CHECK(r.inert_checked > 0);
  }
  SUBCASE("odd p needs no repair") {
    for (const char* k : {"Q(zeta_3)(z^(1/3))", "Q(zeta_3)(2^(1/3))"}) {
      const auto plan = det::build_L(split::parse_extension(k), 3);
      CHECK(plan.r.r == 2);
      for (const auto& ch : plan.chains) CHECK_FALSE(ch.quartic);
      const auto r = det::verify_prop53(plan, 400);
      CHECK(r.ok());
      CHECK(r.inert_checked > 0);
    }
  }
}

TEST_CASE("descent through the chain") {
  const auto plan = det::build_L(split::parse_extension("Q(i)"), 2, {5});
  const auto a = rep(plan.field_E, {DirichletCharacter(), chi5()});

  SUBCASE("equal pair, fresh primes 3 and 7: j = 0 at both steps") {
    const auto cert = det::descent_6(a, a, plan);
    CHECK(cert.premise);
    CHECK(cert.ok);
    CHECK(cert.fresh_increasing);
    REQUIRE(cert.steps.size() == 2);
    CHECK(cert.steps[0].fresh == 7);  // top-down
    CHECK(cert.steps[1].fresh == 3);
    for (const auto& st : cert.steps) {
      CHECK(st.ok);
      CHECK(st.pairs.size() == 2);
      for (const auto& te : st.pairs) {
        CHECK(te.j == 0);
        CHECK(te.forced);
      }
    }
    SUBCASE("K = E: the final descent is a passthrough") {
      const auto aK = rep(plan.field_K, {DirichletCharacter(), chi5()});
      const auto d7 = det::descent_7(plan, det::compute_hypothesis(plan.K, aK, aK, 2000), aK, aK, cert);
      CHECK(d7.passthrough);
      CHECK(d7.verdict == det::Verdict::Equal);
    }
  }
  SUBCASE("pair differing by the step character is rejected") {
    const auto delta = aut::order_p_character(7, 2);
    const auto b = rep(plan.field_E, {delta, chi5() * delta});
    const auto cert = det::descent_6(a, b, plan);
    CHECK_FALSE(cert.ok);
    CHECK_FALSE(cert.failure.empty());
  }
  SUBCASE("no chain: the certificate is the input equality") {
    const auto direct = det::build_L(split::parse_extension("Q(i)"), 1);
    REQUIRE(direct.steps.empty());
    const auto x = rep(direct.field_E, {chi5()});
    const auto cert = det::descent_6(x, x, direct);
    CHECK(cert.ok);
    CHECK(cert.steps.empty());
    CHECK_FALSE(det::descent_6(x, rep(direct.field_E, {chi5().pow(2)}), direct).ok);
  }
  SUBCASE("fresh primes avoid the conductors in the certificate") {
    const auto& p3 = sqrt3_context().plan;
    const auto e = rep(p3.field_E, {DirichletCharacter(), chi5()});
    const auto cert = det::descent_6(e, e, p3);
    CHECK(cert.ok);
    CHECK(cert.fresh_increasing);
    CHECK(cert.steps.size() == 4);
  }
}

TEST_CASE("final descent over Q(sqrt 3)") {
  const auto& C = sqrt3_context();
  const auto FK = C.plan.field_K;
  const auto a = rep(FK, {DirichletCharacter(), chi5()});
  const auto hyp = det::compute_hypothesis(C.plan.K, a, a, 10000);
  CHECK(hyp.holds());
  const auto cert = det::descent_6(rep(C.plan.field_E, {DirichletCharacter(), chi5()}),
                                   rep(C.plan.field_E, {DirichletCharacter(), chi5()}), C.plan);
  REQUIRE(cert.ok);
  const auto d7 = det::descent_7(C.plan, hyp, a, a, cert);
  CHECK_FALSE(d7.passthrough);
  CHECK(d7.verdict == det::Verdict::Equal);
  CHECK(d7.sigmap_checked > 0);
  CHECK(d7.sigmap_agree == d7.sigmap_checked);
  CHECK(d7.exceptions.empty());

  SUBCASE("a genuine Sigma^1 disagreement gives the witness") {
    const auto b = rep(FK, {DirichletCharacter(), chi5().pow(2)});
    const auto h2 = det::compute_hypothesis(C.plan.K, a, b, 10000);
    REQUIRE_FALSE(h2.holds());
    // least q split in Q(sqrt 3) (q = +-1 mod 12) where the classes differ
    u64 expect = 0;
    for (u64 q : primes_up_to(1000))
      if ((q % 12 == 1 || q % 12 == 11) && q != 5 &&
          !classes_agree({DirichletCharacter(), chi5()}, {DirichletCharacter(), chi5().pow(2)}, q)) {
        expect = q;
        break;
      }
    CHECK(h2.witness->q == expect);
    const auto d = det::descent_7(C.plan, h2, a, b, cert);
    CHECK(d.verdict == det::Verdict::NotHypothesis);
    REQUIRE(d.witness);
    CHECK(d.witness->q == expect);
  }
}

TEST_CASE("theorem A pipeline") {
  SUBCASE("Q(sqrt 3): 1 + chi_5 against itself is EQUAL with every stage certified") {
    const auto& C = sqrt3_context();
    const auto K = C.plan.K;
    const auto a = rep(C.plan.field_K, {DirichletCharacter(), chi5()});
    const auto r = det::theorem_a(K, a, a, {}, &C);
    CHECK(r.verdict == det::Verdict::Equal);
    CHECK(r.corollary_b);
    REQUIRE(r.prop53);
    CHECK(r.prop53->ok());
    REQUIRE(r.prop21_L);
    CHECK(r.prop21_L->ok());
    REQUIRE(r.descent6);
    CHECK(r.descent6->ok);
    REQUIRE(r.descent7);
    CHECK(r.descent7->verdict == det::Verdict::Equal);
    std::vector<std::string> names;
    for (const auto& s : r.stages) names.push_back(s.name);
    CHECK(names == std::vector<std::string>{"normalization", "hypothesis", "lemma54", "choose_r", "build_L", "prop53",
                                            "prop21_L", "descent_6", "descent_7", "twist"});
  }
  SUBCASE("components differing by the character of K/Q") {
    const auto& C = sqrt3_context();
    const auto chiK = DirichletCharacter::kronecker(12);
    const auto a = rep(C.plan.field_K, {DirichletCharacter(), chi5()});
    const auto b = rep(C.plan.field_K, {chiK, chi5() * chiK});
    const auto r = det::theorem_a(C.plan.K, a, b, {}, &C);
    CHECK(r.verdict == det::Verdict::Equal);
    CHECK(r.corollary_b);
    // over Q the two differ at every prime inert in K
    const auto Q = aut::FieldModel::rationals();
    CHECK_FALSE(aut::same_rep(rep(Q, {DirichletCharacter(), chi5()}), rep(Q, {chiK, chi5() * chiK})));
  }
  SUBCASE("Q(i): twist by the quadratic character mod 13 breaks the hypothesis") {
    const auto K = split::parse_extension("Q(i)");
    const auto F = aut::FieldModel::cyclic(K);
    const auto chi13 = DirichletCharacter::kronecker(13);
    const std::vector<DirichletCharacter> xa{DirichletCharacter(), chi5()}, xb{chi13, chi5() * chi13};
    const auto r = det::theorem_a(K, rep(F, xa), rep(F, xb));
    CHECK(r.verdict == det::Verdict::NotHypothesis);
    CHECK(det::exit_code(r.verdict) == 2);
    u64 expect = 0;
    for (u64 q : primes_up_to(1000))
      if (q % 4 == 1 && q != 5 && q != 13 && !classes_agree(xa, xb, q)) {
        expect = q;
        break;
      }
    REQUIRE(r.hypothesis.witness);
    CHECK(r.hypothesis.witness->q == expect);
    CHECK(expect == 37);
  }
  SUBCASE("Q(i), n = 2: no admissible tower, INCONCLUSIVE at prop53") {
    const auto K = split::parse_extension("Q(i)");
    const auto F = aut::FieldModel::cyclic(K);
    const auto a = rep(F, {DirichletCharacter(), chi5()});
    det::TheoremAOptions opt;
    opt.X = 20000;
    opt.X_prop53 = 300;
    const auto r = det::theorem_a(K, a, a, opt);
    CHECK(r.verdict == det::Verdict::Inconclusive);
    CHECK(det::exit_code(r.verdict) == 3);
    REQUIRE_FALSE(r.stages.empty());
    CHECK(r.stages.back().name == "prop53");
    CHECK(r.stages.back().verdict == "FAIL");
  }
  SUBCASE("Q(i), n = 1: direct case") {
    const auto K = split::parse_extension("Q(i)");
    const auto F = aut::FieldModel::cyclic(K);
    const auto r = det::theorem_a(K, rep(F, {chi5()}), rep(F, {chi5() * DirichletCharacter::kronecker(-4)}));
    CHECK(r.verdict == det::Verdict::Equal);
    CHECK(r.prop21_direct);
    CHECK(r.corollary_b);
  }
  SUBCASE("soundness: EQUAL only for model-equal pairs") {
    const auto& C = sqrt3_context();
    const auto F = C.plan.field_K;
    const auto chiK = DirichletCharacter::kronecker(12);
    const auto chi7 = DirichletCharacter::from_generators(7, {1});
    const std::vector<std::pair<std::vector<DirichletCharacter>, std::vector<DirichletCharacter>>> pairs{
        {{chi7, chi5()}, {chi7 * chiK, chi5()}},
        {{chi7, chi7.pow(2)}, {chi7.pow(2), chi7}},
        {{chi5(), DirichletCharacter()}, {chi5().pow(3), DirichletCharacter()}},
    };
    for (const auto& [x, y] : pairs) {
      const auto r = det::theorem_a(C.plan.K, rep(F, x), rep(F, y), {}, &C);
      const bool oracle = aut::same_rep(rep(F, x), rep(F, y));
      if (r.verdict == det::Verdict::Equal) CHECK(oracle);
      if (oracle) CHECK(r.verdict != det::Verdict::NotHypothesis);
    }
  }
  CHECK(det::to_string(det::Verdict::TwistEquivalent) == "TWIST-EQUIVALENT");
  CHECK(det::exit_code(det::Verdict::Equal) == 0);
}
