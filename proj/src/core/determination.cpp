#include "determination.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace kummerlab::det {

using aut::IsobaricRep;
using cyclo::CycloElement;

namespace {

u64 ipow(u64 b, u64 e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "EQUAL";
    case Verdict::TwistEquivalent: return "TWIST-EQUIVALENT";
    case Verdict::Isomorphic: return "ISOMORPHIC";
    case Verdict::NotHypothesis: return "NOT-HYPOTHESIS";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Equal:
    case Verdict::TwistEquivalent:
    case Verdict::Isomorphic: return 0;
    case Verdict::NotHypothesis: return 2;
    case Verdict::Inconclusive: return 3;
  }
  return 3;
}

RChoice choose_r(unsigned n, u64 p) {
  if (n < 1) throw std::invalid_argument("choose_r: n >= 1");
  if (!is_prime(p)) throw std::invalid_argument("choose_r: p must be prime");
  // p^r > (n^2+1)/2  <=>  2 p^r > n^2 + 1
  const mpz_class bound = mpz_class(n) * n + 1;
  RChoice c;
  mpz_class pr = p;
  c.r = 1;
  while (2 * pr <= bound) {
    pr *= static_cast<unsigned long>(p);
    ++c.r;
  }
  c.direct = c.r == 1;
  return c;
}

namespace {

IsobaricRep rebase(const IsobaricRep& pi, aut::FieldPtr F, std::optional<mpq_class> t = std::nullopt) {
  return aut::make_isobaric(std::move(F), pi.components(), t ? *t : pi.t());
}

std::vector<aut::DirichletCharacter> expand(const IsobaricRep& pi) {
  std::vector<aut::DirichletCharacter> out;
  for (const auto& c : pi.components())
    for (unsigned i = 0; i < c.mult; ++i) out.push_back(c.chi);
  return out;
}

std::vector<aut::Component> collect(const std::vector<aut::DirichletCharacter>& chars) {
  std::vector<aut::Component> out;
  for (const auto& c : chars) {
    if (!out.empty() && out.back().chi == c)
      ++out.back().mult;
    else
      out.push_back({c, 1});
  }
  return out;
}

std::string describe_classes(const aut::SatakeClass& A, const aut::SatakeClass& B) {
  auto one = [](const aut::SatakeClass& S) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < S.eigenvalues.size(); ++i)
      os << (i ? "," : "") << "e(" << S.eigenvalues[i].angle.get_str() << ")";
    os << "}";
    return os.str();
  };
  return one(A) + " vs " + one(B);
}

bool requires_unitary_same_field(const IsobaricRep& a, const IsobaricRep& b) {
  return a.unitary() && b.unitary() && a.field()->name() == b.field()->name();
}

}  // namespace

std::vector<u64> conductor_primes(const IsobaricRep& a, const IsobaricRep& b) {
  std::set<u64> s;
  for (const auto* r : {&a, &b})
    for (const auto& c : r->components())
      for (const auto& [l, e] : factor_u64(c.chi.modulus())) s.insert(l);
  return {s.begin(), s.end()};
}

AgreementHypothesis compute_hypothesis(const split::CyclicExtension& K, const IsobaricRep& pi, const IsobaricRep& pi2,
                                       u64 X) {
  if (pi.n() != pi2.n()) throw std::invalid_argument("compute_hypothesis: ranks differ");
  AgreementHypothesis h;
  h.K = K.name;
  h.p = K.p;
  h.X = X;
  const auto F = aut::FieldModel::cyclic(K);
  const auto a = rebase(pi, F), b = rebase(pi2, F);
  const auto qs = primes_up_to(X);
  struct Slot {
    bool skipped = false;
    u64 c1 = 0, a1 = 0, cp = 0, ap = 0;
    std::optional<Witness> w1, wp;
  };
  std::vector<Slot> slots(qs.size());
  parallel_for(qs.size(), [&](std::size_t i) {
    const u64 q = qs[i];
    auto& s = slots[i];
    if (F->excluded(q) || !aut::unramified_at(a, q) || !aut::unramified_at(b, q)) {
      s.skipped = true;
      return;
    }
    for (const auto& v : F->places(q)) {
      if (!(v.norm() <= X)) continue;
      const auto A = aut::satake(a, v), B = aut::satake(b, v);
      const bool same = A.same_multiset(B);
      const bool deg1 = v.f_rel == 1;
      (deg1 ? s.c1 : s.cp)++;
      if (same) {
        (deg1 ? s.a1 : s.ap)++;
      } else {
        auto& w = deg1 ? s.w1 : s.wp;
        if (!w) w = Witness{q, v.f, v.f_rel, describe_classes(A, B)};
      }
    }
  });
  DegreeTable t1{1, 0, 0}, tp{static_cast<unsigned>(K.p), 0, 0};
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& s = slots[i];
    if (s.skipped) {
      h.exceptions.push_back(qs[i]);
      continue;
    }
    t1.checked += s.c1;
    t1.agreed += s.a1;
    tp.checked += s.cp;
    tp.agreed += s.ap;
    if (s.w1 && !h.witness) h.witness = s.w1;
    if (s.wp && !h.witness_p) h.witness_p = s.wp;
  }
  h.tables = {t1, tp};
  return h;
}

Prop21Report prop21_experiment(const IsobaricRep& pi, const IsobaricRep& pi2, u64 X, const std::vector<double>& eps) {
  if (!requires_unitary_same_field(pi, pi2))
    throw PreconditionError("prop21_experiment: unitary representations over one field required");
  if (pi.n() != pi2.n()) throw std::invalid_argument("prop21_experiment: ranks differ");
  Prop21Report rep;
  rep.field = pi.field()->name();
  rep.n = pi.n();
  rep.d0 = ls::tail_threshold(rep.n);
  rep.X = X;
  ls::PrimeSelector sel;
  sel.field = pi.field();
  sel.X = X;
  sel = sel.excluding_ramified(pi, pi2);
  ls::PrimeSelector small = sel;
  small.over = ls::DegreeBase::Rational;
  small.degrees = std::set<unsigned>{};
  for (unsigned d = 1; d < rep.d0; ++d) small.degrees->insert(d);
  const auto places = small.enumerate();
  rep.places_checked = places.size();
  for (const auto& v : places) {
    const auto A = aut::satake(pi, v), B = aut::satake(pi2, v);
    if (!A.same_multiset(B)) {
      rep.witness = Witness{v.q, v.f, v.f_rel, describe_classes(A, B)};
      break;
    }
  }
  rep.model_equal = aut::same_rep(pi, pi2);
  rep.poles = ls::pole_book(pi, pi2);
  if (!eps.empty()) rep.slope = ls::slope_experiment(pi, pi2, sel, eps);

  // peel common components in canonical order
  auto left = expand(pi), right = expand(pi2);
  std::vector<aut::DirichletCharacter> peeled, rest;
  std::vector<char> used(right.size(), 0);
  for (const auto& c : left) {
    bool hit = false;
    for (std::size_t j = 0; j < right.size() && !hit; ++j)
      if (!used[j] && aut::equal_over(c, right[j], *pi.field())) {
        used[j] = 1;
        hit = true;
      }
    (hit ? peeled : rest).push_back(c);
  }
  std::vector<aut::DirichletCharacter> rest2;
  for (std::size_t j = 0; j < right.size(); ++j)
    if (!used[j]) rest2.push_back(right[j]);
  rep.peeled = collect(peeled);
  rep.residual = collect(rest);
  rep.residual2 = collect(rest2);

  if (rep.witness)
    rep.verdict = Verdict::NotHypothesis;
  else
    rep.verdict = rep.model_equal ? Verdict::Isomorphic : Verdict::Inconclusive;
  return rep;
}

namespace {

aut::FieldPtr level_field(const tower::RadicalTower& T, unsigned level, const std::string& name,
                          aut::FieldPtr parent = nullptr) {
  return aut::FieldModel::radical(T, level, name, std::move(parent));
}

std::vector<u64> monomial(std::size_t len, std::initializer_list<std::pair<std::size_t, u64>> e) {
  std::vector<u64> v(len, 0);
  for (const auto& [i, k] : e) v[i] += k;
  return v;
}

std::vector<u64> add_exponents(std::vector<u64> a, const std::vector<u64>& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

tower::RadicalStep scaled(const tower::RadicalStep& s, const cyclo::CycloElement& m) {
  tower::RadicalStep out = s;
  out.base_factor = m * s.base_factor;
  for (auto& t : out.terms) t.coeff = m * t.coeff;
  return out;
}

// Small elements of k tried in the two-squares search.
std::vector<CycloElement> search_set(const cyclo::CycloFieldPtr& kf) {
  std::vector<std::pair<int, int>> fr;
  for (int den = 1; den <= 4; ++den)
    for (int num = -8; num <= 8; ++num)
      if (num != 0 && std::gcd(num, den) == 1) fr.emplace_back(num, den);
  auto key = [](const std::pair<int, int>& x) {
    return std::make_tuple(std::max(std::abs(x.first), x.second), x.second, std::abs(x.first), x.first < 0);
  };
  std::sort(fr.begin(), fr.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
  std::vector<CycloElement> out{CycloElement::rational(kf, 0)};
  for (const auto& [num, den] : fr) out.push_back(CycloElement::rational(kf, mpq_class(num, den)));
  if (kf->degree() > 1)
    for (i64 j = 1; j < static_cast<i64>(kf->m()); ++j) {
      const auto z = CycloElement::zeta_power(kf, j);
      out.push_back(z);
      out.push_back(-z);
      out.push_back(CycloElement::rational(kf, 1) + z);
      out.push_back(z - CycloElement::zeta_power(kf, -j));
    }
  return out;
}

// x, y in k(sqrt c) (or in k when c is absent) with x^2 + y^2 = d, as
// x = x0 + x1 sqrt c, y = y0 + y1 sqrt c. With x1 = t y0, y1 = -t x0 the
// condition reads (x0^2 + y0^2)(1 + c t^2) = d.
struct TwoSquares {
  CycloElement x0, x1, y0, y1;
};
std::optional<TwoSquares> two_squares(const CycloElement& d, const std::optional<CycloElement>& c) {
  const auto kf = d.field();
  const auto S = search_set(kf);
  const auto one = CycloElement::rational(kf, 1), zero = CycloElement::rational(kf, 0);
  std::vector<CycloElement> ts{zero};
  if (c) ts = S;
  // d = g^2 (x^2 + y^2) for a small scale g
  for (const auto& g : S) {
    if (g.is_zero()) continue;
    const CycloElement dg = d * (g * g).inverse();
    for (const auto& t : ts) {
      const CycloElement den = c ? one + *c * t * t : one;
      if (den.is_zero()) continue;
      const CycloElement w = dg * den.inverse();
      for (const auto& x0 : S) {
        const CycloElement rem = w - x0 * x0;
        std::optional<CycloElement> y0;
        if (rem.is_zero())
          y0 = zero;
        else
          y0 = cyclo::exact_pth_root(rem, 2);
        if (!y0) continue;
        TwoSquares r{g * x0, g * t * *y0, g * *y0, -(g * t * x0)};
        if (r.y0.is_zero() && r.y1.is_zero()) continue;
        return r;
      }
    }
  }
  return std::nullopt;
}

// Primes where d + x sqrt(d) may fail to be a unit: its relative norm is d y^2.
std::vector<u64> quartic_support(const CycloElement& d, const std::optional<CycloElement>& c, const TwoSquares& s) {
  std::set<u64> out{2};
  auto add = [&](const CycloElement& e) {
    if (e.is_zero()) return;
    for (u64 l : rational_support(e.norm())) out.insert(l);
    for (const auto& [l, k] : factor_mpz(e.denominator())) out.insert(l.get_ui());
  };
  add(d);
  for (const auto* e : {&s.x0, &s.x1, &s.y0, &s.y1}) add(*e);
  // N(y) = y0^2 - c y1^2
  add(c ? s.y0 * s.y0 - *c * s.y1 * s.y1 : s.y0 * s.y0);
  if (c) add(*c);
  return {out.begin(), out.end()};
}

// Anchor d + x sqrt(d), where sqrt(d) and sqrt(c) are monomials in the prelude roots.
tower::RadicalStep quartic_anchor(const CycloElement& d, const std::vector<u64>& root_d,
                                  const std::optional<CycloElement>& c, const std::vector<u64>& root_c,
                                  const TwoSquares& s) {
  tower::RadicalStep a;
  a.base_factor = d;
  a.terms.push_back(tower::RadicalTerm{s.x0, root_d});
  if (c && !s.x1.is_zero()) a.terms.push_back(tower::RadicalTerm{s.x1, add_exponents(root_d, root_c)});
  a.support = quartic_support(d, c, s);
  return a;
}

std::string anchor_text(const tower::RadicalStep& a, const std::vector<std::string>& names) {
  auto mono = [&](const std::vector<u64>& e) {
    std::string out;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) out += "*" + names[i] + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
    return out;
  };
  std::string out = "(" + a.base_factor.to_string() + ")" + mono(a.exponents);
  for (const auto& t : a.terms) out += " + (" + t.coeff.to_string() + ")" + mono(t.exponents);
  return out;
}

// Compositum levels above E, per-chain towers and field models.
void assemble(TowerPlan& plan) {
  const auto kf = plan.K.a.field();
  const u64 p = plan.K.p;
  std::vector<std::string> names{"k", plan.K.name};
  if (!plan.K_is_E) names.push_back("E");
  std::vector<tower::RadicalStep> steps = plan.prelude;
  plan.steps.clear();
  plan.chain_towers.clear();
  plan.level_fields.clear();
  for (std::size_t ci = 0; ci < plan.chains.size(); ++ci) {
    const auto& ch = plan.chains[ci];
    const unsigned r = ch.tower.r;
    mpq_class mi = 1;
    for (unsigned j = 1; j <= r; ++j) {
      // z_{i,1}^p = anchor * prod_j l_j^{p^{j-1}}
      mpz_class pw;
      mpz_pow_ui(pw.get_mpz_t(), mpz_class(ch.fresh.primes[j - 1]).get_mpz_t(), static_cast<unsigned long>(ipow(p, j - 1)));
      mi *= pw;
    }
    std::vector<tower::RadicalStep> own = plan.prelude;
    for (unsigned j = 1; j <= r; ++j) {
      const std::string label = "L" + std::to_string(ch.index) + "," + std::to_string(j);
      if (j == 1) {
        auto first = scaled(ch.anchor, CycloElement::rational(kf, mi));
        first.label = label;
        steps.push_back(first);
        own.push_back(first);
      } else {
        steps.push_back(tower::RadicalStep{CycloElement::rational(kf, 1), monomial(steps.size(), {{steps.size() - 1, 1}}), label});
        own.push_back(tower::RadicalStep{CycloElement::rational(kf, 1), monomial(own.size(), {{own.size() - 1, 1}}), label});
      }
      plan.steps.push_back(LevelStep{static_cast<unsigned>(steps.size()), static_cast<unsigned>(ci), j, ch.fresh.primes[j - 1]});
      names.push_back("L[" + std::to_string(ch.index) + "," + std::to_string(j) + "]");
    }
    plan.chain_towers.push_back(std::make_shared<tower::RadicalTower>(kf, p, std::move(own)));
  }
  plan.compositum = std::make_shared<tower::RadicalTower>(kf, p, std::move(steps));
  for (unsigned l = 0; l < names.size(); ++l)
    plan.level_fields.push_back(
        level_field(*plan.compositum, l, names[l], l ? plan.level_fields.back() : nullptr));
  plan.field_E = plan.level_fields[plan.E_level];
  plan.field_L = plan.level_fields.back();
}

}  // namespace

TowerPlan build_L(const split::CyclicExtension& K, unsigned n, std::vector<u64> forbidden) {
  if (K.trivial) throw PreconditionError("build_L: K = k");
  const u64 p = K.p;
  if (!cyclo::contains_roots_of_unity(K.m(), p))
    throw PreconditionError("build_L: mu_p is not contained in k; unsupported base field");
  TowerPlan plan;
  plan.K = K;
  plan.n = n;
  plan.r = choose_r(n, p);
  plan.field_K = aut::FieldModel::cyclic(K);
  std::sort(forbidden.begin(), forbidden.end());
  forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());
  plan.forbidden = forbidden;
  const auto kf = K.a.field();
  const auto zp = cyclo::zeta_p(kf, p);
  // K = E iff zeta_p is a p-th power in K, i.e. zeta_p a^{-j} is one in k
  const auto ainv = K.a.inverse();
  for (u64 j = 0; j < p && !plan.K_is_E; ++j)
    if (cyclo::exact_pth_root(zp * ainv.pow(j), p)) plan.K_is_E = true;

  if (plan.r.direct) {
    plan.E_level = 1;
    plan.prelude = {tower::RadicalStep{K.a, {}, "K"}};
    plan.compositum = std::make_shared<tower::RadicalTower>(K.radical());
    plan.level_fields = {level_field(*plan.compositum, 0, "k")};
    plan.level_fields.push_back(level_field(*plan.compositum, 1, K.name, plan.level_fields[0]));
    plan.field_E = plan.field_L = plan.level_fields[1];
    return plan;
  }
  const bool one_mod_p = p != 2;
  const unsigned r = plan.r.r;
  const bool k_has_mu4 = cyclo::contains_roots_of_unity(K.m(), 4);
  if (plan.K_is_E) {
    plan.E_level = 1;
    plan.prelude = {tower::RadicalStep{K.a, {}, "K"}};
    Chain ch;
    ch.index = 0;
    ch.subfield = "k";
    ch.anchor = tower::RadicalStep{CycloElement::rational(kf, 1), {1}, ""};
    auto extra = forbidden;
    if (p == 2 && !k_has_mu4) {
      if (auto s = two_squares(K.a, std::nullopt)) {
        ch.anchor = quartic_anchor(K.a, {1}, std::nullopt, {}, *s);
        ch.quartic = true;
        extra.insert(extra.end(), ch.anchor.support.begin(), ch.anchor.support.end());
      } else {
        plan.obstruction = "the datum of K is not a sum of two squares in k: K embeds in no cyclic quartic extension of k";
      }
    }
    auto base = tower::build_nested_chain(K.a, p, r, true);
    ch.fresh = tower::fresh_prime_plan(base, extra, one_mod_p);
    ch.tower = tower::with_multipliers(base, ch.fresh.multipliers);
    ch.anchor_text = anchor_text(ch.anchor, {"y_K"});
    plan.chains.push_back(std::move(ch));
    assemble(plan);
    return plan;
  }
  plan.E_level = 2;
  plan.prelude = {tower::RadicalStep{K.a, {}, "K"}, tower::RadicalStep{zp, {}, "E"}};
  plan.lattice = cyclo::pp_lattice(K.a, zp, p);
  std::vector<u64> acc = forbidden;
  for (unsigned i = 1; i <= p; ++i) {
    const auto& sub = plan.lattice->subfields.at(i);
    Chain ch;
    ch.index = i;
    ch.subfield = sub.name;
    // E = F^(i)(a^{1/p}); y_K^p = a
    ch.anchor = tower::RadicalStep{CycloElement::rational(kf, 1), {1}, ""};
    auto extra = acc;
    const bool sub_has_mu4 = sub.exp_a == 0;  // F^(i) = k(zeta_p^{1/p})
    if (p == 2 && !sub_has_mu4) {
      // sqrt(c) = y_K^{exp_a} y_E; d = zeta_p = -1 with sqrt(d) = y_E, or d = a
      const std::optional<CycloElement> c = sub.kummer;
      const auto root_c = monomial(2, {{0, sub.exp_a}, {1, 1}});
      std::optional<TwoSquares> s;
      if ((s = two_squares(zp, c)))
        ch.anchor = quartic_anchor(zp, monomial(2, {{1, 1}}), c, root_c, *s);
      else if ((s = two_squares(K.a, c)))
        ch.anchor = quartic_anchor(K.a, monomial(2, {{0, 1}}), c, root_c, *s);
      if (s) {
        ch.quartic = true;
        extra.insert(extra.end(), ch.anchor.support.begin(), ch.anchor.support.end());
      } else if (plan.obstruction.empty()) {
        plan.obstruction = "no two-squares representation found over " + sub.name;
      }
    }
    auto base = tower::build_nested_chain(K.a, p, r, true);
    base.prefix = {tower::RadicalStep{sub.kummer, {}, "F" + std::to_string(i)}};
    ch.fresh = tower::fresh_prime_plan(base, extra, one_mod_p);
    acc.insert(acc.end(), ch.fresh.primes.begin(), ch.fresh.primes.end());
    ch.tower = tower::with_multipliers(base, ch.fresh.multipliers);
    ch.anchor_text = anchor_text(ch.anchor, {"y_K", "y_E"});
    plan.chains.push_back(std::move(ch));
  }
  assemble(plan);
  return plan;
}

TowerPlan corrupt_plan(const TowerPlan& plan) {
  if (plan.K_is_E || !plan.lattice || plan.chains.empty())
    throw std::invalid_argument("corrupt_plan: needs the K != E construction");
  TowerPlan bad = plan;
  const auto kf = plan.K.a.field();
  for (auto& ch : bad.chains) {
    const auto& sub = plan.lattice->subfields.at(ch.index);
    // c^{1/p} lies in F^(i) already
    ch.anchor = tower::RadicalStep{CycloElement::rational(kf, 1), monomial(2, {{0, sub.exp_a}, {1, 1}}), ""};
    ch.anchor_text = anchor_text(ch.anchor, {"y_K", "y_E"});
    ch.quartic = false;
  }
  assemble(bad);
  bad.corrupted = true;
  return bad;
}

Prop53Report verify_prop53(const TowerPlan& plan, u64 X) {
  Prop53Report rep;
  rep.X = X;
  const u64 p = plan.K.p;
  rep.bound = ipow(p, plan.r.r);
  if (plan.chains.empty()) return rep;  // direct case: nothing to certify
  rep.index_counts.assign(p + 1, 0);
  const auto qs = primes_up_to(X);
  struct Slot {
    bool skipped = false;
    u64 inert = 0, certified = 0, split = 0;
    unsigned min_degree = 0;
    std::vector<u64> counts;
    std::vector<split::Exception> exc;
  };
  std::vector<Slot> slots(qs.size());
  parallel_for(qs.size(), [&](std::size_t qi) {
    const u64 q = qs[qi];
    auto& s = slots[qi];
    s.counts.assign(p + 1, 0);
    bool excl = plan.compositum->excluded(q);
    for (const auto& T : plan.chain_towers) excl = excl || T->excluded(q);
    if (excl) {
      s.skipped = true;
      return;
    }
    auto fail = [&](const std::string& why) { s.exc.push_back(split::Exception{q, why}); };
    const auto bases = tower::base_traces(*plan.compositum, q);
    for (std::size_t b = 0; b < bases.size(); ++b) {
      const auto& t0 = bases[b];
      if (tower::next_step_splits(t0, *plan.compositum)) {
        ++s.split;
        continue;
      }
      ++s.inert;
      try {
        std::size_t ci = 0;
        if (!plan.K_is_E) {
          const auto cls = split::lemma58_classify(*plan.lattice, t0.base_prime);
          if (!cls.verified) {
            fail("subfield index not verified");
            continue;
          }
          ++s.counts[cls.index];
          ci = cls.index - 1;
        }
        const auto& T = *plan.chain_towers.at(ci);
        std::vector<tower::PrimeTrace> cur{t0};
        bool good = true;
        for (unsigned lv = 0; lv < T.size() && good; ++lv) {
          std::vector<tower::PrimeTrace> next;
          for (const auto& t : cur) {
            const bool splits = tower::next_step_splits(t, T);
            if (lv >= plan.E_level && splits) {
              fail("splits at " + T.steps()[lv].label);
              good = false;
              break;
            }
            if (lv == 1 && !plan.K_is_E && !splits) {
              fail("prime of K inert in E");
              good = false;
              break;
            }
            auto up = tower::lift(t, T);
            next.insert(next.end(), up.begin(), up.end());
          }
          cur = std::move(next);
        }
        if (!good) continue;
        for (const auto& t : cur) {
          const unsigned dK = t.degrees.back() / t.degrees[1];
          if (s.min_degree == 0 || dK < s.min_degree) s.min_degree = dK;
          if (dK < rep.bound) {
            fail("degree " + std::to_string(dK) + " over K");
            good = false;
            break;
          }
        }
        if (good) ++s.certified;
      } catch (const PreconditionError& e) {
        fail(e.what());
      }
    }
  });
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& s = slots[i];
    if (s.skipped) {
      rep.skipped.push_back(qs[i]);
      continue;
    }
    rep.inert_checked += s.inert;
    rep.inert_certified += s.certified;
    rep.split_count += s.split;
    if (s.min_degree && (rep.min_degree == 0 || s.min_degree < rep.min_degree)) rep.min_degree = s.min_degree;
    for (unsigned j = 0; j <= p; ++j) rep.index_counts[j] += s.counts[j];
    rep.exceptions.insert(rep.exceptions.end(), s.exc.begin(), s.exc.end());
  }
  if (plan.K_is_E) rep.index_counts.clear();
  return rep;
}

LAgreementReport prop21_over_L(const TowerPlan& plan, const IsobaricRep& piK, const IsobaricRep& pi2K, u64 X_L) {
  LAgreementReport rep;
  rep.X = X_L;
  rep.d0 = ls::tail_threshold(plan.n);
  const auto piL = rebase(piK, plan.field_L), pi2L = rebase(pi2K, plan.field_L);
  const auto& T = *plan.compositum;
  const unsigned top = plan.top();
  const auto qs = primes_up_to(X_L);
  struct Slot {
    u64 places = 0, small = 0, small1 = 0, agree = 0, largep = 0;
    std::optional<Witness> w;
  };
  std::vector<Slot> slots(qs.size());
  parallel_for(qs.size(), [&](std::size_t qi) {
    const u64 q = qs[qi];
    if (T.excluded(q) || !aut::unramified_at(piL, q) || !aut::unramified_at(pi2L, q)) return;
    auto& s = slots[qi];
    for (const auto& w : tower::traces_at(T, q, top)) {
      ++s.places;
      const unsigned fK = w.degrees[1];
      const unsigned degK = w.degrees[top] / fK;
      const bool sigma1 = w.degrees[1] == w.degrees[0];
      if (degK >= rep.d0) {
        if (!sigma1) ++s.largep;
        continue;
      }
      ++s.small;
      if (!sigma1) {
        if (!s.w) s.w = Witness{q, w.degree(), degK, "small-degree prime of L above Sigma^p"};
        continue;
      }
      ++s.small1;
      const aut::Place v{q, w.degree(), degK, 0};
      const auto A = aut::satake(piL, v), B = aut::satake(pi2L, v);
      // base change from the place of K below
      const auto Av = aut::satake(piK, aut::Place{q, fK, 1, 0}).pow(degK);
      if (A.same_multiset(B) && A.same_multiset(Av))
        ++s.agree;
      else if (!s.w)
        s.w = Witness{q, w.degree(), degK, describe_classes(A, B)};
    }
  });
  for (const auto& s : slots) {
    rep.places += s.places;
    rep.small_degree += s.small;
    rep.small_over_sigma1 += s.small1;
    rep.small_agree += s.agree;
    rep.large_over_sigmap += s.largep;
    if (s.w && !rep.witness) rep.witness = s.w;
  }
  rep.model_equal = aut::same_rep(piL, pi2L);
  return rep;
}

DescentCertificate descent_6(const IsobaricRep& piE, const IsobaricRep& pi2E, const TowerPlan& plan) {
  DescentCertificate cert;
  const u64 p = plan.K.p;
  const auto E = plan.field_E;
  const auto a = rebase(piE, E), b = rebase(pi2E, E);
  cert.premise = aut::same_rep(rebase(a, plan.field_L), rebase(b, plan.field_L));
  if (!cert.premise) {
    cert.failure = "base changes to L differ";
    return cert;
  }
  const auto cond = conductor_primes(a, b);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (i > 0 && plan.steps[i].fresh <= plan.steps[i - 1].fresh) cert.fresh_increasing = false;
    if (std::binary_search(cond.begin(), cond.end(), plan.steps[i].fresh)) cert.fresh_increasing = false;
  }
  cert.ok = true;
  for (auto it = plan.steps.rbegin(); it != plan.steps.rend(); ++it) {
    DescentStep st;
    st.level = it->level;
    st.chain = plan.chains[it->chain].index;
    st.chain_level = it->chain_level;
    st.fresh = it->fresh;
    const auto& below = plan.level_fields[it->level - 1];
    st.field = below->name();
    const auto delta = aut::order_p_character(it->fresh, p);
    st.delta = delta.to_string();
    const auto x = expand(rebase(a, below)), y = expand(rebase(b, below));
    std::vector<char> used(y.size(), 0);
    for (const auto& eta : x) {
      std::optional<std::pair<std::size_t, aut::TwistElimination>> pick;
      // prefer a partner with j = 0, else the first partner at all
      for (int pass = 0; pass < 2 && !pick; ++pass)
        for (std::size_t j = 0; j < y.size() && !pick; ++j) {
          if (used[j]) continue;
          try {
            auto te = aut::twist_eliminate(eta, y[j], delta, it->fresh, below.get());
            if (pass == 1 || te.j == 0) pick = std::make_pair(j, te);
          } catch (const PreconditionError&) {
          }
        }
      if (!pick) {
        st.ok = false;
        aut::TwistElimination te;
        te.inconsistent = true;
        te.note = "no partner for " + eta.to_string() + " up to powers of the step character";
        st.pairs.push_back(te);
        continue;
      }
      used[pick->first] = 1;
      if (pick->second.inconsistent || !pick->second.forced || pick->second.j != 0) st.ok = false;
      st.pairs.push_back(pick->second);
    }
    if (!st.ok && cert.ok) {
      cert.ok = false;
      cert.failure = "twist elimination failed at level " + std::to_string(st.level) + " (fresh prime " +
                     std::to_string(st.fresh) + ")";
    }
    cert.steps.push_back(std::move(st));
  }
  if (cert.ok && !aut::same_rep(a, b)) {
    cert.ok = false;
    cert.failure = "certificate chain complete but the model representations over E differ";
  }
  if (cert.ok) cert.statement = "pi_E = pi'_E over " + E->name();
  return cert;
}

Descent7Report descent_7(const TowerPlan& plan, const AgreementHypothesis& hyp, const IsobaricRep& piK,
                         const IsobaricRep& pi2K, const DescentCertificate& cert) {
  Descent7Report rep;
  rep.X = hyp.X;
  if (!hyp.tables.empty()) {
    rep.sigma1_checked = hyp.tables[0].checked;
    rep.sigma1_agree = hyp.tables[0].agreed;
  }
  const auto a = rebase(piK, plan.field_K), b = rebase(pi2K, plan.field_K);
  if (!hyp.holds()) {
    rep.witness = hyp.witness;
    rep.verdict = Verdict::NotHypothesis;
    return rep;
  }
  if (!cert.ok) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  if (plan.K_is_E) {
    rep.passthrough = true;
    rep.model_equal = aut::same_rep(a, b);
    rep.verdict = rep.model_equal ? Verdict::Equal : Verdict::Inconclusive;
    return rep;
  }
  const auto aE = rebase(a, plan.field_E), bE = rebase(b, plan.field_E);
  const auto qs = primes_up_to(hyp.X);
  struct Slot {
    u64 checked = 0, agree = 0;
    std::optional<Witness> w;
    std::vector<split::Exception> exc;
  };
  std::vector<Slot> slots(qs.size());
  parallel_for(qs.size(), [&](std::size_t qi) {
    const u64 q = qs[qi];
    if (plan.field_K->excluded(q) || plan.field_E->excluded(q) || !aut::unramified_at(a, q) || !aut::unramified_at(b, q))
      return;
    auto& s = slots[qi];
    std::optional<std::vector<aut::Place>> Eplaces;
    for (const auto& v : plan.field_K->places(q)) {
      if (v.f_rel != plan.K.p || !(v.norm() <= hyp.X)) continue;
      if (!Eplaces) Eplaces = plan.field_E->places(q);
      const aut::Place* w = nullptr;
      for (const auto& x : *Eplaces)
        if (x.f == v.f) {
          w = &x;
          break;
        }
      ++s.checked;
      if (!w) {
        s.exc.push_back(split::Exception{q, "prime of K inert over k does not split in E"});
        continue;
      }
      const auto Av = aut::satake(a, v), Aw = aut::satake(aE, *w), Bw = aut::satake(bE, *w), Bv = aut::satake(b, v);
      if (Av.same_multiset(Aw) && Aw.same_multiset(Bw) && Bw.same_multiset(Bv))
        ++s.agree;
      else if (!s.w)
        s.w = Witness{q, v.f, v.f_rel, describe_classes(Av, Bv)};
    }
  });
  for (const auto& s : slots) {
    rep.sigmap_checked += s.checked;
    rep.sigmap_agree += s.agree;
    if (s.w && !rep.witness) rep.witness = s.w;
    rep.exceptions.insert(rep.exceptions.end(), s.exc.begin(), s.exc.end());
  }
  rep.model_equal = aut::same_rep(a, b);
  const bool all = rep.sigmap_agree == rep.sigmap_checked && rep.exceptions.empty() && !rep.witness;
  rep.verdict = all && rep.model_equal ? Verdict::Equal : Verdict::Inconclusive;
  return rep;
}

TheoremAContext prepare_context(const split::CyclicExtension& K, unsigned n, std::vector<u64> forbidden, u64 X_prop53) {
  TheoremAContext ctx;
  ctx.plan = build_L(K, n, std::move(forbidden));
  ctx.prop53 = verify_prop53(ctx.plan, X_prop53);
  return ctx;
}

TheoremAReport theorem_a(const split::CyclicExtension& K, const IsobaricRep& pi, const IsobaricRep& pi2,
                         const TheoremAOptions& opt, const TheoremAContext* ctx) {
  TheoremAReport rep;
  rep.K = K.name;
  if (K.trivial) throw PreconditionError("theorem_a: K = k");
  if (pi.n() != pi2.n()) throw std::invalid_argument("theorem_a: ranks differ");
  const auto FK = aut::FieldModel::cyclic(K);
  const auto a = rebase(pi, FK), b = rebase(pi2, FK);
  rep.pi = a.to_string();
  rep.pi2 = b.to_string();
  auto stage = [&](std::string name, std::string verdict, std::string detail) {
    rep.stages.push_back(StageSummary{std::move(name), std::move(verdict), std::move(detail)});
  };

  rep.omega = aut::central_char_and_t(a);
  rep.omega2 = aut::central_char_and_t(b);
  stage("normalization", rep.omega.t == rep.omega2.t ? "OK" : "T-MISMATCH",
        "omega = " + rep.omega.omega.to_string() + ", t = " + rep.omega.t.get_str() + "; omega' = " +
            rep.omega2.omega.to_string() + ", t' = " + rep.omega2.t.get_str());

  rep.hypothesis = compute_hypothesis(K, a, b, opt.X);
  if (!rep.hypothesis.holds()) {
    rep.verdict = Verdict::NotHypothesis;
    stage("hypothesis", "FAIL", "Sigma^1 disagreement at q = " + std::to_string(rep.hypothesis.witness->q));
    return rep;
  }
  stage("hypothesis", "OK",
        std::to_string(rep.hypothesis.tables[0].agreed) + " Sigma^1 places agree up to X = " + std::to_string(opt.X));

  if (!cyclo::contains_roots_of_unity(K.m(), K.p)) throw PreconditionError("theorem_a: mu_p is not contained in k");
  stage("lemma54", "PASS", "mu_" + std::to_string(K.p) + " is contained in k; no reduction needed");

  // unitary normalization: both have the same t once the hypothesis holds
  const auto au = rebase(a, FK, mpq_class(0)), bu = rebase(b, FK, mpq_class(0));
  const unsigned n = a.n();
  rep.r = choose_r(n, K.p);
  stage("choose_r", "OK", "r = " + std::to_string(rep.r->r) + (rep.r->direct ? " (direct)" : ""));

  if (rep.r->direct) {
    rep.prop21_direct = prop21_experiment(au, bu, opt.X);
    const bool ok = rep.prop21_direct->verdict == Verdict::Isomorphic;
    stage("prop21", to_string(rep.prop21_direct->verdict), "direct case over K");
    rep.verdict = ok ? Verdict::Equal : rep.prop21_direct->verdict;
  } else {
    const auto cond = conductor_primes(a, b);
    std::optional<TheoremAContext> own;
    bool usable = ctx && ctx->plan.K.name == K.name && ctx->plan.n == n && !ctx->plan.corrupted;
    if (usable)
      for (const auto& st : ctx->plan.steps)
        if (std::binary_search(cond.begin(), cond.end(), st.fresh)) usable = false;
    if (!usable) own = prepare_context(K, n, cond, opt.X_prop53);
    const TheoremAContext& C = usable ? *ctx : *own;
    for (const auto& st : C.plan.steps) rep.fresh_primes.push_back(st.fresh);
    stage("build_L", "OK",
          std::string(C.plan.K_is_E ? "K = E, one chain" : "K != E, " + std::to_string(C.plan.chains.size()) + " chains") +
              ", [L:E] = " + std::to_string(ipow(K.p, C.plan.steps.size())));
    rep.prop53 = C.prop53;
    if (!C.prop53.ok()) {
      stage("prop53", "FAIL",
            std::to_string(C.prop53.exceptions.size()) + " exceptions, first at q = " +
                std::to_string(C.prop53.exceptions.front().q) + " (" + C.prop53.exceptions.front().reason + ")" +
                (C.plan.obstruction.empty() ? "" : "; " + C.plan.obstruction));
      rep.verdict = Verdict::Inconclusive;
      return rep;
    }
    stage("prop53", "OK",
          std::to_string(C.prop53.inert_certified) + " inert primes certified, degree >= " + std::to_string(C.prop53.bound));
    rep.prop21_L = prop21_over_L(C.plan, au, bu, opt.X_L);
    if (!rep.prop21_L->ok()) {
      stage("prop21_L", "FAIL", rep.prop21_L->witness ? rep.prop21_L->witness->detail : "model inequality over L");
      rep.verdict = Verdict::Inconclusive;
      return rep;
    }
    stage("prop21_L", "ISOMORPHIC", std::to_string(rep.prop21_L->small_degree) + " small-degree places of L agree");
    rep.descent6 = descent_6(rebase(au, C.plan.field_E), rebase(bu, C.plan.field_E), C.plan);
    if (!rep.descent6->ok) {
      stage("descent_6", "FAIL", rep.descent6->failure);
      rep.verdict = Verdict::Inconclusive;
      return rep;
    }
    stage("descent_6", "OK", std::to_string(rep.descent6->steps.size()) + " steps, all j = 0");
    rep.descent7 = descent_7(C.plan, rep.hypothesis, au, bu, *rep.descent6);
    stage("descent_7", to_string(rep.descent7->verdict),
          rep.descent7->passthrough ? "K = E" : std::to_string(rep.descent7->sigmap_agree) + " Sigma^p places agree");
    rep.verdict = rep.descent7->verdict;
  }
  if (rep.verdict == Verdict::Equal) {
    // K(zeta_p) = K since mu_p is in k
    rep.twist = aut::twist_equivalent(au, bu);
    rep.corollary_b = K.p == 2;
    stage("twist", rep.twist ? "OK" : "FAIL",
          rep.twist ? "chi = " + rep.twist->to_string() + " over K(zeta_p) = K" : "no twist found");
    if (!rep.twist || !aut::trivial_over(*rep.twist, *FK)) rep.verdict = Verdict::TwistEquivalent;
    if (!rep.twist) rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace kummerlab::det
