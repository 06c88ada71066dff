#include "tower.hpp"

#include <algorithm>
#include <set>

namespace kummerlab::tower {

using cyclo::CycloElement;

RadicalTower::RadicalTower(cyclo::CycloFieldPtr base, u64 p, std::vector<RadicalStep> steps)
    : base_(std::move(base)), p_(p), steps_(std::move(steps)) {
  if (!is_prime(p_)) throw std::invalid_argument("RadicalTower: p must be prime");
  if (!cyclo::contains_roots_of_unity(base_->m(), p_))
    throw PreconditionError("RadicalTower: mu_p is not contained in the base field");
  std::set<u64> support{p_};
  for (const auto& [l, e] : factor_u64(base_->m())) support.insert(l);
  for (std::size_t s = 0; s < steps_.size(); ++s) {
    const auto& step = steps_[s];
    if (step.base_factor.m() != base_->m()) throw std::invalid_argument("RadicalTower: base factor from another field");
    if (step.base_factor.is_zero()) throw std::invalid_argument("RadicalTower: zero radicand");
    if (step.exponents.size() > s) throw std::invalid_argument("RadicalTower: exponent on a later generator");
    for (u64 l : rational_support(step.base_factor.norm())) support.insert(l);
    for (const auto& [l, e] : factor_mpz(step.base_factor.denominator())) support.insert(l.get_ui());
    for (const auto& term : step.terms) {
      if (term.coeff.m() != base_->m()) throw std::invalid_argument("RadicalTower: term from another field");
      if (term.exponents.size() > s) throw std::invalid_argument("RadicalTower: exponent on a later generator");
      if (term.coeff.is_zero()) continue;
      for (u64 l : rational_support(term.coeff.norm())) support.insert(l);
      for (const auto& [l, e] : factor_mpz(term.coeff.denominator())) support.insert(l.get_ui());
    }
    support.insert(step.support.begin(), step.support.end());
  }
  support_.assign(support.begin(), support.end());
}

bool RadicalTower::excluded(u64 q) const { return std::binary_search(support_.begin(), support_.end(), q); }

RadicalTower RadicalTower::prefix(std::size_t k) const {
  return RadicalTower(base_, p_, std::vector<RadicalStep>(steps_.begin(), steps_.begin() + std::min(k, steps_.size())));
}

// ---------------------------------------------------------------------------
// Traces

std::vector<PrimeTrace> base_traces(const RadicalTower& tower, u64 q) {
  if (tower.excluded(q)) throw PreconditionError("base_traces: q = " + std::to_string(q) + " may ramify in the tower");
  std::vector<PrimeTrace> out;
  for (auto& P : cyclo::cyclo_primes_above(tower.m(), q)) {
    PrimeTrace t;
    t.q = q;
    t.field = P.zbar.field();
    t.zeta = P.zbar;
    t.degrees = {P.f};
    t.base_prime = std::move(P);
    out.push_back(std::move(t));
  }
  return out;
}

ff::FFElement next_radicand(const PrimeTrace& t, const RadicalTower& tower) {
  const unsigned s = t.level();
  if (s >= tower.size()) throw std::invalid_argument("next_radicand: trace is already at the top of the tower");
  const RadicalStep& step = tower.steps()[s];
  ff::FFElement R = cyclo::reduce_element(step.base_factor, t.zeta);
  for (std::size_t i = 0; i < step.exponents.size(); ++i) {
    if (step.exponents[i]) R = R * t.roots[i].pow(step.exponents[i]);
  }
  for (const auto& term : step.terms) {
    ff::FFElement x = cyclo::reduce_element(term.coeff, t.zeta);
    for (std::size_t i = 0; i < term.exponents.size(); ++i) {
      if (term.exponents[i]) x = x * t.roots[i].pow(term.exponents[i]);
    }
    R = R + x;
  }
  if (R.is_zero()) throw PreconditionError("next_radicand: radicand reduces to zero (ramified)");
  return R;
}

bool next_step_splits(const PrimeTrace& t, const RadicalTower& tower) {
  return ff::is_pth_power(next_radicand(t, tower), tower.p()).value;
}

std::vector<PrimeTrace> lift(const PrimeTrace& t, const RadicalTower& tower) {
  const u64 p = tower.p();
  ff::FFElement R = next_radicand(t, tower);
  std::vector<PrimeTrace> out;
  if (ff::is_pth_power(R, p).value) {
    auto roots = ff::pth_roots(R, p);
    if (roots.size() != p) throw std::logic_error("lift: residue field lacks the p-th roots of unity");
    for (auto& y : roots) {
      PrimeTrace u = t;
      u.roots.push_back(std::move(y));
      u.degrees.push_back(t.degree());
      out.push_back(std::move(u));
    }
    return out;
  }
  const unsigned d = t.degree(), dn = d * static_cast<unsigned>(p);
  auto emb = ff::canonical_embedding(t.q, d, dn);
  PrimeTrace u;
  u.q = t.q;
  u.base_prime = t.base_prime;
  u.field = emb->to();
  u.zeta = emb->apply(t.zeta);
  for (const auto& y : t.roots) u.roots.push_back(emb->apply(y));
  u.degrees = t.degrees;
  u.degrees.push_back(dn);
  auto roots = ff::pth_roots(emb->apply(R), p);
  if (roots.empty()) throw std::logic_error("lift: radicand has no p-th root after extension");
  u.roots.push_back(roots.front());
  out.push_back(std::move(u));
  return out;
}

std::vector<PrimeTrace> traces_at(const RadicalTower& tower, u64 q, unsigned level) {
  if (level > tower.size()) throw std::invalid_argument("traces_at: level beyond the top of the tower");
  std::vector<PrimeTrace> current = base_traces(tower, q);
  for (unsigned s = 0; s < level; ++s) {
    std::vector<PrimeTrace> next;
    for (const auto& t : current) {
      auto lifted = lift(t, tower);
      next.insert(next.end(), std::make_move_iterator(lifted.begin()), std::make_move_iterator(lifted.end()));
    }
    current = std::move(next);
  }
  return current;
}

// ---------------------------------------------------------------------------
// Kummer chains

std::size_t KummerTower::step_of_level(int j) const {
  int first = sub_base ? 0 : 1;
  if (j < first || j > static_cast<int>(r)) throw std::invalid_argument("step_of_level: level out of range");
  return prefix.size() + static_cast<std::size_t>(j - first);
}

RadicalTower KummerTower::radical() const {
  std::vector<RadicalStep> steps = prefix;
  const unsigned chain_steps = sub_base ? r + 1 : r;
  const auto field = alpha.field();
  for (unsigned i = 0; i < chain_steps; ++i) {
    if (i == 0) {
      steps.push_back(RadicalStep{alpha, {}, "alpha"});
    } else {
      std::vector<u64> e(steps.size(), 0);
      e.back() = 1;
      steps.push_back(RadicalStep{CycloElement::rational(field, 1), std::move(e), "chain"});
    }
  }
  return RadicalTower(field, p, std::move(steps));
}

KummerTower build_nested_chain(const CycloElement& alpha, u64 p, unsigned r, bool sub_base) {
  if (!is_prime(p)) throw std::invalid_argument("build_nested_chain: p must be prime");
  if (!cyclo::contains_roots_of_unity(alpha.m(), p))
    throw PreconditionError("build_nested_chain: mu_p is not contained in the base field");
  if (alpha.is_zero()) throw std::invalid_argument("build_nested_chain: alpha = 0");
  KummerTower t;
  t.alpha = alpha;
  t.original = alpha;
  t.p = p;
  t.r = r;
  t.sub_base = sub_base;
  return t;
}

CycloElement modify_datum(const CycloElement& alpha, const std::vector<std::pair<mpq_class, u64>>& multipliers) {
  CycloElement out = alpha;
  for (const auto& [beta, e] : multipliers) {
    if (beta == 0) throw std::invalid_argument("modify_datum: beta = 0");
    mpq_class power = 1;
    for (u64 i = 0; i < e; ++i) power *= beta;
    out = out * CycloElement::rational(alpha.field(), power);
  }
  return out;
}

KummerTower with_multipliers(const KummerTower& tower, const std::vector<std::pair<mpq_class, u64>>& multipliers) {
  KummerTower t = tower;
  t.multipliers.insert(t.multipliers.end(), multipliers.begin(), multipliers.end());
  t.alpha = modify_datum(t.original, t.multipliers);
  return t;
}

NestednessCertificate verify_nested(const KummerTower& tower, u64 search_bound) {
  NestednessCertificate cert;
  const u64 p = tower.p;
  const int bottom = tower.bottom_level();
  const int top = static_cast<int>(tower.r);
  const auto field = tower.alpha.field();

  bool exact_detected = false;
  if (tower.prefix.empty()) {
    try {
      if (cyclo::exact_pth_root(tower.alpha, p)) exact_detected = true;
    } catch (const InconclusiveError&) {
    }
  }
  if (exact_detected) {
    cert.valid = false;
    cert.failure = "alpha is a p-th power in the base field";
    return cert;
  }

  // Degree witnesses: a prime of L_{j-1} whose radicand is not a p-th power.
  const RadicalTower rt = tower.radical();
  for (int j = bottom + 1; j <= top; ++j) cert.degrees.push_back(StepDegree{j, 0, false});
  std::size_t missing = cert.degrees.size();
  const std::size_t first_chain_step = tower.prefix.size();
  for (u64 q = 2; q <= search_bound && missing > 0; q = next_prime(q)) {
    if (rt.excluded(q)) continue;
    for (const auto& start : base_traces(rt, q)) {
      PrimeTrace t = start;
      for (std::size_t s = 0; s < rt.size(); ++s) {
        if (s >= first_chain_step) {
          auto& slot = cert.degrees[s - first_chain_step];
          if (!slot.certified && !next_step_splits(t, rt)) {
            slot.certified = true;
            slot.witness_q = q;
            --missing;
          }
        }
        if (missing == 0) break;
        t = lift(t, rt).front();
      }
      if (missing == 0) break;
    }
  }
  if (!cert.degrees.empty()) cert.witness_q = cert.degrees.front().witness_q;

  // Cyclicity of L_j / L_{j-2}.
  bool bottom_has = tower.mu_p2_in_bottom_hint ||
                    (tower.prefix.empty() && cyclo::contains_roots_of_unity(tower.m(), p * p));
  bool first_has = false;
  if (!bottom_has && tower.prefix.empty()) {
    // mu_{p^2} is in L_{bottom+1} = L_bottom(alpha^{1/p}) iff alpha = zeta_p^i mod p-th powers.
    const CycloElement zp_inv = cyclo::zeta_p(field, p).inverse();
    for (u64 i = 1; i < p && !first_has; ++i) {
      try {
        if (cyclo::exact_pth_root(tower.alpha * zp_inv.pow(i), p)) first_has = true;
      } catch (const InconclusiveError&) {
      }
    }
  }
  for (int j = bottom + 2; j <= top; ++j) {
    PairCyclicity c{j, false, ""};
    if (bottom_has) {
      c.certified = true;
      c.reason = "mu_{p^2} in the bottom field";
    } else if (first_has && j - 2 >= bottom + 1) {
      c.certified = true;
      c.reason = "mu_{p^2} in L_" + std::to_string(bottom + 1);
    } else if (first_has) {
      c.certified = true;
      c.reason = "mu_p in the bottom field and mu_{p^2} in L_" + std::to_string(bottom + 1);
    } else {
      c.reason = "mu_{p^2} not contained in L_" + std::to_string(j - 2);
    }
    cert.cyclicity.push_back(c);
  }

  bool degrees_ok = std::all_of(cert.degrees.begin(), cert.degrees.end(), [](const StepDegree& d) { return d.certified; });
  bool cyclic_ok = std::all_of(cert.cyclicity.begin(), cert.cyclicity.end(), [](const PairCyclicity& c) { return c.certified; });
  cert.valid = degrees_ok && cyclic_ok;
  if (!degrees_ok) {
    cert.inconclusive = true;
    cert.failure = "no certifying prime found below " + std::to_string(search_bound);
  } else if (!cyclic_ok) {
    for (const auto& c : cert.cyclicity)
      if (!c.certified) {
        cert.failure = "cyclicity not certifiable at j = " + std::to_string(c.level) + ": " + c.reason;
        break;
      }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Ramification and fresh primes

namespace {

bool is_unit_at(const CycloElement& x, u64 q) {
  if (!cyclo::integral_at(x, q)) return false;
  mpq_class n = x.norm();
  return !mpz_divisible_ui_p(n.get_num().get_mpz_t(), q);
}

}  // namespace

RamificationProfile ramification_profile(const KummerTower& tower, u64 q) {
  if (!is_prime(q)) throw std::invalid_argument("ramification_profile: q must be prime");
  if (q == tower.p) throw PreconditionError("ramification_profile: q = p is wild");
  if (tower.m() % q == 0) throw PreconditionError("ramification_profile: q ramifies in the base field");
  for (const auto& step : tower.prefix) {
    if (!is_unit_at(step.base_factor, q))
      throw PreconditionError("ramification_profile: q divides the datum of a lower field");
  }
  RamificationProfile prof;
  prof.q = q;
  int t = 0;
  for (const auto& [beta, e] : tower.multipliers) t += static_cast<int>(e) * valuation(beta, q);
  if (tower.original.is_rational()) {
    t += valuation(tower.original.rational_value(), q);
  } else if (!is_unit_at(tower.original, q)) {
    throw PreconditionError("ramification_profile: valuation not readable from the rational part");
  }
  prof.valuation = t;
  const u64 p = tower.p;
  const unsigned abs_t = static_cast<unsigned>(std::abs(t));
  for (int j = tower.bottom_level() + 1; j <= static_cast<int>(tower.r); ++j) {
    if (!tower.sub_base && j == 0) continue;
    u64 n = 1;
    for (int i = 0; i < (tower.sub_base ? j + 1 : j); ++i) n *= p;
    prof.levels.push_back(j);
    prof.e.push_back(n / gcd_u64(n, abs_t == 0 ? n : abs_t));
  }
  if (!tower.sub_base) {
    prof.levels.insert(prof.levels.begin(), 0);
    prof.e.insert(prof.e.begin(), 1);
  }
  return prof;
}

FreshPrimePlan fresh_prime_plan(const KummerTower& tower, std::vector<u64> forbidden, bool one_mod_p) {
  const u64 p = tower.p;
  forbidden.push_back(p);
  const RadicalTower rad = tower.radical();
  for (u64 l : rad.support()) forbidden.push_back(l);
  std::sort(forbidden.begin(), forbidden.end());
  FreshPrimePlan plan;
  u64 l = 1;
  u64 exponent = tower.sub_base ? p : 1;
  for (unsigned j = 1; j <= tower.r; ++j, exponent *= p) {
    do {
      l = next_prime(l);
    } while (std::binary_search(forbidden.begin(), forbidden.end(), l) || (one_mod_p && l % p != 1));
    plan.primes.push_back(l);
    plan.multipliers.emplace_back(mpq_class(l), exponent);
  }
  const KummerTower modified = with_multipliers(tower, plan.multipliers);
  plan.certified = true;
  for (unsigned j = 1; j <= tower.r; ++j) {
    RamificationProfile prof = ramification_profile(modified, plan.primes[j - 1]);
    for (std::size_t i = 0; i < prof.levels.size(); ++i) {
      int level = prof.levels[i];
      if (level < static_cast<int>(j) && prof.e[i] != 1) plan.certified = false;
      if (level == static_cast<int>(j) && prof.e[i] == 1) plan.certified = false;
    }
    plan.profiles.push_back(std::move(prof));
  }
  return plan;
}

}  // namespace kummerlab::tower
