#include "splitting.hpp"

#include <algorithm>
#include <mutex>
#include <regex>

namespace kummerlab::split {

using cyclo::CycloElement;
using cyclo::CycloPrime;

tower::RadicalTower CyclicExtension::radical() const {
  std::vector<tower::RadicalStep> steps;
  if (!trivial) steps.push_back(tower::RadicalStep{a, {}, "K"});
  return tower::RadicalTower(a.field(), p, std::move(steps));
}

CyclicExtension make_extension(const CycloElement& a, u64 p) {
  if (!is_prime(p)) throw std::invalid_argument("make_extension: p must be prime");
  if (!cyclo::contains_roots_of_unity(a.m(), p)) throw PreconditionError("make_extension: mu_p is not in the base field");
  if (a.is_zero()) throw std::invalid_argument("make_extension: zero datum");
  if (cyclo::exact_pth_root(a, p)) throw std::invalid_argument("make_extension: datum is a p-th power (K = k)");
  CyclicExtension K;
  K.a = a;
  K.p = p;
  K.name = cyclo::radical_field_name(a, p);
  return K;
}

CyclicExtension parse_extension(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s == "Q") {
    CyclicExtension K;
    K.a = CycloElement::rational(cyclo::make_cyclo_field(1), 1);
    K.p = 2;
    K.trivial = true;
    K.name = "Q";
    return K;
  }
  if (s == "Q(i)") return make_extension(CycloElement::rational(cyclo::make_cyclo_field(1), -1), 2);
  std::smatch mt;
  static const std::regex sqrt_re(R"(Q\(sqrt\(?(-?[0-9]+)\)?\))");
  if (std::regex_match(s, mt, sqrt_re))
    return make_extension(CycloElement::rational(cyclo::make_cyclo_field(1), mpq_class(mt[1].str())), 2);
  static const std::regex rad_re(R"(Q\(zeta_?([0-9]+)\)\((.+)\^\(1/([0-9]+)\)\))");
  if (std::regex_match(s, mt, rad_re)) {
    const u64 m = cyclo::normalize_conductor(std::stoull(mt[1].str()));
    const u64 p = std::stoull(mt[3].str());
    return make_extension(cyclo::parse_element(cyclo::make_cyclo_field(m), mt[2].str()), p);
  }
  throw std::invalid_argument("parse_extension: cannot parse '" + text + "'");
}

std::string to_string(SigmaClass c) {
  switch (c) {
    case SigmaClass::Degree1: return "DEGREE1";
    case SigmaClass::DegreeP: return "DEGREEP";
    case SigmaClass::Ramified: return "RAMIFIED";
  }
  return "?";
}

std::vector<ClassifiedPrime> classify_prime(const CyclicExtension& K, u64 q) {
  if (!is_prime(q)) throw std::invalid_argument("classify_prime: q is not prime");
  std::vector<ClassifiedPrime> out;
  const auto R = K.radical();
  if (R.excluded(q)) {
    if (K.m() % q == 0) {
      // Q(zeta_m) itself ramifies at q; report one entry for the rational prime.
      out.push_back(ClassifiedPrime{q, 0, 0, SigmaClass::Ramified, mpz_class(q), 1});
      return out;
    }
    auto ps = cyclo::cyclo_primes_above(K.m(), q);
    for (unsigned i = 0; i < ps.size(); ++i) out.push_back(ClassifiedPrime{q, i, 0, SigmaClass::Ramified, ps[i].norm(), ps[i].f});
    return out;
  }
  auto base = tower::base_traces(R, q);
  for (unsigned i = 0; i < base.size(); ++i) {
    if (K.trivial) {
      out.push_back(ClassifiedPrime{q, i, 0, SigmaClass::Degree1, base[i].norm(), base[i].degree()});
      continue;
    }
    auto lifts = tower::lift(base[i], R);
    const SigmaClass cls = lifts.size() == 1 ? SigmaClass::DegreeP : SigmaClass::Degree1;
    for (unsigned j = 0; j < lifts.size(); ++j)
      out.push_back(ClassifiedPrime{q, i, j, cls, lifts[j].norm(), lifts[j].degree()});
  }
  return out;
}

DensityReport degree1_density(const CyclicExtension& K, u64 X) {
  DensityReport rep;
  rep.X = X;
  const auto R = K.radical();
  const auto primes = primes_up_to(X);
  std::vector<std::pair<u64, u64>> counts(primes.size(), {0, 0});
  std::vector<char> ram(primes.size(), 0);
  const mpz_class Xz(static_cast<unsigned long>(X));
  parallel_for(primes.size(), [&](std::size_t idx) {
    const u64 q = primes[idx];
    if (R.excluded(q)) {
      ram[idx] = 1;
      return;
    }
    // residue degree of q in k decides whether anything above q can be <= X
    const unsigned f = K.m() == 1 ? 1 : static_cast<unsigned>(mult_order_mod(q % K.m(), K.m()));
    if (pow_mpz(q, f) > Xz) return;
    // the residue test decides the class; no residue field extension is built
    for (const auto& t : tower::base_traces(R, q)) {
      if (K.trivial || tower::next_step_splits(t, R)) counts[idx].first += K.trivial ? 1 : K.p;
      else if (pow_mpz(q, static_cast<u64>(f) * K.p) <= Xz) ++counts[idx].second;
    }
  });
  for (std::size_t i = 0; i < primes.size(); ++i) {
    rep.degree1 += counts[i].first;
    rep.degreep += counts[i].second;
    if (ram[i]) rep.ramified.push_back(primes[i]);
  }
  rep.total = rep.degree1 + rep.degreep;
  if (rep.total) rep.ratio = static_cast<double>(rep.degree1) / static_cast<double>(rep.total);
  return rep;
}

// ---------------------------------------------------------------------------
// Chains

namespace {

std::size_t chain_bottom(const tower::KummerTower& t) { return t.prefix.size(); }

u64 chain_steps(const tower::KummerTower& t) { return t.sub_base ? t.r + 1 : t.r; }

std::string tower_parameters(const tower::KummerTower& t) {
  return "m=" + std::to_string(t.m()) + ", alpha=" + t.alpha.to_string() + ", p=" + std::to_string(t.p) +
         ", r=" + std::to_string(t.r) + (t.sub_base ? ", sub_base" : "") +
         (t.prefix.empty() ? "" : ", prefix=" + std::to_string(t.prefix.size()));
}

}  // namespace

std::vector<PrimeTrace> chain_bottom_traces(const tower::KummerTower& t, u64 q) {
  return tower::traces_at(t.radical(), q, static_cast<unsigned>(chain_bottom(t)));
}

Lemma44Result lemma44_check(const tower::KummerTower& t, const PrimeTrace& v0) {
  const auto R = t.radical();
  if (v0.level() != chain_bottom(t)) throw std::invalid_argument("lemma44_check: trace is not at the bottom of the chain");
  Lemma44Result res;
  res.norms.push_back(v0.norm());
  PrimeTrace cur = v0;
  const u64 steps = chain_steps(t);
  for (u64 s = 0; s < steps; ++s) {
    auto lifts = tower::lift(cur, R);
    res.lifts_per_level.push_back(static_cast<unsigned>(lifts.size()));
    if (s == 0 && lifts.size() != 1) throw PreconditionError("lemma44_check: v0 splits in the first chain step");
    if (lifts.size() != 1) res.unique = false;
    mpz_class expected;
    mpz_pow_ui(expected.get_mpz_t(), res.norms.back().get_mpz_t(), t.p);
    if (lifts.front().norm() != expected) res.norms_ok = false;
    res.norms.push_back(lifts.front().norm());
    cur = std::move(lifts.front());
  }
  return res;
}

SweepReport lemma44_sweep(const tower::KummerTower& t, u64 qmax) {
  SweepReport rep;
  rep.lemma = "lemma44";
  rep.parameters = tower_parameters(t);
  rep.range_hi = qmax;
  const auto R = t.radical();
  const auto primes = primes_up_to(qmax);
  struct Slot {
    u64 checked = 0, verified = 0;
    bool skipped = false;
    std::vector<Exception> exc;
  };
  std::vector<Slot> slots(primes.size());
  parallel_for(primes.size(), [&](std::size_t idx) {
    const u64 q = primes[idx];
    Slot& sl = slots[idx];
    if (R.excluded(q)) {
      sl.skipped = true;
      return;
    }
    try {
      for (const auto& v0 : tower::traces_at(R, q, static_cast<unsigned>(chain_bottom(t)))) {
        if (tower::next_step_splits(v0, R)) continue;
        ++sl.checked;
        auto r = lemma44_check(t, v0);
        if (r.unique && r.norms_ok) ++sl.verified;
        else sl.exc.push_back(Exception{q, r.unique ? "norm is not Nv_{j-1}^p" : "v0 has more than one prime above it"});
      }
    } catch (const std::exception& e) {
      sl.exc.push_back(Exception{q, e.what()});
    }
  });
  for (std::size_t i = 0; i < primes.size(); ++i) {
    rep.checked += slots[i].checked;
    rep.verified_count += slots[i].verified;
    if (slots[i].skipped) rep.skipped.push_back(primes[i]);
    rep.exceptions.insert(rep.exceptions.end(), slots[i].exc.begin(), slots[i].exc.end());
  }
  return rep;
}

DisjointnessCertificate certify_disjoint(const std::vector<tower::KummerTower>& towers, u64 search_bound) {
  DisjointnessCertificate cert;
  if (towers.empty()) return cert;
  const u64 p = towers.front().p;
  const u64 m = towers.front().m();
  std::vector<u64> support;
  for (const auto& t : towers) {
    if (t.p != p || t.m() != m) throw std::invalid_argument("certify_disjoint: towers over different bases");
    if (!t.prefix.empty()) throw std::invalid_argument("certify_disjoint: chains with a prefix are not supported");
    const auto s = t.radical().support();
    support.insert(support.end(), s.begin(), s.end());
  }
  const std::size_t k = towers.size();
  if (k > 8) throw std::invalid_argument("certify_disjoint: too many towers");
  u64 total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= p;
  // residue classes mod p-th powers of each datum at each prime: log base a fixed non-p-th power
  std::vector<std::vector<u64>> pending;
  for (u64 code = 1; code < total; ++code) {
    std::vector<u64> e(k);
    u64 c = code;
    for (std::size_t i = 0; i < k; ++i) {
      e[i] = c % p;
      c /= p;
    }
    pending.push_back(std::move(e));
  }
  for (u64 q : primes_up_to(search_bound)) {
    if (pending.empty()) break;
    if (std::find(support.begin(), support.end(), q) != support.end()) continue;
    for (const auto& P : cyclo::cyclo_primes_above(m, q)) {
      // reduce the datum to the character value in Z/p: x^{(N-1)/p} = w^c
      const mpz_class N = P.norm();
      const mpz_class ex = (N - 1) / p;
      const auto w = ff::least_non_pth_power(P.zbar.field(), p).pow(ex);
      std::vector<u64> chi(k);
      for (std::size_t i = 0; i < k; ++i) {
        auto v = cyclo::reduce_element(towers[i].alpha, P).pow(ex);
        auto acc = ff::FFElement::constant(P.zbar.field(), 1);
        u64 c = 0;
        while (!(acc == v) && c < p) {
          acc = acc * w;
          ++c;
        }
        chi[i] = c;
      }
      for (auto it = pending.begin(); it != pending.end();) {
        u64 s = 0;
        for (std::size_t i = 0; i < k; ++i) s = (s + (*it)[i] * chi[i]) % p;
        if (s != 0) {
          cert.witnesses.emplace_back(*it, q);
          it = pending.erase(it);
        } else {
          ++it;
        }
      }
    }
  }
  cert.certified = pending.empty();
  return cert;
}

Lemma45Result lemma45_check(const std::vector<tower::KummerTower>& towers, const std::vector<PrimeTrace>& v0) {
  if (towers.size() != v0.size()) throw std::invalid_argument("lemma45_check: one starting prime per tower is required");
  if (towers.empty()) throw std::invalid_argument("lemma45_check: no towers");
  for (std::size_t i = 0; i < v0.size(); ++i)
    for (std::size_t j = i + 1; j < v0.size(); ++j)
      if (v0[i].q == v0[j].q) throw PreconditionError("lemma45_check: starting primes must lie over distinct rational primes");
  Lemma45Result res;
  res.disjoint = certify_disjoint(towers);
  if (!res.disjoint.certified) throw PreconditionError("lemma45_check: linear disjointness could not be certified");
  for (std::size_t i = 0; i < towers.size(); ++i) {
    const auto& t = towers[i];
    if (t.r != towers.front().r) throw std::invalid_argument("lemma45_check: towers of different heights");
    Lemma45Entry e;
    e.q = v0[i].q;
    e.chain = lemma44_check(t, v0[i]);
    if (!e.chain.unique) throw PreconditionError("lemma45_check: starting prime is not inert through the chain");
    mpz_class pe = pow_mpz(t.p, chain_steps(t));
    mpz_pow_ui(e.bound.get_mpz_t(), v0[i].norm().get_mpz_t(), pe.get_ui());
    for (const auto& o : towers)
      if (o.radical().excluded(e.q)) e.unramified_in_compositum = false;
    res.entries.push_back(std::move(e));
  }
  res.certified = std::all_of(res.entries.begin(), res.entries.end(),
                              [](const Lemma45Entry& e) { return e.chain.unique && e.chain.norms_ok && e.chain.norms.back() == e.bound; });
  return res;
}

SweepReport lemma45_sweep(const std::vector<tower::KummerTower>& towers, u64 qmax) {
  SweepReport rep;
  rep.lemma = "lemma45";
  for (const auto& t : towers) rep.parameters += (rep.parameters.empty() ? "" : "; ") + tower_parameters(t);
  rep.range_hi = qmax;
  std::vector<std::vector<PrimeTrace>> inert(towers.size());
  std::vector<tower::RadicalTower> rads;
  for (const auto& t : towers) rads.push_back(t.radical());
  for (u64 q : primes_up_to(qmax)) {
    bool any_excluded = false;
    for (std::size_t i = 0; i < towers.size(); ++i) {
      if (rads[i].excluded(q)) {
        any_excluded = true;
        continue;
      }
      for (auto& v : chain_bottom_traces(towers[i], q))
        if (!tower::next_step_splits(v, rads[i])) inert[i].push_back(std::move(v));
    }
    if (any_excluded) rep.skipped.push_back(q);
  }
  // tuples: the n-th inert prime of each tower, skipping tuples with repeated q
  std::size_t depth = inert.empty() ? 0 : inert.front().size();
  for (const auto& v : inert) depth = std::min(depth, v.size());
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<PrimeTrace> tuple;
    for (std::size_t i = 0; i < towers.size(); ++i) tuple.push_back(inert[i][(n + i) % inert[i].size()]);
    bool distinct = true;
    for (std::size_t i = 0; i < tuple.size(); ++i)
      for (std::size_t j = i + 1; j < tuple.size(); ++j)
        if (tuple[i].q == tuple[j].q) distinct = false;
    if (!distinct) continue;
    ++rep.checked;
    try {
      auto r = lemma45_check(towers, tuple);
      if (r.certified) ++rep.verified_count;
      else rep.exceptions.push_back(Exception{tuple.front().q, "bound not attained"});
    } catch (const std::exception& e) {
      rep.exceptions.push_back(Exception{tuple.front().q, e.what()});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// (p,p) lattice

tower::RadicalTower subfield_then_E(const cyclo::PPSubfieldLattice& L, unsigned i) {
  if (i == 0 || i > L.p) throw std::invalid_argument("subfield_then_E: index out of range");
  std::vector<tower::RadicalStep> steps{tower::RadicalStep{L.subfields[i].kummer, {}, "F(i)"},
                                        tower::RadicalStep{L.a, {}, "E"}};
  return tower::RadicalTower(L.a.field(), L.p, std::move(steps));
}

Lemma58Result lemma58_classify(const cyclo::PPSubfieldLattice& L, const CycloPrime& z) {
  auto coords = cyclo::frobenius_coords(L, z);
  if (!coords) throw PreconditionError("lemma58_classify: prime is ramified in E");
  if (coords->first == 0) throw PreconditionError("lemma58_classify: prime splits in K");
  Lemma58Result res;
  res.frobenius = *coords;
  res.index = L.label_of(*coords);
  // direct: which F^(i), i >= 1, have c_i a p-th power at z
  for (unsigned i = 1; i <= L.p; ++i)
    if (ff::is_pth_power(cyclo::reduce_element(L.subfields[i].kummer, z), L.p).value) res.raw_candidates.push_back(i);
  // trace check: z splits in F^(i) and each prime above it is inert in E
  const auto R = subfield_then_E(L, res.index);
  bool ok = res.raw_candidates.size() == 1 && res.raw_candidates.front() == res.index;
  if (ok && !R.excluded(z.q)) {
    for (const auto& t : tower::base_traces(R, z.q)) {
      if (!(t.zeta == z.zbar)) continue;
      auto up = tower::lift(t, R);
      if (up.size() != L.p) ok = false;
      for (const auto& u : up)
        if (tower::lift(u, R).size() != 1) ok = false;
    }
  }
  res.verified = ok;
  return res;
}

namespace {

bool lattice_excluded(const cyclo::PPSubfieldLattice& L, u64 q) {
  std::vector<tower::RadicalStep> steps{tower::RadicalStep{L.a, {}, "K"}, tower::RadicalStep{L.b, {}, "F"}};
  return tower::RadicalTower(L.a.field(), L.p, std::move(steps)).excluded(q);
}

std::string lattice_parameters(const cyclo::PPSubfieldLattice& L) {
  return "m=" + std::to_string(L.a.m()) + ", a=" + L.a.to_string() + ", b=" + L.b.to_string() + ", p=" + std::to_string(L.p);
}

}  // namespace

SweepReport lemma58_sweep(const cyclo::PPSubfieldLattice& L, u64 X, std::vector<u64>* index_counts) {
  SweepReport rep;
  rep.lemma = "lemma58";
  rep.parameters = lattice_parameters(L);
  rep.range_hi = X;
  const auto primes = primes_up_to(X);
  struct Slot {
    u64 checked = 0, verified = 0;
    bool skipped = false;
    std::vector<u64> counts;
    std::vector<Exception> exc;
  };
  std::vector<Slot> slots(primes.size());
  parallel_for(primes.size(), [&](std::size_t idx) {
    const u64 q = primes[idx];
    Slot& sl = slots[idx];
    sl.counts.assign(L.p + 1, 0);
    if (lattice_excluded(L, q)) {
      sl.skipped = true;
      return;
    }
    try {
      for (const auto& z : cyclo::cyclo_primes_above(L.a.m(), q)) {
        if (ff::is_pth_power(cyclo::reduce_element(L.a, z), L.p).value) continue;
        ++sl.checked;
        auto r = lemma58_classify(L, z);
        if (r.verified) {
          ++sl.verified;
          ++sl.counts[r.index];
        } else {
          sl.exc.push_back(Exception{q, "index " + std::to_string(r.index) + " not confirmed"});
        }
      }
    } catch (const std::exception& e) {
      sl.exc.push_back(Exception{q, e.what()});
    }
  });
  if (index_counts) index_counts->assign(L.p + 1, 0);
  for (std::size_t i = 0; i < primes.size(); ++i) {
    rep.checked += slots[i].checked;
    rep.verified_count += slots[i].verified;
    if (slots[i].skipped) rep.skipped.push_back(primes[i]);
    rep.exceptions.insert(rep.exceptions.end(), slots[i].exc.begin(), slots[i].exc.end());
    if (index_counts && !slots[i].skipped)
      for (std::size_t j = 0; j <= L.p; ++j) (*index_counts)[j] += slots[i].counts[j];
  }
  return rep;
}

SweepReport inert_splits_in_E(const cyclo::PPSubfieldLattice& L, u64 X) {
  SweepReport rep;
  rep.lemma = "inert_splits_in_E";
  rep.parameters = lattice_parameters(L);
  rep.range_hi = X;
  std::vector<tower::RadicalStep> steps{tower::RadicalStep{L.a, {}, "K"}, tower::RadicalStep{L.b, {}, "E"}};
  const tower::RadicalTower R(L.a.field(), L.p, std::move(steps));
  const auto primes = primes_up_to(X);
  struct Slot {
    u64 checked = 0, verified = 0;
    bool skipped = false;
    std::vector<Exception> exc;
  };
  std::vector<Slot> slots(primes.size());
  parallel_for(primes.size(), [&](std::size_t idx) {
    const u64 q = primes[idx];
    Slot& sl = slots[idx];
    if (R.excluded(q)) {
      sl.skipped = true;
      return;
    }
    try {
      for (const auto& t : tower::base_traces(R, q)) {
        auto up = tower::lift(t, R);
        if (up.size() != 1) continue;
        ++sl.checked;
        if (tower::lift(up.front(), R).size() == L.p) ++sl.verified;
        else sl.exc.push_back(Exception{q, "prime inert in K is inert in E"});
      }
    } catch (const std::exception& e) {
      sl.exc.push_back(Exception{q, e.what()});
    }
  });
  for (std::size_t i = 0; i < primes.size(); ++i) {
    rep.checked += slots[i].checked;
    rep.verified_count += slots[i].verified;
    if (slots[i].skipped) rep.skipped.push_back(primes[i]);
    rep.exceptions.insert(rep.exceptions.end(), slots[i].exc.begin(), slots[i].exc.end());
  }
  return rep;
}

}  // namespace kummerlab::split
