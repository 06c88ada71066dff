#pragma once

// Radical towers over Q(zeta_m) and the residue traces of primes through them.
//
// A RadicalTower adjoins y_0, y_1, ... in order, with
//   y_s^p = base_factor_s * prod_{t < s} y_t^{e_{s,t}}  (+ further monomials),
// base_factor_s in Q(zeta_m). Nested Kummer chains, the fields F^(i) and E of
// the (p,p) construction, and their chains all fit this shape. Tower fields
// are never built globally; primes are followed through residue fields.

#include <optional>
#include <string>
#include <vector>

#include "cyclotomic.hpp"
#include "finitefield.hpp"

namespace kummerlab::tower {

struct RadicalTerm {
  cyclo::CycloElement coeff;
  std::vector<u64> exponents;
};

struct RadicalStep {
  cyclo::CycloElement base_factor;
  std::vector<u64> exponents;  // exponent of y_t for t < s; may be shorter than s
  std::string label;
  std::vector<RadicalTerm> terms{};  // further summands of the radicand
  std::vector<u64> support{};      // primes where a summed radicand may fail to be a unit
};

class RadicalTower {
 public:
  RadicalTower(cyclo::CycloFieldPtr base, u64 p, std::vector<RadicalStep> steps);

  const cyclo::CycloFieldPtr& base() const { return base_; }
  u64 m() const { return base_->m(); }
  u64 p() const { return p_; }
  const std::vector<RadicalStep>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  /// Rational primes at which some step may ramify: p, primes dividing m, and
  /// primes dividing the norm or a denominator of some base factor.
  const std::vector<u64>& support() const { return support_; }
  /// True iff q is in support(); such primes are excluded from traces.
  bool excluded(u64 q) const;
  /// Tower restricted to its first k steps.
  RadicalTower prefix(std::size_t k) const;

 private:
  cyclo::CycloFieldPtr base_;
  u64 p_;
  std::vector<RadicalStep> steps_;
  std::vector<u64> support_;
};

/// A prime of the level-j field of a radical tower, represented by the images
/// of zeta_m and y_0, ..., y_{j-1} in its residue field F_{q^d}.
struct PrimeTrace {
  u64 q = 0;
  cyclo::CycloPrime base_prime;
  ff::FieldPtr field;
  ff::FFElement zeta;
  std::vector<ff::FFElement> roots;
  std::vector<unsigned> degrees;  // residue degree over F_q at levels 0..level()

  unsigned level() const { return static_cast<unsigned>(roots.size()); }
  unsigned degree() const { return field->degree(); }
  mpz_class norm() const { return field->order(); }
};

/// Traces of the primes of the base above q. Throws PreconditionError if q is excluded.
std::vector<PrimeTrace> base_traces(const RadicalTower& tower, u64 q);
/// Image of the radicand of the next step at this trace.
ff::FFElement next_radicand(const PrimeTrace& t, const RadicalTower& tower);
/// True iff the next step splits at t (radicand is a p-th power in the residue field).
bool next_step_splits(const PrimeTrace& t, const RadicalTower& tower);
/// The primes above t at the next level: p lifts in the split case, one
/// inert lift otherwise (residue field extended by degree p, least root).
std::vector<PrimeTrace> lift(const PrimeTrace& t, const RadicalTower& tower);
/// All traces above q at the given level.
std::vector<PrimeTrace> traces_at(const RadicalTower& tower, u64 q, unsigned level);

/// Nested chain with Kummer datum alpha. Without sub_base, L_0 is the base
/// field and L_j = L_{j-1}(alpha_j), alpha_1^p = alpha, alpha_j^p = alpha_{j-1}.
/// With sub_base, k is L_{-1}, L_0 = k(alpha_0) with alpha_0^p = alpha, and
/// the chain continues up to L_r. A prefix of steps may precede the chain
/// (the chain then starts from the top field of the prefix).
struct KummerTower {
  cyclo::CycloElement alpha;     // datum after multipliers
  cyclo::CycloElement original;  // datum before multipliers
  u64 p = 2;
  unsigned r = 0;
  bool sub_base = false;
  std::vector<std::pair<mpq_class, u64>> multipliers;  // (beta, exponent)
  std::vector<RadicalStep> prefix;
  bool mu_p2_in_bottom_hint = false;  // set by constructions whose bottom field contains mu_{p^2}

  u64 m() const { return alpha.m(); }
  /// Index in radical() of the step producing level j (j >= 1, or j >= 0 with sub_base).
  std::size_t step_of_level(int j) const;
  int bottom_level() const { return sub_base ? -1 : 0; }
  RadicalTower radical() const;
};

/// Errors: mu_p not in the base; alpha = 0.
KummerTower build_nested_chain(const cyclo::CycloElement& alpha, u64 p, unsigned r, bool sub_base = false);

struct StepDegree {
  int level = 0;
  u64 witness_q = 0;  // 0 if none found
  bool certified = false;
};

struct PairCyclicity {
  int level = 0;  // L_level / L_{level-2}
  bool certified = false;
  std::string reason;
};

struct NestednessCertificate {
  bool valid = false;
  bool inconclusive = false;
  std::string failure;
  u64 witness_q = 0;  // prime certifying that alpha is not a p-th power
  std::vector<StepDegree> degrees;
  std::vector<PairCyclicity> cyclicity;
};

/// Degree and cyclicity checks. Degrees are certified by primes inert at each
/// step (search bound on q), preceded by exact p-th power detection of alpha.
NestednessCertificate verify_nested(const KummerTower& tower, u64 search_bound = 10000);

cyclo::CycloElement modify_datum(const cyclo::CycloElement& alpha, const std::vector<std::pair<mpq_class, u64>>& multipliers);
KummerTower with_multipliers(const KummerTower& tower, const std::vector<std::pair<mpq_class, u64>>& multipliers);

struct RamificationProfile {
  u64 q = 0;
  bool wild = false;
  int valuation = 0;  // t = v_q(alpha')
  std::vector<int> levels;
  std::vector<u64> e;  // e_j per level
};

/// Tame Kummer rule at the chain levels; level j adjoins alpha'^{1/p^{j+1}}
/// (sub_base) or alpha'^{1/p^j}. Throws PreconditionError when q = p or the
/// valuation is not readable from the rational part of the datum.
RamificationProfile ramification_profile(const KummerTower& tower, u64 q);

struct FreshPrimePlan {
  std::vector<std::pair<mpq_class, u64>> multipliers;  // (l_j, p^j)
  std::vector<u64> primes;
  std::vector<RamificationProfile> profiles;
  bool certified = false;  // each l_j unramified below level j and ramified at level j
};

/// Least primes outside forbidden (p and the datum support are added). With
/// one_mod_p, only primes l = 1 mod p are used.
FreshPrimePlan fresh_prime_plan(const KummerTower& tower, std::vector<u64> forbidden, bool one_mod_p = false);

}  // namespace kummerlab::tower
