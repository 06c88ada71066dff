#pragma once

// The determination argument as executable procedures on the character model:
// choice of r, the agreement hypothesis, the auxiliary tower L, degree
// certificates for its primes, the descents L -> E -> K and the end-to-end
// verdict.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "automorphic.hpp"
#include "lseries.hpp"
#include "splitting.hpp"
#include "tower.hpp"

namespace kummerlab::det {

enum class Verdict { Equal, TwistEquivalent, Isomorphic, NotHypothesis, Inconclusive };
std::string to_string(Verdict v);
/// 0 for EQUAL / TWIST-EQUIVALENT / ISOMORPHIC, 2 for NOT-HYPOTHESIS, 3 for INCONCLUSIVE.
int exit_code(Verdict v);

struct RChoice {
  unsigned r = 1;
  bool direct = false;  // p itself exceeds (n^2+1)/2
};
/// Least r >= 1 with p^r > (n^2+1)/2.
RChoice choose_r(unsigned n, u64 p);

/// A place at which two representations disagree.
struct Witness {
  u64 q = 0;
  unsigned f = 1;      // residue degree over Q
  unsigned degree = 1; // over the base
  std::string detail;
};

struct DegreeTable {
  unsigned degree = 1;  // over k
  u64 checked = 0;
  u64 agreed = 0;
};

/// Agreement of pi and pi' at the places of K with Nv <= X, per degree over k.
struct AgreementHypothesis {
  std::string K;
  u64 p = 2;
  u64 X = 0;
  std::vector<DegreeTable> tables;  // degree 1, then degree p
  std::optional<Witness> witness;   // least disagreement in Sigma^1
  std::optional<Witness> witness_p; // least disagreement in Sigma^p
  std::vector<u64> exceptions;      // primes skipped (possibly ramified)
  bool holds() const { return !witness; }
};
AgreementHypothesis compute_hypothesis(const split::CyclicExtension& K, const aut::IsobaricRep& pi,
                                       const aut::IsobaricRep& pi2, u64 X);

struct Prop21Report {
  Verdict verdict = Verdict::Inconclusive;
  std::string field;
  unsigned n = 0, d0 = 0;
  u64 X = 0;
  u64 places_checked = 0;
  std::optional<Witness> witness;
  bool model_equal = false;
  ls::PoleBook poles;
  std::optional<ls::SlopeReport> slope;
  std::vector<aut::Component> peeled;        // common components removed, canonical order
  std::vector<aut::Component> residual, residual2;
};
/// Agreement at every place of degree < d0 over Q with Nv <= X, the exact model
/// verdict, peeling of common components and (for a nonempty grid) the slope
/// of log Z near s = 1. Requires unitary input.
Prop21Report prop21_experiment(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, u64 X,
                               const std::vector<double>& eps = {});

/// One chain of the construction: a sub-base Kummer chain over k (K = E) or over
/// F^(i) given by a prefix step (K != E).
struct Chain {
  unsigned index = 0;  // i in 1..p, 0 for the K = E chain
  std::string subfield;
  tower::KummerTower tower;
  tower::FreshPrimePlan fresh;
  tower::RadicalStep anchor;  // radicand of the first step above E, before fresh multipliers
  std::string anchor_text;
  bool quartic = false;       // anchor d + x sqrt(d) with d = x^2 + y^2 over the bottom field
};

/// A level of the compositum above E.
struct LevelStep {
  unsigned level = 0;  // compositum level produced by this step
  unsigned chain = 0;  // position in chains
  unsigned chain_level = 0;
  u64 fresh = 0;
};

struct TowerPlan {
  split::CyclicExtension K;
  unsigned n = 0;
  RChoice r;
  bool K_is_E = false;
  std::optional<cyclo::PPSubfieldLattice> lattice;
  std::vector<Chain> chains;
  std::shared_ptr<tower::RadicalTower> compositum;  // k, K, (E), chain steps
  unsigned E_level = 1;
  std::vector<LevelStep> steps;
  aut::FieldPtr field_K, field_E, field_L;
  std::vector<aut::FieldPtr> level_fields;  // compositum levels 0..top
  std::vector<tower::RadicalStep> prelude;  // k -> K (-> E)
  std::vector<std::shared_ptr<tower::RadicalTower>> chain_towers;  // prelude + one chain
  std::vector<u64> forbidden;
  std::string obstruction;  // set when a p = 2 bottom layer could not be made cyclic of order 4
  bool corrupted = false;
  unsigned top() const { return static_cast<unsigned>(level_fields.size()) - 1; }
};
/// Errors: PreconditionError when K is trivial or mu_p is not in k.
/// For p = 2 a chain whose bottom field lacks mu_4 is anchored at d + x sqrt(d),
/// d = x^2 + y^2 there, so that its first layer is cyclic of order 4.
TowerPlan build_L(const split::CyclicExtension& K, unsigned n, std::vector<u64> forbidden = {});
/// The negative control: each chain anchored at the datum of its own F^(i),
/// which does not generate E over F^(i).
TowerPlan corrupt_plan(const TowerPlan& plan);

struct Prop53Report {
  u64 X = 0;
  u64 bound = 0;  // p^r
  u64 inert_checked = 0;
  u64 inert_certified = 0;
  u64 split_count = 0;
  std::vector<u64> index_counts;  // K != E: how often each F^(i) was used
  unsigned min_degree = 0;        // least degree over K of a chain prime above Sigma^p
  std::vector<split::Exception> exceptions;
  std::vector<u64> skipped;
  bool ok() const { return exceptions.empty(); }
};
/// Every prime of L above a prime of k inert in K has degree >= p^r over K:
/// the prime is followed through K, E (subfield index i) and the steps of
/// chain i, each of which must be inert.
Prop53Report verify_prop53(const TowerPlan& plan, u64 X);

/// Agreement over L at its places of small degree over K.
struct LAgreementReport {
  u64 X = 0;
  unsigned d0 = 0;
  u64 places = 0;
  u64 small_degree = 0;       // degree over K < d0
  u64 small_over_sigma1 = 0;  // of these, above Sigma^1
  u64 small_agree = 0;
  u64 large_over_sigmap = 0;  // above Sigma^p, degree >= p^r over K
  std::optional<Witness> witness;
  bool model_equal = false;
  bool ok() const { return !witness && small_over_sigma1 == small_degree && small_agree == small_degree && model_equal; }
};
LAgreementReport prop21_over_L(const TowerPlan& plan, const aut::IsobaricRep& piK, const aut::IsobaricRep& pi2K,
                               u64 X_L);

struct DescentStep {
  unsigned level = 0;
  unsigned chain = 0, chain_level = 0;
  u64 fresh = 0;
  std::string field;
  std::string delta;
  std::vector<aut::TwistElimination> pairs;
  bool ok = true;
};
struct DescentCertificate {
  bool premise = false;  // pi_L = pi'_L in the model
  std::vector<DescentStep> steps;
  bool fresh_increasing = true;  // bottom-up along the compositum
  bool ok = false;
  std::string failure;
  std::string statement;
};
DescentCertificate descent_6(const aut::IsobaricRep& piE, const aut::IsobaricRep& pi2E, const TowerPlan& plan);

struct Descent7Report {
  bool passthrough = false;
  u64 X = 0;
  u64 sigma1_checked = 0, sigma1_agree = 0;
  u64 sigmap_checked = 0, sigmap_agree = 0;
  std::optional<Witness> witness;
  std::vector<split::Exception> exceptions;
  bool model_equal = false;
  Verdict verdict = Verdict::Inconclusive;
};
Descent7Report descent_7(const TowerPlan& plan, const AgreementHypothesis& hyp, const aut::IsobaricRep& piK,
                         const aut::IsobaricRep& pi2K, const DescentCertificate& cert);

struct StageSummary {
  std::string name;
  std::string verdict;
  std::string detail;
};

struct TheoremAOptions {
  u64 X = 100000;
  u64 X_L = 2000;
  u64 X_prop53 = 2000;
};

/// Pair-independent part of the pipeline for (K, n): the plan and its degree certificate.
struct TheoremAContext {
  TowerPlan plan;
  Prop53Report prop53;
};
TheoremAContext prepare_context(const split::CyclicExtension& K, unsigned n, std::vector<u64> forbidden, u64 X_prop53);

struct TheoremAReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string K;
  std::string pi, pi2;
  aut::CentralCharacter omega, omega2;
  AgreementHypothesis hypothesis;
  std::optional<RChoice> r;
  std::optional<Prop53Report> prop53;
  std::optional<Prop21Report> prop21_direct;
  std::optional<LAgreementReport> prop21_L;
  std::optional<DescentCertificate> descent6;
  std::optional<Descent7Report> descent7;
  std::optional<aut::DirichletCharacter> twist;
  bool corollary_b = false;
  std::vector<StageSummary> stages;
  std::vector<u64> fresh_primes;
};
/// The context is rebuilt when absent or when its fresh primes meet a conductor of the pair.
TheoremAReport theorem_a(const split::CyclicExtension& K, const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2,
                         const TheoremAOptions& opt = {}, const TheoremAContext* ctx = nullptr);

/// Primes dividing a modulus of a component.
std::vector<u64> conductor_primes(const aut::IsobaricRep& a, const aut::IsobaricRep& b);

}  // namespace kummerlab::det
