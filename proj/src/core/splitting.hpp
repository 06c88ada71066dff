#pragma once

// Splitting of primes in cyclic p-extensions and Kummer chains: norm
// certificates for chains and composita, Sigma^j classification, the index of
// a prime in a (p,p) subfield lattice, degree-1 densities and the split-in-E
// dichotomy.

#include <optional>
#include <string>
#include <vector>

#include "cyclotomic.hpp"
#include "tower.hpp"

namespace kummerlab::split {

using tower::PrimeTrace;

/// A cyclic extension K/k of degree p with k = Q(zeta_m), K = k(a^{1/p}).
/// With trivial set, K = k.
struct CyclicExtension {
  cyclo::CycloElement a;
  u64 p = 2;
  bool trivial = false;
  std::string name;

  u64 m() const { return a.m(); }
  tower::RadicalTower radical() const;
};

/// "Q", "Q(i)", "Q(sqrt D)", or "Q(zeta_m)(x^(1/p))" with x a polynomial in z.
CyclicExtension parse_extension(const std::string& text);
CyclicExtension make_extension(const cyclo::CycloElement& a, u64 p);

enum class SigmaClass { Degree1, DegreeP, Ramified };
std::string to_string(SigmaClass c);

struct ClassifiedPrime {
  u64 q = 0;
  unsigned base_index = 0;  // index of the prime of k above q
  unsigned index = 0;       // index among primes of K above that prime
  SigmaClass cls = SigmaClass::Ramified;
  mpz_class norm;           // Nv for the prime of K (Nu for ramified entries)
  unsigned degree_over_q = 0;
};

/// Primes of K above q with their class. Primes where the datum is not a
/// q-unit, primes dividing p m, are reported as Ramified (conservative).
std::vector<ClassifiedPrime> classify_prime(const CyclicExtension& K, u64 q);

struct DensityReport {
  u64 X = 0;
  u64 degree1 = 0;
  u64 degreep = 0;
  u64 total = 0;  // unramified primes of K with Nv <= X
  std::optional<double> ratio;
  std::vector<u64> ramified;  // rational primes treated as ramified
};

DensityReport degree1_density(const CyclicExtension& K, u64 X);

struct Exception {
  u64 q = 0;
  std::string reason;
};

struct SweepReport {
  std::string lemma;
  std::string parameters;
  u64 range_lo = 2, range_hi = 0;
  u64 checked = 0;
  u64 verified_count = 0;
  std::vector<Exception> exceptions;
  std::vector<u64> skipped;  // excluded primes (possibly ramified)
  bool ok() const { return exceptions.empty(); }
};

struct Lemma44Result {
  std::vector<mpz_class> norms;  // Nv_bottom, ..., Nv_r
  bool unique = true;            // one lift at every level
  bool norms_ok = true;          // Nv_j = Nv_{j-1}^p
  std::vector<unsigned> lifts_per_level;
};

/// Traces at the bottom level of the chain (the base, k for sub_base chains,
/// or the top of the prefix) above q.
std::vector<PrimeTrace> chain_bottom_traces(const tower::KummerTower& tower, u64 q);

/// Lifts v0 through the chain. Throws PreconditionError if v0 splits at the
/// first chain step.
Lemma44Result lemma44_check(const tower::KummerTower& tower, const PrimeTrace& v0);

/// lemma44_check at every bottom prime above every non-excluded q <= qmax that
/// is inert at the first step.
SweepReport lemma44_sweep(const tower::KummerTower& tower, u64 qmax);

struct DisjointnessCertificate {
  bool certified = false;
  // one witness (rational prime) per nontrivial exponent vector
  std::vector<std::pair<std::vector<u64>, u64>> witnesses;
};

/// Independence of the data of chains over the same base modulo p-th powers,
/// each nontrivial combination witnessed by a residue non-p-th power.
DisjointnessCertificate certify_disjoint(const std::vector<tower::KummerTower>& towers, u64 search_bound = 10000);

struct Lemma45Entry {
  u64 q = 0;
  Lemma44Result chain;
  mpz_class bound;                  // (Nv0)^{p^r}
  bool unramified_in_compositum = true;
};

struct Lemma45Result {
  DisjointnessCertificate disjoint;
  std::vector<Lemma45Entry> entries;
  bool certified = false;
};

/// Errors: towers not disjoint, mismatched bases, v0 hypotheses unmet.
Lemma45Result lemma45_check(const std::vector<tower::KummerTower>& towers, const std::vector<PrimeTrace>& v0);

/// lemma45_check for every tuple of distinct-q starting primes <= qmax chosen
/// as the i-th inert prime for tower i (each q used once).
SweepReport lemma45_sweep(const std::vector<tower::KummerTower>& towers, u64 qmax);

struct Lemma58Result {
  unsigned index = 0;                  // i in 1..p
  std::pair<u64, u64> frobenius{0, 0};
  bool verified = false;               // split in F^(i), inert in E, uniqueness
  std::vector<unsigned> raw_candidates; // labels i >= 1 where z splits (from residue data)
};

Lemma58Result lemma58_classify(const cyclo::PPSubfieldLattice& L, const cyclo::CycloPrime& z);

/// Sweep over q <= X: every unramified prime of k inert in K gets a unique,
/// directly verified index.
SweepReport lemma58_sweep(const cyclo::PPSubfieldLattice& L, u64 X, std::vector<u64>* index_counts = nullptr);

/// Every unramified prime of k inert in K splits in E = K F.
SweepReport inert_splits_in_E(const cyclo::PPSubfieldLattice& L, u64 X);

/// Radical tower with steps [c_i], [a]: F^(i) then E.
tower::RadicalTower subfield_then_E(const cyclo::PPSubfieldLattice& L, unsigned i);

}  // namespace kummerlab::split
