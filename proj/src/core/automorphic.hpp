#pragma once

// The character model: isobaric sums of Hecke characters chi o N_{K/Q} with
// chi a Dirichlet character, their Satake classes, base change and twists.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "splitting.hpp"
#include "tower.hpp"

namespace kummerlab::aut {

/// Dirichlet character mod N with values exp(2 pi i e / order), stored as an
/// exponent table (-1 on non-units).
class DirichletCharacter {
 public:
  DirichletCharacter();  // trivial, modulus 1
  static DirichletCharacter trivial() { return DirichletCharacter(); }
  /// Values on the standard generators of (Z/N)^* (see unit_generators):
  /// chi(g_j) = exp(2 pi i a_j / ord(g_j)).
  static DirichletCharacter from_generators(u64 N, const std::vector<u64>& exponents);
  /// Table of exponents with common denominator `order`; validated.
  static DirichletCharacter from_table(u64 N, u64 order, std::vector<i64> table);
  /// n -> (D/n), a character mod 4|D|, reduced to its conductor.
  static DirichletCharacter kronecker(i64 D);

  u64 modulus() const { return N_; }
  u64 order() const { return order_; }
  u64 conductor() const;
  bool is_trivial() const { return order_ == 1; }
  /// Exponent e with chi(x) = exp(2 pi i e / order); nullopt if gcd(x, N) > 1.
  std::optional<u64> exponent(u64 x) const;
  std::complex<double> value(u64 x) const;

  DirichletCharacter operator*(const DirichletCharacter& o) const;
  DirichletCharacter pow(i64 k) const;
  DirichletCharacter conj() const { return pow(-1); }
  /// The primitive character inducing this one.
  DirichletCharacter primitive() const;
  /// Same character viewed mod a multiple M of the modulus.
  DirichletCharacter lift(u64 M) const;
  /// Exponents on unit_generators(modulus()).
  std::vector<u64> generator_exponents() const;

  /// Equality of primitive characters.
  bool operator==(const DirichletCharacter& o) const;
  /// Canonical order: conductor, then generator exponents of the primitive character.
  bool operator<(const DirichletCharacter& o) const;
  std::string to_string() const;

 private:
  DirichletCharacter(u64 N, u64 order, std::vector<i64> table);
  u64 N_ = 1, order_ = 1;
  std::vector<i64> table_{0};
};

struct UnitGenerator {
  u64 g = 1;
  u64 order = 1;
};
/// Generators of (Z/N)^* as a product of cyclic groups: a primitive root for each
/// odd prime power, -1 and 5 for 2^e (e >= 3), -1 for 4; lifted by CRT.
std::vector<UnitGenerator> unit_generators(u64 N);

/// A prime of a number field: Nv = q^f, f_rel the degree over the designated base.
struct Place {
  u64 q = 0;
  unsigned f = 1;
  unsigned f_rel = 1;
  unsigned index = 0;
  mpz_class norm() const { return pow_mpz(q, f); }
  u64 norm_mod(u64 N) const { return N == 1 ? 0 : powmod(q % N, f, N); }
};

/// The primes of a number field, described by residue degrees above each q.
class FieldModel {
 public:
  using PlacesFn = std::function<std::vector<Place>(u64)>;
  using ExcludedFn = std::function<bool(u64)>;
  FieldModel(std::string name, unsigned degree, ExcludedFn excluded, PlacesFn places);

  static std::shared_ptr<const FieldModel> rationals();
  static std::shared_ptr<const FieldModel> cyclotomic(u64 m);
  /// K/k cyclic of degree p; f_rel is the degree over k.
  static std::shared_ptr<const FieldModel> cyclic(const split::CyclicExtension& K);
  /// Level `level` of a radical tower; f_rel is the degree over the tower base.
  /// The parent (by default the level below) bounds the norm subgroup from above.
  static std::shared_ptr<const FieldModel> radical(const tower::RadicalTower& T, unsigned level, std::string name,
                                                   std::shared_ptr<const FieldModel> parent = nullptr);

  const std::string& name() const { return name_; }
  unsigned degree() const { return degree_; }
  /// Primes that may ramify (places are not produced for them).
  bool excluded(u64 q) const { return excluded_(q); }
  std::vector<Place> places(u64 q) const;
  /// Membership table of the subgroup of (Z/L)^* generated by Nv mod L over
  /// unramified places; sampled over primes up to a bound that grows with L,
  /// stopping early once it fills the parent's subgroup.
  const std::vector<char>& norm_subgroup(u64 L) const;
  const std::shared_ptr<const FieldModel>& parent() const { return parent_; }

 private:
  std::shared_ptr<const FieldModel> parent_;
  std::string name_;
  unsigned degree_;
  ExcludedFn excluded_;
  PlacesFn places_;
  mutable std::mutex mu_;
  mutable std::map<u64, std::shared_ptr<std::vector<char>>> subgroups_;
};
using FieldPtr = std::shared_ptr<const FieldModel>;

/// chi o N and psi o N agree as Hecke characters of F.
bool equal_over(const DirichletCharacter& chi, const DirichletCharacter& psi, const FieldModel& F);
bool trivial_over(const DirichletCharacter& chi, const FieldModel& F);

struct Component {
  DirichletCharacter chi;
  unsigned mult = 1;
};

class IsobaricRep {
 public:
  IsobaricRep() = default;
  IsobaricRep(FieldPtr field, std::vector<Component> components, mpq_class t);
  const FieldPtr& field() const { return field_; }
  const std::vector<Component>& components() const { return comps_; }
  const mpq_class& t() const { return t_; }
  unsigned n() const;
  bool unitary() const { return t_ == 0; }
  /// Moduli of all components (lcm).
  u64 modulus() const;
  IsobaricRep twist(const DirichletCharacter& chi) const;
  IsobaricRep conjugate() const;      // conjugate characters, same t
  IsobaricRep contragredient() const; // conjugate characters, -t
  std::string to_string() const;

 private:
  FieldPtr field_;
  std::vector<Component> comps_;
  mpq_class t_;
};

/// Normalizes: components equal over the field are merged; canonical order.
IsobaricRep make_isobaric(FieldPtr field, const std::vector<Component>& components, const mpq_class& t = 0);

/// alpha = exp(2 pi i angle) * q^qexp.
struct Eigenvalue {
  mpq_class angle;  // in [0, 1)
  mpq_class qexp;
  bool operator==(const Eigenvalue& o) const { return angle == o.angle && qexp == o.qexp; }
  bool operator<(const Eigenvalue& o) const { return angle != o.angle ? angle < o.angle : qexp < o.qexp; }
  std::complex<double> value(u64 q) const;
  Eigenvalue pow(u64 f) const;
  Eigenvalue conj() const;
};

struct SatakeClass {
  Place v;
  std::vector<Eigenvalue> eigenvalues;  // sorted
  std::complex<double> trace() const;
  SatakeClass pow(u64 f) const;  // eigenvalues raised to f
  bool same_multiset(const SatakeClass& o) const { return eigenvalues == o.eigenvalues; }
};

/// Throws PreconditionError if q divides some modulus.
SatakeClass satake(const IsobaricRep& pi, const Place& v);
bool unramified_at(const IsobaricRep& pi, u64 q);

IsobaricRep base_change(const IsobaricRep& pi, FieldPtr M);

struct BaseChangeReport {
  u64 qmax = 0;
  u64 places_checked = 0;
  u64 mismatches = 0;
  u64 transitivity_checked = 0;
  u64 transitivity_mismatches = 0;
  bool ok() const { return mismatches == 0 && transitivity_mismatches == 0; }
};

/// pi lives on level `lo` of T (lo = -1 means Q below the base); checks
/// A_w(pi_M) = A_v(pi)^{f} for every place w of level `hi` above q <= qmax,
/// and, when mid is given (lo < mid < hi), (pi_mid)_hi = pi_hi.
BaseChangeReport verify_base_change(const IsobaricRep& pi, const tower::RadicalTower& T, int lo, int hi, u64 qmax,
                                    std::optional<int> mid = std::nullopt);

struct CentralCharacter {
  DirichletCharacter omega;
  mpq_class t;
  mpq_class abs_exponent;  // n t, the |.|^{n t} factor
};
CentralCharacter central_char_and_t(const IsobaricRep& pi);

/// Equal as multisets of Hecke characters over the common field, with equal t.
bool same_rep(const IsobaricRep& a, const IsobaricRep& b);

/// chi with b = a (x) chi over the field of a, if one exists. Candidates
/// chi'_j conj(chi_1) are exhaustive. Throws std::invalid_argument when n differs.
std::optional<DirichletCharacter> twist_equivalent(const IsobaricRep& a, const IsobaricRep& b);

/// Strict bound |alpha| < Nv^{1/2 - 1/(n^2+1)}. Throws std::invalid_argument for n < 2.
bool lrs_check(const SatakeClass& A, unsigned n);

struct TwistElimination {
  u64 j = 0;
  bool premise_ok = true;  // fresh divides neither conductor of eta nor eta'
  bool forced = false;     // j = 0 certified by the conductor argument
  bool inconsistent = false;
  std::string note;
};

/// The j with eta' = eta delta^j (over `field` when given). Throws
/// std::invalid_argument if delta does not have prime order or fresh does not
/// divide its conductor, PreconditionError if no j exists.
TwistElimination twist_eliminate(const DirichletCharacter& eta, const DirichletCharacter& eta2,
                                 const DirichletCharacter& delta, u64 fresh, const FieldModel* field = nullptr);

/// A character of exact order p and conductor l (requires p | l - 1).
DirichletCharacter order_p_character(u64 l, u64 p);

}  // namespace kummerlab::aut
