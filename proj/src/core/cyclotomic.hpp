#pragma once

// The cyclotomic base fields Q(zeta_m): exact elements, primes given by residue
// data, Frobenius, and the (p,p) subfield lattice.

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "finitefield.hpp"

namespace kummerlab::cyclo {

/// Phi_m with integer coefficients, low degree first.
const std::vector<mpz_class>& cyclotomic_polynomial(u64 m);

/// Q(zeta_m) and Q(zeta_{2m}) coincide for odd m; this returns the even
/// representative's partner, i.e. m/2 when m = 2 mod 4.
u64 normalize_conductor(u64 m);

/// True iff mu_n is contained in Q(zeta_m).
bool contains_roots_of_unity(u64 m, u64 n);

class CycloField {
 public:
  explicit CycloField(u64 m);
  u64 m() const { return m_; }
  unsigned degree() const { return static_cast<unsigned>(phi_.size() - 1); }
  const std::vector<mpz_class>& phi() const { return phi_; }
  /// Units a mod m in increasing order (the Galois group).
  const std::vector<u64>& units() const { return units_; }

 private:
  u64 m_;
  std::vector<mpz_class> phi_;
  std::vector<u64> units_;
};

using CycloFieldPtr = std::shared_ptr<const CycloField>;
CycloFieldPtr make_cyclo_field(u64 m);

class CycloElement {
 public:
  CycloElement() = default;
  explicit CycloElement(CycloFieldPtr field);  // zero
  CycloElement(CycloFieldPtr field, std::vector<mpq_class> coeffs);

  static CycloElement rational(CycloFieldPtr field, const mpq_class& c);
  /// zeta_m^k, reduced.
  static CycloElement zeta_power(CycloFieldPtr field, i64 k);

  const CycloFieldPtr& field() const { return field_; }
  u64 m() const { return field_->m(); }
  const std::vector<mpq_class>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_rational() const;
  mpq_class rational_value() const;  // requires is_rational()

  CycloElement operator+(const CycloElement& o) const;
  CycloElement operator-(const CycloElement& o) const;
  CycloElement operator-() const;
  CycloElement operator*(const CycloElement& o) const;
  CycloElement pow(u64 e) const;
  CycloElement inverse() const;
  /// zeta -> zeta^a for a unit a mod m.
  CycloElement galois(u64 a) const;
  CycloElement conj() const { return galois(m() - 1 == 0 ? 1 : m() - 1); }
  mpq_class norm() const;
  /// Value under zeta -> exp(2 pi i a / m).
  std::complex<double> embed(u64 a) const;

  /// Least common denominator of the coefficients.
  mpz_class denominator() const;

  bool operator==(const CycloElement& o) const;
  std::string to_string() const;  // polynomial in z

 private:
  void reduce(std::vector<mpq_class>& raw) const;
  CycloFieldPtr field_;
  std::vector<mpq_class> c_;
};

/// Parses a polynomial expression in z with rational coefficients, e.g.
/// "1+z", "3*(1+z)^2", "-1", "1/2 - z^3". Throws std::invalid_argument.
CycloElement parse_element(const CycloFieldPtr& field, const std::string& text);

/// An exact p-th root of x in Q(zeta_m) when one exists.
std::optional<CycloElement> exact_pth_root(const CycloElement& x, u64 p);

struct CycloPrime {
  u64 m = 1;
  u64 q = 0;
  unsigned f = 1;
  ff::FFElement zbar;  // root of Phi_m of exact order m in make_ext_field(q, f)
  mpz_class norm() const { return pow_mpz(q, f); }
};

/// Primes of Q(zeta_m) above q, one per Frobenius orbit of roots of Phi_m,
/// sorted by zbar. Throws PreconditionError if q divides m.
std::vector<CycloPrime> cyclo_primes_above(u64 m, u64 q);

/// Frobenius at q in Gal(Q(zeta_m)/Q) = (Z/m)^*, i.e. q mod m.
u64 frobenius(u64 m, u64 q);

/// Image of x in the residue field of P. Throws PreconditionError if a
/// denominator is divisible by q.
ff::FFElement reduce_element(const CycloElement& x, const CycloPrime& P);
/// Same, with zeta_m sent to an arbitrary element of order m.
ff::FFElement reduce_element(const CycloElement& x, const ff::FFElement& zeta_image);
/// True iff every coefficient denominator is prime to q.
bool integral_at(const CycloElement& x, u64 q);

/// Gal(E/k) = (Z/p)^2 for E = k(a^{1/p}, b^{1/p}). The element (x, y) sends
/// a^{1/p} to zeta_p^x a^{1/p} and b^{1/p} to zeta_p^y b^{1/p}.
struct PPSubfield {
  unsigned label = 0;
  std::pair<u64, u64> generator;  // H = <generator>, least nontrivial element
  u64 exp_a = 0, exp_b = 0;       // Kummer generator c = a^exp_a b^exp_b
  CycloElement kummer;            // c
  std::string name;
};

struct PPSubfieldLattice {
  u64 p = 2;
  CycloElement a, b;  // K = k(a^{1/p}), F = k(b^{1/p}); F^(0) = K
  std::vector<PPSubfield> subfields;

  /// Label of the fixed field of <sigma> for sigma != 0.
  unsigned label_of(std::pair<u64, u64> sigma) const;
};

/// Throws std::invalid_argument when K = F or either datum is a p-th power.
PPSubfieldLattice pp_lattice(const CycloElement& a, const CycloElement& b, u64 p);

/// Frobenius coordinates of P in Gal(E/k); nullopt if a or b does not reduce
/// to a unit at P (treated as ramified).
std::optional<std::pair<u64, u64>> frobenius_coords(const PPSubfieldLattice& L, const CycloPrime& P);

/// zeta_p inside Q(zeta_m) (requires p | lcm(2, m)).
CycloElement zeta_p(const CycloFieldPtr& field, u64 p);

/// A readable name for k(c^{1/p}); uses Q(sqrt D) for quadratic fields over Q.
std::string radical_field_name(const CycloElement& c, u64 p);

}  // namespace kummerlab::cyclo
