#pragma once

// Exact arithmetic in F_q and F_{q^d}.
//
// Every extension is presented by the lexicographically least monic
// irreducible polynomial of its degree, comparing (c_{d-1}, ..., c_0) with the
// leading coefficient first. Elements are coefficient vectors in the power
// basis 1, t, ..., t^{d-1}; the canonical order on elements is the integer
// order of sum c_i q^i, which is the same high-degree-first lexicographic order.

#include <compare>
#include <memory>
#include <mutex>
#include <vector>

#include "arith.hpp"

namespace kummerlab::ff {

using Coeffs = std::vector<u64>;  // low degree first

class ExtField {
 public:
  /// Field with an explicit monic irreducible modulus (low degree first,
  /// length d + 1). Irreducibility is the caller's responsibility.
  ExtField(u64 q, Coeffs modulus, bool canonical);

  u64 q() const { return q_; }
  unsigned degree() const { return d_; }
  const Coeffs& modulus() const { return modulus_; }
  bool canonical() const { return canonical_; }
  mpz_class order() const { return pow_mpz(q_, d_); }  // q^d

  /// Matrix of x -> x^q in the power basis; column j is t^{jq}.
  const std::vector<Coeffs>& frobenius_matrix() const;

  // Arithmetic kernels on raw coefficient arrays of length d.
  void mul(const u64* a, const u64* b, u64* out) const;
  void sqr(const u64* a, u64* out) const { mul(a, a, out); }

 private:
  u64 q_;
  unsigned d_;
  Coeffs modulus_;
  bool canonical_;
  u64 lazy_bound_;
  std::vector<std::pair<unsigned, u64>> tail_;  // (k, q - m_k) for nonzero m_k, k < d
  mutable std::once_flag frob_once_;
  mutable std::vector<Coeffs> frob_;
};

using FieldPtr = std::shared_ptr<const ExtField>;

/// Canonical F_{q^d}. Results are cached, so repeated calls return the same object.
FieldPtr make_ext_field(u64 q, unsigned d);

/// Lexicographically least monic irreducible of degree d over F_q.
Coeffs least_irreducible(u64 q, unsigned d);
/// Irreducibility over F_q by distinct-degree factorization.
bool is_irreducible(u64 q, const Coeffs& f);

class FFElement {
 public:
  FFElement() = default;
  explicit FFElement(FieldPtr field);  // zero
  FFElement(FieldPtr field, Coeffs coeffs);

  static FFElement constant(FieldPtr field, u64 c);
  static FFElement generator(FieldPtr field);  // class of t
  /// Element with canonical index k (0 <= k < q^d).
  static FFElement from_index(FieldPtr field, const mpz_class& k);

  const FieldPtr& field() const { return field_; }
  const Coeffs& coeffs() const { return c_; }
  u64 q() const { return field_->q(); }
  unsigned degree() const { return field_->degree(); }

  bool is_zero() const;
  bool is_one() const;
  mpz_class index() const;

  FFElement operator+(const FFElement& o) const;
  FFElement operator-(const FFElement& o) const;
  FFElement operator-() const;
  FFElement operator*(const FFElement& o) const;
  FFElement scaled(u64 c) const;
  FFElement pow(const mpz_class& e) const;
  FFElement pow(u64 e) const { return pow(mpz_class(static_cast<unsigned long>(e))); }
  FFElement inverse() const;
  /// x^(q^k) via the Frobenius matrix.
  FFElement frobenius(unsigned k = 1) const;

  bool operator==(const FFElement& o) const;
  std::strong_ordering operator<=>(const FFElement& o) const;

  std::string to_string() const;

 private:
  void check_same(const FFElement& o) const;
  FieldPtr field_;
  Coeffs c_;
};

struct PthPowerResult {
  bool value = false;
  bool zero_input = false;  // x == 0: value is true by convention
};

PthPowerResult is_pth_power(const FFElement& x, u64 p);
/// All y with y^p = x, sorted canonically. Length 0, 1 or p.
std::vector<FFElement> pth_roots(const FFElement& x, u64 p);
/// Least e >= 1 with x^e = 1. Throws PreconditionError if q^d - 1 cannot be factored.
mpz_class mult_order(const FFElement& x);
/// Least element (canonical order) that is not a p-th power; p must divide q^d - 1.
FFElement least_non_pth_power(const FieldPtr& field, u64 p);

/// Field embedding F_{q^e} -> F_{q^d} sending the generator of the canonical
/// F_{q^e} to the least root (canonical order) of its modulus in F_{q^d}.
class Embedding {
 public:
  Embedding(FieldPtr from, FieldPtr to, FFElement generator_image);
  const FieldPtr& from() const { return from_; }
  const FieldPtr& to() const { return to_; }
  const FFElement& generator_image() const { return image_; }
  FFElement apply(const FFElement& x) const;

 private:
  FieldPtr from_, to_;
  FFElement image_;
  std::vector<FFElement> powers_;
};

/// Cached canonical embedding between canonical fields; e must divide d.
std::shared_ptr<const Embedding> canonical_embedding(u64 q, unsigned e, unsigned d);

/// Roots in `field` of a polynomial with F_q coefficients (low degree first),
/// sorted canonically. Brute force over the field; intended for small fields.
std::vector<FFElement> roots_by_exhaustion(const Coeffs& f, const FieldPtr& field);

/// Evaluates a polynomial with F_q coefficients at x.
FFElement evaluate(const Coeffs& f, const FFElement& x);

}  // namespace kummerlab::ff
