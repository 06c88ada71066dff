#pragma once

// Rankin-Selberg coefficient series for pairs of isobaric character sums:
// exact coefficients of log L_Y and log Z_Y, positivity, pole bookkeeping and
// numerical evaluation on the real line to the right of s = 1.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "automorphic.hpp"
#include "cyclotomic.hpp"

namespace kummerlab::ls {

enum class DegreeBase { Base, Rational };

/// Places v of a field with Nv <= X, optionally filtered by residue degree
/// (over the designated base or over Q) and by rational prime.
struct PrimeSelector {
  aut::FieldPtr field;
  u64 X = 0;
  std::optional<std::set<unsigned>> degrees;
  DegreeBase over = DegreeBase::Base;
  std::set<u64> exceptions;
  std::optional<std::set<u64>> only;  // restrict to these rational primes

  /// Sorted by Nv, then q, then place index. Field-excluded primes are skipped.
  std::vector<aut::Place> enumerate() const;
  /// Copy with every prime dividing a modulus of a or b added to the exceptions.
  PrimeSelector excluding_ramified(const aut::IsobaricRep& a, const aut::IsobaricRep& b) const;
  std::string describe() const;
};

enum class SeriesKind { Y, Z };

struct CoefficientSeries {
  SeriesKind kind = SeriesKind::Z;
  u64 M = 0;
  cyclo::CycloFieldPtr values;  // Q(zeta_m) holding the coefficients
  std::map<u64, cyclo::CycloElement> coeffs;  // only nonzero-index prime powers appear
  std::string pi, pi2, selector;
  std::size_t places = 0;

  /// c_m, zero when m is not a selected prime power.
  cyclo::CycloElement at(u64 m) const;
  std::complex<double> value(u64 m) const;
};

/// c_m for m = Nv^r <= M. Y: (1/r) conj(tr A_v(pi)^r) tr A_v(pi')^r.
/// Z: (1/r) |tr A_v(pi)^r - tr A_v(pi')^r|^2. Requires t = 0 for both; throws
/// PreconditionError if a selected prime ramifies in pi or pi'.
CoefficientSeries rs_coeffs(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel, u64 M,
                            SeriesKind kind = SeriesKind::Z);

/// Coefficient-wise sum (same kind and value field).
CoefficientSeries add_series(const CoefficientSeries& a, const CoefficientSeries& b);

/// One numerical Z term: c at m = Nv^r.
struct ZTerm {
  double log_m = 0;
  double c = 0;
  unsigned r = 1;  // m = Nv^r
  unsigned f = 1;  // residue degree of v over Q
};
/// Terms of log Z with m <= sel.X, in enumeration order.
std::vector<ZTerm> z_terms(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel);
/// Compensated sum of c m^{-s}; throws std::invalid_argument for s <= 1.
double eval_terms(const std::vector<ZTerm>& terms, double s);
double log_partial_Z(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel, double s);

struct PoleBook {
  u64 mu = 0, mu2 = 0, shared = 0;
  i64 neg_ord = 0;  // -ord_{s=1} Z = mu + mu' - 2 shared
};
/// Throws PreconditionError on non-unitary input or different fields.
PoleBook pole_book(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2);

struct PositivityReport {
  std::size_t checked = 0;
  std::size_t nonzero = 0;
  bool all_real = true;
  bool identity_ok = true;  // |a-b|^2 = |a|^2 + |b|^2 - conj(a) b - conj(b) a exactly
  bool all_nonnegative = true;
  std::optional<u64> min_m;
  double min_value = 0;
  bool ok() const { return all_real && identity_ok && all_nonnegative; }
};
PositivityReport positivity_check(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel,
                                  u64 M);

/// Least integer d0 > (n^2+1)/2.
unsigned tail_threshold(unsigned n);

struct TailRow {
  double s = 0;
  double log_Z = 0;
  double ratio = 0;  // log Z_S(s) / log(1/(s-1))
};
struct TailReport {
  unsigned n = 0, d0 = 0;
  std::size_t places = 0;
  std::vector<TailRow> rows;
};
/// Throws std::invalid_argument unless every selected degree is >= tail_threshold(n).
TailReport tail_convergence_report(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, unsigned n,
                                   const PrimeSelector& sel, const std::vector<double>& s_grid);

struct SlopeRow {
  double eps = 0;
  double raw = 0;        // finite sum over m <= X
  double completed = 0;  // raw plus the tail estimate
};
struct SlopeReport {
  u64 X = 0;
  double tail_mean = 0;  // mean of c over degree-one places with X/2 < Nv <= X
  std::vector<SlopeRow> rows;
  double raw_slope = 0, completed_slope = 0;
  std::optional<i64> predicted;
};
/// Least-squares slope of log Z_X(1+eps) against log(1/eps). The tail beyond X
/// is estimated as tail_mean * E1(eps log X).
SlopeReport slope_experiment(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel,
                             const std::vector<double>& eps);

std::string series_csv(const CoefficientSeries& c);
std::string slope_csv(const SlopeReport& r);
std::string tail_csv(const TailReport& r);

}  // namespace kummerlab::ls
