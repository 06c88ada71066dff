#pragma once

// Rational-integer helpers shared by every module: primality, factoring,
// modular arithmetic on machine words, and a deterministic parallel map.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kummerlab {

/// Raised when a certificate search ends without a verdict.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a mathematical precondition of an operation is not met.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

using u64 = std::uint64_t;
using i64 = std::int64_t;

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);
u64 invmod(u64 a, u64 m);  // throws if not invertible
u64 gcd_u64(u64 a, u64 b);
u64 lcm_u64(u64 a, u64 b);

bool is_prime(u64 n);
/// Primes in [2, limit], ascending.
std::vector<u64> primes_up_to(u64 limit);
u64 next_prime(u64 n);  // least prime > n

/// Prime factorization (prime -> exponent) of a machine word.
std::map<u64, unsigned> factor_u64(u64 n);
u64 euler_phi(u64 n);
/// Multiplicative order of a modulo m; requires gcd(a, m) = 1.
u64 mult_order_mod(u64 a, u64 m);

/// Factor a big integer completely. Throws PreconditionError when a composite
/// cofactor resists Pollard-Brent within the work budget.
std::map<mpz_class, unsigned> factor_mpz(const mpz_class& n);

/// q-adic valuation of a nonzero rational.
int valuation(const mpq_class& x, u64 q);

/// Primes dividing the numerator or denominator of a nonzero rational, sorted.
/// Only primes that fit a machine word are returned; larger ones throw.
std::vector<u64> rational_support(const mpq_class& x);

mpz_class pow_mpz(u64 base, u64 exp);
u64 ilog(u64 base, const mpz_class& value);  // exact log; throws if not a power

std::string to_string(const mpz_class& z);
std::string to_string(const mpq_class& z);

/// Number of worker threads used by data-parallel sweeps. Initialised from
/// KUMMERLAB_THREADS, overridable at run time.
unsigned worker_threads();
void set_worker_threads(unsigned n);

/// Calls fn(i) for i in [0, n) on the worker pool. Results are stored by index,
/// so output is independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kummerlab
