#include "arith.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

namespace kummerlab {

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 gcd_u64(u64 a, u64 b) { return std::gcd(a, b); }
u64 lcm_u64(u64 a, u64 b) { return a / std::gcd(a, b) * b; }

u64 invmod(u64 a, u64 m) {
  i64 t = 0, new_t = 1;
  i64 r = static_cast<i64>(m), new_r = static_cast<i64>(a % m);
  while (new_r != 0) {
    i64 quotient = r / new_r;
    t = std::exchange(new_t, t - quotient * new_t);
    r = std::exchange(new_r, r - quotient * new_r);
  }
  if (r != 1) throw std::invalid_argument("invmod: element not invertible");
  if (t < 0) t += static_cast<i64>(m);
  return static_cast<u64>(t);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for all 64-bit integers.
  for (u64 a : {2, 325, 9375, 28178, 450775, 9780504, 1795265022}) {
    a %= n;
    if (a == 0) continue;
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<u64> primes_up_to(u64 limit) {
  std::vector<u64> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

u64 next_prime(u64 n) {
  u64 c = n + 1;
  while (!is_prime(c)) ++c;
  return c;
}

namespace {

u64 pollard_brent_u64(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 m = 128;
    u64 r = 1;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(u64 n, std::map<u64, unsigned>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  u64 d = pollard_brent_u64(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::map<u64, unsigned> factor_u64(u64 n) {
  if (n == 0) throw std::invalid_argument("factor_u64: zero");
  std::map<u64, unsigned> out;
  for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
    while (n % p == 0) {
      ++out[p];
      n /= p;
    }
  }
  factor_into(n, out);
  return out;
}

u64 euler_phi(u64 n) {
  u64 phi = n;
  for (auto [p, e] : factor_u64(n)) phi = phi / p * (p - 1);
  return phi;
}

u64 mult_order_mod(u64 a, u64 m) {
  if (m == 1) return 1;
  if (std::gcd(a % m, m) != 1) throw std::invalid_argument("mult_order_mod: not a unit");
  u64 order = euler_phi(m);
  for (auto [p, e] : factor_u64(order)) {
    for (unsigned i = 0; i < e && order % p == 0 && powmod(a, order / p, m) == 1; ++i) order /= p;
  }
  return order;
}

namespace {

bool pollard_brent_mpz(const mpz_class& n, mpz_class& factor, unsigned long budget) {
  for (unsigned long c = 1; c < 8; ++c) {
    mpz_class y = 2, x = 2, g = 1, q = 1, ys = 2;
    unsigned long r = 1, iterations = 0;
    auto f = [&](const mpz_class& v) {
      mpz_class t = v * v + c;
      return mpz_class(t % n);
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        unsigned long steps = std::min<unsigned long>(64, r - k);
        for (unsigned long i = 0; i < steps; ++i) {
          y = f(y);
          mpz_class diff = abs(x - y);
          q = (q * diff) % n;
        }
        g = gcd(q, n);
        k += 64;
        iterations += steps;
      } while (k < r && g == 1);
      r <<= 1;
      if (iterations > budget) break;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(mpz_class(abs(x - ys)), n);
      } while (g == 1);
    }
    if (g != 1 && g != n) {
      factor = g;
      return true;
    }
  }
  return false;
}

void factor_mpz_into(const mpz_class& n, std::map<mpz_class, unsigned>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
    ++out[n];
    return;
  }
  if (n.fits_ulong_p()) {
    for (auto [p, e] : factor_u64(n.get_ui())) out[mpz_class(p)] += e;
    return;
  }
  mpz_class d;
  if (!pollard_brent_mpz(n, d, 4'000'000)) {
    throw PreconditionError("factor_mpz: unable to split composite cofactor " + n.get_str());
  }
  factor_mpz_into(d, out);
  factor_mpz_into(mpz_class(n / d), out);
}

}  // namespace

std::map<mpz_class, unsigned> factor_mpz(const mpz_class& n_in) {
  if (n_in <= 0) throw std::invalid_argument("factor_mpz: nonpositive input");
  mpz_class n = n_in;
  std::map<mpz_class, unsigned> out;
  for (unsigned long p = 2; p < 100000; p = (p == 2 ? 3 : p + 2)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      unsigned e = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        n /= p;
        ++e;
      }
      out[mpz_class(p)] += e;
    }
    if (mpz_class(p) * p > n) break;
  }
  factor_mpz_into(n, out);
  return out;
}

int valuation(const mpq_class& x, u64 q) {
  if (x == 0) throw std::invalid_argument("valuation: zero");
  int v = 0;
  mpz_class num = x.get_num(), den = x.get_den();
  while (mpz_divisible_ui_p(num.get_mpz_t(), q)) {
    num /= q;
    ++v;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), q)) {
    den /= q;
    --v;
  }
  return v;
}

std::vector<u64> rational_support(const mpq_class& x) {
  if (x == 0) throw std::invalid_argument("rational_support: zero");
  std::vector<u64> out;
  for (const mpz_class& part : {mpz_class(abs(x.get_num())), mpz_class(x.get_den())}) {
    for (const auto& [p, e] : factor_mpz(part)) {
      if (!p.fits_ulong_p()) throw PreconditionError("rational_support: prime exceeds machine word");
      out.push_back(p.get_ui());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

mpz_class pow_mpz(u64 base, u64 exp) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

u64 ilog(u64 base, const mpz_class& value) {
  u64 k = 0;
  mpz_class v = value;
  while (v > 1) {
    if (!mpz_divisible_ui_p(v.get_mpz_t(), base)) throw std::invalid_argument("ilog: not a power");
    v /= base;
    ++k;
  }
  if (v != 1) throw std::invalid_argument("ilog: not a power");
  return k;
}

std::string to_string(const mpz_class& z) { return z.get_str(); }
std::string to_string(const mpq_class& z) { return z.get_str(); }

namespace {
std::atomic<unsigned> g_threads{0};
}

unsigned worker_threads() {
  unsigned n = g_threads.load();
  if (n == 0) {
    n = 1;
    if (const char* env = std::getenv("KUMMERLAB_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = static_cast<unsigned>(v);
    }
    g_threads.store(n);
  }
  return n;
}

void set_worker_threads(unsigned n) { g_threads.store(n == 0 ? 1 : n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned threads = std::min<std::size_t>(worker_threads(), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failure_index = n;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          // keep the lowest failing index so errors do not depend on scheduling
          if (i < failure_index) {
            failure_index = i;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kummerlab
