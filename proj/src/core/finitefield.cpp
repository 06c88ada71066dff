#include "finitefield.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

namespace kummerlab::ff {

namespace {

constexpr u64 kMaxCharacteristic = u64{1} << 31;

// ---------------------------------------------------------------------------
// Dense polynomials over F_q (low degree first, trimmed).

void trim(Coeffs& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int deg(const Coeffs& a) { return static_cast<int>(a.size()) - 1; }

Coeffs poly_sub(Coeffs a, const Coeffs& b, u64 q) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + q - b[i]) % q;
  trim(a);
  return a;
}

Coeffs poly_mod(Coeffs a, const Coeffs& m, u64 q) {
  trim(a);
  const int dm = deg(m);
  const u64 lead_inv = invmod(m.back(), q);
  for (int i = deg(a); i >= dm; --i) {
    u64 c = mulmod(a[i], lead_inv, q);
    if (c == 0) continue;
    for (int k = 0; k <= dm; ++k) {
      a[i - dm + k] = (a[i - dm + k] + q - mulmod(c, m[k], q)) % q;
    }
  }
  a.resize(std::min<std::size_t>(a.size(), dm));
  trim(a);
  return a;
}

Coeffs poly_gcd(Coeffs a, Coeffs b, u64 q) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    a = poly_mod(std::move(a), b, q);
    std::swap(a, b);
  }
  if (!a.empty()) {
    u64 inv = invmod(a.back(), q);
    for (auto& c : a) c = mulmod(c, inv, q);
  }
  return a;
}

// Square-and-multiply on raw arrays in a field (or quotient ring) presentation.
Coeffs raw_pow(const ExtField& F, const Coeffs& base, const mpz_class& e) {
  const unsigned d = F.degree();
  Coeffs result(d, 0), tmp(d);
  result[0] = 1 % F.q();
  if (e == 0) return result;
  // 4-bit fixed window.
  std::vector<Coeffs> table(16, Coeffs(d, 0));
  table[0] = result;
  table[1] = base;
  for (int i = 2; i < 16; ++i) F.mul(table[i - 1].data(), base.data(), table[i].data());
  const long bits = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2));
  long top = ((bits + 3) / 4) * 4 - 4;
  bool started = false;
  for (long pos = top; pos >= 0; pos -= 4) {
    unsigned window = 0;
    for (int b = 3; b >= 0; --b) window = (window << 1) | mpz_tstbit(e.get_mpz_t(), pos + b);
    if (started) {
      for (int s = 0; s < 4; ++s) {
        F.sqr(result.data(), tmp.data());
        std::swap(result, tmp);
      }
    }
    if (window) {
      if (started) {
        F.mul(result.data(), table[window].data(), tmp.data());
        std::swap(result, tmp);
      } else {
        result = table[window];
      }
      started = true;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Linear algebra over F_q.

// Kernel of the d x n matrix given by its columns; returns basis vectors in
// reduced form (free variables set to unit vectors in increasing order).
std::vector<Coeffs> kernel(const std::vector<Coeffs>& columns, u64 q) {
  const std::size_t n = columns.size();
  const std::size_t rows = n ? columns[0].size() : 0;
  std::vector<Coeffs> m(rows, Coeffs(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < rows; ++i) m[i][j] = columns[j][i];
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    u64 inv = invmod(m[r][c], q);
    for (auto& v : m[r]) v = mulmod(v, inv, q);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      u64 f = m[i][c];
      for (std::size_t k = 0; k < n; ++k) m[i][k] = (m[i][k] + q - mulmod(f, m[r][k], q)) % q;
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<Coeffs> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Coeffs v(n, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = (q - m[i][f]) % q;
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solves sum_j x_j * columns[j] = target. Returns nullopt if the columns are
// dependent or the system is inconsistent.
std::optional<Coeffs> solve_independent(const std::vector<Coeffs>& columns, const Coeffs& target, u64 q) {
  const std::size_t n = columns.size();
  const std::size_t rows = target.size();
  std::vector<Coeffs> m(rows, Coeffs(n + 1));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = columns[j][i];
    m[i][n] = target[i];
  }
  std::size_t r = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) return std::nullopt;
    std::swap(m[piv], m[r]);
    u64 inv = invmod(m[r][c], q);
    for (auto& v : m[r]) v = mulmod(v, inv, q);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      u64 f = m[i][c];
      for (std::size_t k = 0; k <= n; ++k) m[i][k] = (m[i][k] + q - mulmod(f, m[r][k], q)) % q;
    }
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (m[i][n] != 0) return std::nullopt;
  Coeffs x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = m[j][n];
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExtField

ExtField::ExtField(u64 q, Coeffs modulus, bool canonical)
    : q_(q), modulus_(std::move(modulus)), canonical_(canonical) {
  if (q < 2 || q >= kMaxCharacteristic) throw std::invalid_argument("ExtField: characteristic out of range");
  if (modulus_.size() < 2 || modulus_.back() != 1) throw std::invalid_argument("ExtField: modulus must be monic of degree >= 1");
  d_ = static_cast<unsigned>(modulus_.size() - 1);
  lazy_bound_ = ((u64{1} << 63) / q_) * q_;
  for (unsigned k = 0; k < d_; ++k) {
    if (modulus_[k] % q_ != 0) tail_.emplace_back(k, q_ - modulus_[k] % q_);
  }
}

void ExtField::mul(const u64* a, const u64* b, u64* out) const {
  const unsigned d = d_;
  if (d == 1) {
    out[0] = mulmod(a[0], b[0], q_);
    return;
  }
  thread_local std::vector<u64> acc;
  acc.assign(2 * d - 1, 0);
  const u64 bound = lazy_bound_;
  for (unsigned i = 0; i < d; ++i) {
    const u64 ai = a[i];
    if (ai == 0) continue;
    u64* row = acc.data() + i;
    for (unsigned j = 0; j < d; ++j) {
      u64 v = row[j] + ai * b[j];
      row[j] = v >= bound ? v - bound : v;
    }
  }
  for (unsigned i = 2 * d - 2; i >= d; --i) {
    const u64 c = acc[i] % q_;
    if (c == 0) continue;
    u64* base = acc.data() + (i - d);
    for (const auto& [k, neg] : tail_) {
      u64 v = base[k] + c * neg;
      base[k] = v >= bound ? v - bound : v;
    }
  }
  for (unsigned i = 0; i < d; ++i) out[i] = acc[i] % q_;
}

const std::vector<Coeffs>& ExtField::frobenius_matrix() const {
  std::call_once(frob_once_, [this] {
    Coeffs t(d_, 0);
    if (d_ > 1) t[1] = 1;
    else t[0] = (q_ - modulus_[0] % q_) % q_;  // the root of t + m_0
    Coeffs tq = raw_pow(*this, t, mpz_class(static_cast<unsigned long>(q_)));
    frob_.assign(d_, Coeffs(d_, 0));
    frob_[0][0] = 1;
    for (unsigned j = 1; j < d_; ++j) mul(frob_[j - 1].data(), tq.data(), frob_[j].data());
  });
  return frob_;
}

// ---------------------------------------------------------------------------
// Irreducibility and canonical moduli

bool is_irreducible(u64 q, const Coeffs& f_in) {
  Coeffs f = f_in;
  trim(f);
  const int d = deg(f);
  if (d < 1) return false;
  if (d == 1) return true;
  if (f[0] % q == 0) return false;
  Coeffs monic = f;
  u64 inv = invmod(f.back(), q);
  for (auto& c : monic) c = mulmod(c, inv, q);
  ExtField ring(q, monic, false);
  Coeffs x(d, 0);
  x[1] = 1;
  Coeffs h = x;
  const mpz_class qz(static_cast<unsigned long>(q));
  for (int k = 1; k <= d / 2; ++k) {
    h = raw_pow(ring, h, qz);
    Coeffs diff = poly_sub(h, x, q);
    Coeffs g = poly_gcd(monic, diff, q);
    if (deg(g) > 0) return false;
  }
  return true;
}

Coeffs least_irreducible(u64 q, unsigned d) {
  if (d == 0) throw std::invalid_argument("least_irreducible: degree must be >= 1");
  Coeffs f(d + 1, 0);
  f[d] = 1;
  if (d == 1) return f;  // t
  // Enumerate (c_{d-1}, ..., c_0) as a base-q counter, least significant c_0.
  for (;;) {
    if (f[0] != 0 && is_irreducible(q, f)) return f;
    unsigned i = 0;
    while (i < d) {
      if (++f[i] < q) break;
      f[i] = 0;
      ++i;
    }
    if (i == d) throw std::logic_error("least_irreducible: exhausted candidates");
  }
}

FieldPtr make_ext_field(u64 q, unsigned d) {
  if (!is_prime(q)) throw std::invalid_argument("make_ext_field: q = " + std::to_string(q) + " is not prime");
  if (d < 1) throw std::invalid_argument("make_ext_field: degree must be >= 1");
  if (q >= kMaxCharacteristic) throw std::invalid_argument("make_ext_field: characteristic too large");
  static std::mutex mutex;
  static std::map<std::pair<u64, unsigned>, FieldPtr> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({q, d});
    if (it != cache.end()) return it->second;
  }
  auto field = std::make_shared<const ExtField>(q, least_irreducible(q, d), true);
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(q, d), field).first->second;
}

// ---------------------------------------------------------------------------
// FFElement

FFElement::FFElement(FieldPtr field) : field_(std::move(field)), c_(field_->degree(), 0) {}

FFElement::FFElement(FieldPtr field, Coeffs coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
  if (c_.size() != field_->degree()) throw std::invalid_argument("FFElement: coefficient vector has wrong length");
  for (auto& v : c_) v %= field_->q();
}

FFElement FFElement::constant(FieldPtr field, u64 c) {
  FFElement x(std::move(field));
  x.c_[0] = c % x.q();
  return x;
}

FFElement FFElement::generator(FieldPtr field) {
  FFElement x(std::move(field));
  if (x.degree() > 1) x.c_[1] = 1;
  else x.c_[0] = (x.q() - x.field_->modulus()[0]) % x.q();
  return x;
}

FFElement FFElement::from_index(FieldPtr field, const mpz_class& k) {
  FFElement x(std::move(field));
  mpz_class v = k;
  for (unsigned i = 0; i < x.degree(); ++i) {
    x.c_[i] = mpz_class(v % x.q()).get_ui();
    v /= x.q();
  }
  if (v != 0) throw std::invalid_argument("FFElement::from_index: index out of range");
  return x;
}

bool FFElement::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](u64 v) { return v == 0; });
}

bool FFElement::is_one() const {
  if (c_.empty() || c_[0] != 1) return false;
  return std::all_of(c_.begin() + 1, c_.end(), [](u64 v) { return v == 0; });
}

mpz_class FFElement::index() const {
  mpz_class v = 0;
  for (std::size_t i = c_.size(); i-- > 0;) v = v * q() + c_[i];
  return v;
}

void FFElement::check_same(const FFElement& o) const {
  if (field_.get() != o.field_.get() &&
      (field_->q() != o.field_->q() || field_->modulus() != o.field_->modulus())) {
    throw std::invalid_argument("FFElement: operands live in different fields");
  }
}

FFElement FFElement::operator+(const FFElement& o) const {
  check_same(o);
  FFElement r(field_);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    u64 v = c_[i] + o.c_[i];
    r.c_[i] = v >= q() ? v - q() : v;
  }
  return r;
}

FFElement FFElement::operator-(const FFElement& o) const {
  check_same(o);
  FFElement r(field_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (c_[i] + q() - o.c_[i]) % q();
  return r;
}

FFElement FFElement::operator-() const {
  FFElement r(field_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (q() - c_[i]) % q();
  return r;
}

FFElement FFElement::operator*(const FFElement& o) const {
  check_same(o);
  FFElement r(field_);
  field_->mul(c_.data(), o.c_.data(), r.c_.data());
  return r;
}

FFElement FFElement::scaled(u64 c) const {
  FFElement r(field_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = mulmod(c_[i], c % q(), q());
  return r;
}

FFElement FFElement::pow(const mpz_class& e) const {
  if (e < 0) return inverse().pow(mpz_class(-e));
  return FFElement(field_, raw_pow(*field_, c_, e));
}

FFElement FFElement::inverse() const {
  if (is_zero()) throw std::domain_error("FFElement::inverse: zero has no inverse");
  // Extended Euclid in F_q[t]: find s with s * a == 1 mod modulus.
  const u64 qq = q();
  Coeffs r0 = field_->modulus(), r1 = c_;
  trim(r1);
  Coeffs s0{}, s1{1};
  while (deg(r1) > 0) {
    // r0 = quot * r1 + rem
    Coeffs rem = r0, quot(std::max(0, deg(r0) - deg(r1) + 1), 0);
    u64 lead_inv = invmod(r1.back(), qq);
    for (int i = deg(rem); i >= deg(r1); --i) {
      u64 c = mulmod(rem[i], lead_inv, qq);
      quot[i - deg(r1)] = c;
      if (c == 0) continue;
      for (int k = 0; k <= deg(r1); ++k) rem[i - deg(r1) + k] = (rem[i - deg(r1) + k] + qq - mulmod(c, r1[k], qq)) % qq;
    }
    trim(rem);
    // s2 = s0 - quot * s1
    Coeffs prod(quot.size() + s1.size(), 0);
    for (std::size_t i = 0; i < quot.size(); ++i)
      for (std::size_t j = 0; j < s1.size(); ++j) prod[i + j] = (prod[i + j] + mulmod(quot[i], s1[j], qq)) % qq;
    Coeffs s2 = poly_sub(s0, prod, qq);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  u64 inv = invmod(r1[0], qq);
  Coeffs out(degree(), 0);
  Coeffs reduced = poly_mod(s1, field_->modulus(), qq);
  for (std::size_t i = 0; i < reduced.size(); ++i) out[i] = mulmod(reduced[i], inv, qq);
  return FFElement(field_, std::move(out));
}

FFElement FFElement::frobenius(unsigned k) const {
  const auto& m = field_->frobenius_matrix();
  const unsigned d = degree();
  const u64 qq = q();
  Coeffs cur = c_, next(d);
  for (unsigned step = 0; step < k; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (unsigned j = 0; j < d; ++j) {
      if (cur[j] == 0) continue;
      for (unsigned i = 0; i < d; ++i) next[i] = (next[i] + cur[j] * m[j][i]) % qq;
    }
    std::swap(cur, next);
  }
  return FFElement(field_, std::move(cur));
}

bool FFElement::operator==(const FFElement& o) const {
  return field_->q() == o.field_->q() && field_->modulus() == o.field_->modulus() && c_ == o.c_;
}

std::strong_ordering FFElement::operator<=>(const FFElement& o) const {
  check_same(o);
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] != o.c_[i]) return c_[i] <=> o.c_[i];
  }
  return std::strong_ordering::equal;
}

std::string FFElement::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
  os << ']';
  return os.str();
}

FFElement evaluate(const Coeffs& f, const FFElement& x) {
  FFElement acc(x.field());
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + FFElement::constant(x.field(), f[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// p-th powers

PthPowerResult is_pth_power(const FFElement& x, u64 p) {
  if (!is_prime(p)) throw std::invalid_argument("is_pth_power: p must be prime");
  if (x.is_zero()) return {true, true};
  const mpz_class group = x.field()->order() - 1;
  if (!mpz_divisible_ui_p(group.get_mpz_t(), p)) return {true, false};
  return {x.pow(mpz_class(group / p)).is_one(), false};
}

FFElement least_non_pth_power(const FieldPtr& field, u64 p) {
  const mpz_class group = field->order() - 1;
  if (!mpz_divisible_ui_p(group.get_mpz_t(), p)) throw PreconditionError("least_non_pth_power: p does not divide q^d - 1");
  static std::mutex mutex;
  static std::map<std::tuple<u64, Coeffs, u64>, Coeffs> cache;
  auto key = std::make_tuple(field->q(), field->modulus(), p);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return FFElement(field, it->second);
  }
  // Skip the prime field when all of its units are p-th powers.
  mpz_class start = 2;
  if (field->degree() > 1 && mpz_divisible_ui_p(mpz_class(group / p).get_mpz_t(), field->q() - 1)) start = field->q();
  for (mpz_class k = start;; ++k) {
    FFElement c = FFElement::from_index(field, k);
    if (!is_pth_power(c, p).value) {
      std::lock_guard lock(mutex);
      cache.emplace(key, c.coeffs());
      return c;
    }
  }
}

namespace {

constexpr unsigned long kExhaustionLimit = 1ul << 12;

std::vector<FFElement> pth_roots_exhaustive(const FFElement& x, u64 p) {
  std::vector<FFElement> out;
  const mpz_class size = x.field()->order();
  for (mpz_class k = 0; k < size; ++k) {
    FFElement y = FFElement::from_index(x.field(), k);
    if (y.pow(p) == x) out.push_back(std::move(y));
  }
  return out;
}

}  // namespace

std::vector<FFElement> pth_roots(const FFElement& x, u64 p) {
  if (!is_prime(p)) throw std::invalid_argument("pth_roots: p must be prime");
  const FieldPtr& field = x.field();
  if (x.is_zero()) return {x};
  if (field->order() <= kExhaustionLimit) return pth_roots_exhaustive(x, p);

  const mpz_class group = field->order() - 1;
  if (!mpz_divisible_ui_p(group.get_mpz_t(), p)) {
    mpz_class inv;
    mpz_class pz(static_cast<unsigned long>(p));
    mpz_invert(inv.get_mpz_t(), pz.get_mpz_t(), group.get_mpz_t());
    return {x.pow(inv)};
  }
  if (!is_pth_power(x, p).value) return {};

  // group = p^s * t with p not dividing t.
  mpz_class t = group;
  unsigned s = 0;
  while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
    t /= p;
    ++s;
  }
  mpz_class pz(static_cast<unsigned long>(p)), u;
  if (t == 1) {
    u = 0;
  } else {
    mpz_invert(u.get_mpz_t(), pz.get_mpz_t(), t.get_mpz_t());
  }
  // y0^p = x * e with e = x^(p u - 1) in the Sylow p-subgroup.
  FFElement y = x.pow(u);
  FFElement e = y.pow(p) * x.inverse();
  // Generator of the Sylow p-subgroup (order p^s).
  const FFElement z = least_non_pth_power(field, p).pow(t);
  // Pohlig-Hellman: find L with z^L = e^{-1}.
  const FFElement target = e.inverse();
  std::vector<FFElement> zeta_powers;  // powers of z^(p^(s-1)), a primitive p-th root of unity
  const FFElement zeta = z.pow(pow_mpz(p, s - 1));
  zeta_powers.push_back(FFElement::constant(field, 1));
  for (u64 i = 1; i < p; ++i) zeta_powers.push_back(zeta_powers.back() * zeta);
  mpz_class L = 0;
  for (unsigned i = 0; i < s; ++i) {
    FFElement residual = target * z.pow(mpz_class(-L));
    FFElement probe = residual.pow(pow_mpz(p, s - 1 - i));
    auto it = std::find(zeta_powers.begin(), zeta_powers.end(), probe);
    if (it == zeta_powers.end()) throw std::logic_error("pth_roots: discrete log failed");
    L += mpz_class(static_cast<unsigned long>(it - zeta_powers.begin())) * pow_mpz(p, i);
  }
  if (!mpz_divisible_ui_p(L.get_mpz_t(), p)) throw std::logic_error("pth_roots: correction is not a p-th power");
  FFElement root = y * z.pow(mpz_class(L / p));
  std::vector<FFElement> out;
  for (const auto& w : zeta_powers) out.push_back(root * w);
  std::sort(out.begin(), out.end());
  return out;
}

mpz_class mult_order(const FFElement& x) {
  if (x.is_zero()) throw std::domain_error("mult_order: zero has no multiplicative order");
  const u64 q = x.q();
  const unsigned d = x.degree();
  // q^d - 1 = prod_{k | d} Phi_k(q); factor the pieces separately.
  std::map<mpz_class, unsigned> factors;
  for (unsigned k = 1; k <= d; ++k) {
    if (d % k) continue;
    // Phi_k(q) = prod_{j | k} (q^j - 1)^{mu(k/j)}
    mpz_class num = 1, den = 1;
    for (unsigned j = 1; j <= k; ++j) {
      if (k % j) continue;
      unsigned n = k / j;
      int mu = 1;
      for (auto [pr, e] : factor_u64(n)) {
        if (e > 1) mu = 0;
        else mu = -mu;
      }
      if (n == 1) mu = 1;
      if (mu == 1) num *= pow_mpz(q, j) - 1;
      if (mu == -1) den *= pow_mpz(q, j) - 1;
    }
    mpz_class phi_k = num / den;
    for (const auto& [pr, e] : factor_mpz(phi_k)) factors[pr] += e;
  }
  mpz_class order = x.field()->order() - 1;
  for (const auto& [pr, e] : factors) {
    for (unsigned i = 0; i < e; ++i) {
      mpz_class cand = order / pr;
      if (x.pow(cand).is_one()) order = cand;
      else break;
    }
  }
  return order;
}

std::vector<FFElement> roots_by_exhaustion(const Coeffs& f, const FieldPtr& field) {
  std::vector<FFElement> out;
  const mpz_class size = field->order();
  for (mpz_class k = 0; k < size; ++k) {
    FFElement y = FFElement::from_index(field, k);
    if (evaluate(f, y).is_zero()) out.push_back(std::move(y));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings

Embedding::Embedding(FieldPtr from, FieldPtr to, FFElement generator_image)
    : from_(std::move(from)), to_(std::move(to)), image_(std::move(generator_image)) {
  powers_.push_back(FFElement::constant(to_, 1));
  for (unsigned i = 1; i < from_->degree(); ++i) powers_.push_back(powers_.back() * image_);
}

FFElement Embedding::apply(const FFElement& x) const {
  if (x.field()->q() != from_->q() || x.field()->modulus() != from_->modulus())
    throw std::invalid_argument("Embedding::apply: element not in the source field");
  const unsigned e = from_->degree();
  if (e == 1) return FFElement::constant(to_, x.coeffs()[0]);
  FFElement acc(to_);
  for (unsigned i = 0; i < e; ++i) {
    if (x.coeffs()[i]) acc = acc + powers_[i].scaled(x.coeffs()[i]);
  }
  return acc;
}

namespace {

using SPoly = std::vector<FFElement>;  // polynomial over a (possibly non-canonical) field S

void strim(SPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

SPoly spoly_mod(SPoly a, const SPoly& m) {
  strim(a);
  const int dm = static_cast<int>(m.size()) - 1;
  const FFElement lead_inv = m.back().inverse();
  for (int i = static_cast<int>(a.size()) - 1; i >= dm; --i) {
    if (a[i].is_zero()) continue;
    FFElement c = a[i] * lead_inv;
    for (int k = 0; k <= dm; ++k) a[i - dm + k] = a[i - dm + k] - c * m[k];
  }
  if (static_cast<int>(a.size()) > dm) a.resize(dm, FFElement(m[0].field()));
  strim(a);
  return a;
}

SPoly spoly_mulmod(const SPoly& a, const SPoly& b, const SPoly& m) {
  if (a.empty() || b.empty()) return {};
  const FieldPtr& S = m[0].field();
  const unsigned e = S->degree();
  const u64 q = S->q();
  // Accumulate raw products coefficient-wise before a single reduction.
  std::vector<Coeffs> acc(a.size() + b.size() - 1, Coeffs(e, 0));
  Coeffs tmp(e);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j].is_zero()) continue;
      S->mul(a[i].coeffs().data(), b[j].coeffs().data(), tmp.data());
      Coeffs& dst = acc[i + j];
      for (unsigned k = 0; k < e; ++k) {
        u64 v = dst[k] + tmp[k];
        dst[k] = v >= q ? v - q : v;
      }
    }
  }
  SPoly prod;
  prod.reserve(acc.size());
  for (auto& c : acc) prod.emplace_back(S, std::move(c));
  return spoly_mod(std::move(prod), m);
}

SPoly spoly_powmod(SPoly base, mpz_class e, const SPoly& m) {
  const FieldPtr& S = m[0].field();
  SPoly result{FFElement::constant(S, 1)};
  base = spoly_mod(std::move(base), m);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = spoly_mulmod(result, base, m);
    e >>= 1;
    if (e > 0) base = spoly_mulmod(base, base, m);
  }
  return result;
}

SPoly spoly_gcd(SPoly a, SPoly b) {
  strim(a);
  strim(b);
  while (!b.empty()) {
    a = spoly_mod(std::move(a), b);
    std::swap(a, b);
  }
  if (!a.empty()) {
    FFElement inv = a.back().inverse();
    for (auto& c : a) c = c * inv;
  }
  return a;
}

SPoly spoly_div_exact(SPoly a, const SPoly& b) {
  const int db = static_cast<int>(b.size()) - 1;
  const int da = static_cast<int>(a.size()) - 1;
  const FieldPtr& S = b[0].field();
  SPoly quot(da - db + 1, FFElement(S));
  const FFElement lead_inv = b.back().inverse();
  for (int i = da; i >= db; --i) {
    FFElement c = a[i] * lead_inv;
    quot[i - db] = c;
    for (int k = 0; k <= db; ++k) a[i - db + k] = a[i - db + k] - c * b[k];
  }
  return quot;
}

// One root in S of the irreducible f (degree e, F_q coefficients) given that
// f splits over S. `poly_field` is F_q[X]/f, whose Frobenius matrix gives X^{jq} mod f.
FFElement find_split_root(const ExtField& poly_field, const FieldPtr& S) {
  const Coeffs& f = poly_field.modulus();
  const unsigned e = poly_field.degree();
  const u64 q = S->q();
  SPoly fS;
  for (u64 c : f) fS.push_back(FFElement::constant(S, c));
  const auto& xq = poly_field.frobenius_matrix();  // xq[j] = X^{jq} mod f

  auto frob_A = [&](const SPoly& a) {
    SPoly out(e, FFElement(S));
    for (unsigned j = 0; j < a.size(); ++j) {
      if (a[j].is_zero()) continue;
      FFElement s = a[j].frobenius();
      for (unsigned i = 0; i < e; ++i) {
        if (xq[j][i]) out[i] = out[i] + s.scaled(xq[j][i]);
      }
    }
    strim(out);
    return out;
  };

  SPoly current = fS;
  const unsigned sdeg = S->degree();
  // Tr(u * root) separates the roots as u runs over a basis of S.
  for (unsigned ui = 0; ui < sdeg && current.size() > 2; ++ui) {
    Coeffs ucoeffs(sdeg, 0);
    ucoeffs[ui] = 1;
    SPoly cur{FFElement(S), FFElement(S, ucoeffs)};
    SPoly tau(e, FFElement(S));
    for (unsigned k = 0; k < sdeg; ++k) {
      for (unsigned i = 0; i < cur.size(); ++i) tau[i] = tau[i] + cur[i];
      if (k + 1 < sdeg) cur = frob_A(cur);
    }
    strim(tau);
    const u64 shifts = q == 2 ? 1 : q;
    for (u64 c = 0; c < shifts && current.size() > 2; ++c) {
      SPoly shifted = tau;
      if (shifted.empty()) shifted.push_back(FFElement(S));
      shifted[0] = shifted[0] + FFElement::constant(S, c);
      SPoly probe;
      if (q == 2) {
        probe = spoly_mod(shifted, current);
      } else {
        probe = spoly_powmod(shifted, mpz_class(static_cast<unsigned long>((q - 1) / 2)), current);
        if (probe.empty()) probe.push_back(FFElement(S));
        probe[0] = probe[0] - FFElement::constant(S, 1);
        strim(probe);
      }
      SPoly g = spoly_gcd(current, probe);
      if (g.size() <= 1 || g.size() == current.size()) continue;
      SPoly other = spoly_div_exact(current, g);
      current = g.size() <= other.size() ? g : other;
      FFElement inv = current.back().inverse();
      for (auto& cf : current) cf = cf * inv;
    }
  }
  if (current.size() != 2) throw std::logic_error("find_split_root: splitting did not terminate");
  return -current[0];
}

std::shared_ptr<const Embedding> build_embedding(u64 q, unsigned e, unsigned d) {
  FieldPtr small = make_ext_field(q, e);
  FieldPtr big = make_ext_field(q, d);
  if (e == 1) {
    // F_q = F_q[t]/(t): the generator is the root 0 of t.
    return std::make_shared<const Embedding>(small, big, FFElement(big));
  }
  if (e == d) return std::make_shared<const Embedding>(small, big, FFElement::generator(big));
  // Subfield S = ker(Frob^e - 1) of the big field.
  const FFElement s = FFElement::generator(big);
  const FFElement w = s.frobenius(e);
  std::vector<Coeffs> columns;
  FFElement wp = FFElement::constant(big, 1), sp = wp;
  for (unsigned i = 0; i < d; ++i) {
    columns.push_back((wp - sp).coeffs());
    wp = wp * w;
    sp = sp * s;
  }
  std::vector<Coeffs> basis = kernel(columns, q);
  if (basis.size() != e) throw std::logic_error("build_embedding: subfield has wrong dimension");

  // A generator theta of S and its minimal polynomial g over F_q.
  FFElement theta(big);
  Coeffs g;
  std::vector<FFElement> theta_powers;
  for (unsigned long k = 1;; ++k) {
    Coeffs combo(d, 0);
    unsigned long digits = k;
    for (unsigned b = 0; b < basis.size() && digits; ++b, digits /= q) {
      u64 c = digits % q;
      for (unsigned i = 0; i < d; ++i) combo[i] = (combo[i] + c * basis[b][i]) % q;
    }
    if (digits) throw std::logic_error("build_embedding: no generator found");
    theta = FFElement(big, combo);
    theta_powers.assign(1, FFElement::constant(big, 1));
    for (unsigned i = 1; i <= e; ++i) theta_powers.push_back(theta_powers.back() * theta);
    std::vector<Coeffs> cols;
    for (unsigned i = 0; i < e; ++i) cols.push_back(theta_powers[i].coeffs());
    auto rel = solve_independent(cols, theta_powers[e].coeffs(), q);
    if (!rel) continue;
    g.assign(e + 1, 0);
    for (unsigned i = 0; i < e; ++i) g[i] = (q - (*rel)[i]) % q;
    g[e] = 1;
    break;
  }
  auto S = std::make_shared<const ExtField>(q, g, false);
  FFElement root_in_S = find_split_root(*small, S);
  FFElement rho(big);
  for (unsigned i = 0; i < e; ++i) {
    if (root_in_S.coeffs()[i]) rho = rho + theta_powers[i].scaled(root_in_S.coeffs()[i]);
  }
  // Least conjugate in canonical order.
  FFElement best = rho, cur = rho;
  for (unsigned k = 1; k < e; ++k) {
    cur = cur.frobenius();
    if (cur < best) best = cur;
  }
  if (!evaluate(small->modulus(), best).is_zero()) throw std::logic_error("build_embedding: root check failed");
  return std::make_shared<const Embedding>(small, big, best);
}

}  // namespace

std::shared_ptr<const Embedding> canonical_embedding(u64 q, unsigned e, unsigned d) {
  if (e == 0 || d % e != 0) throw std::invalid_argument("canonical_embedding: degree must divide");
  static std::mutex mutex;
  static std::map<std::tuple<u64, unsigned, unsigned>, std::shared_ptr<const Embedding>> cache;
  auto key = std::make_tuple(q, e, d);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto emb = build_embedding(q, e, d);
  std::lock_guard lock(mutex);
  return cache.emplace(key, emb).first->second;
}

}  // namespace kummerlab::ff
