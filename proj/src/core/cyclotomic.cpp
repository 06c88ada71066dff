#include "cyclotomic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace kummerlab::cyclo {

const std::vector<mpz_class>& cyclotomic_polynomial(u64 m) {
  if (m == 0) throw std::invalid_argument("cyclotomic_polynomial: m must be >= 1");
  static std::mutex mutex;
  static std::map<u64, std::vector<mpz_class>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(m); it != cache.end()) return it->second;
  }
  // x^m - 1 divided by Phi_d for every proper divisor d.
  std::vector<mpz_class> num(m + 1, 0);
  num[0] = -1;
  num[m] = 1;
  for (u64 d = 1; d < m; ++d) {
    if (m % d) continue;
    const auto& den = cyclotomic_polynomial(d);
    const std::size_t dd = den.size() - 1;
    std::vector<mpz_class> quot(num.size() - dd, 0);
    for (std::size_t i = num.size(); i-- > dd;) {
      mpz_class c = num[i];  // den is monic
      quot[i - dd] = c;
      if (c == 0) continue;
      for (std::size_t k = 0; k <= dd; ++k) num[i - dd + k] -= c * den[k];
    }
    num = std::move(quot);
  }
  std::lock_guard lock(mutex);
  return cache.emplace(m, std::move(num)).first->second;
}

u64 normalize_conductor(u64 m) {
  if (m == 0) throw std::invalid_argument("conductor must be >= 1");
  return m % 4 == 2 ? m / 2 : m;
}

bool contains_roots_of_unity(u64 m, u64 n) {
  if (n == 0 || m == 0) throw std::invalid_argument("contains_roots_of_unity: zero argument");
  return lcm_u64(2, m) % n == 0;
}

CycloField::CycloField(u64 m) : m_(m), phi_(cyclotomic_polynomial(m)) {
  if (m == 1) {
    units_ = {1};
  } else {
    for (u64 a = 1; a < m; ++a)
      if (gcd_u64(a, m) == 1) units_.push_back(a);
  }
}

CycloFieldPtr make_cyclo_field(u64 m) {
  static std::mutex mutex;
  static std::map<u64, CycloFieldPtr> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_shared<const CycloField>(m);
  return slot;
}

// ---------------------------------------------------------------------------

CycloElement::CycloElement(CycloFieldPtr field) : field_(std::move(field)), c_(field_->degree(), 0) {}

CycloElement::CycloElement(CycloFieldPtr field, std::vector<mpq_class> coeffs) : field_(std::move(field)) {
  reduce(coeffs);
  c_ = std::move(coeffs);
}

void CycloElement::reduce(std::vector<mpq_class>& raw) const {
  const auto& phi = field_->phi();
  const std::size_t d = phi.size() - 1;
  for (std::size_t i = raw.size(); i-- > d;) {
    mpq_class c = raw[i];
    if (c == 0) continue;
    for (std::size_t k = 0; k <= d; ++k) raw[i - d + k] -= c * phi[k];
  }
  raw.resize(d, 0);
  for (auto& v : raw) v.canonicalize();
}

CycloElement CycloElement::rational(CycloFieldPtr field, const mpq_class& c) {
  CycloElement x(std::move(field));
  x.c_[0] = c;
  return x;
}

CycloElement CycloElement::zeta_power(CycloFieldPtr field, i64 k) {
  const i64 m = static_cast<i64>(field->m());
  std::vector<mpq_class> raw(m, 0);
  raw[((k % m) + m) % m] = 1;
  return CycloElement(std::move(field), std::move(raw));
}

bool CycloElement::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const mpq_class& v) { return v == 0; });
}

bool CycloElement::is_rational() const {
  return std::all_of(c_.begin() + 1, c_.end(), [](const mpq_class& v) { return v == 0; });
}

mpq_class CycloElement::rational_value() const {
  if (!is_rational()) throw std::invalid_argument("CycloElement: not rational");
  return c_[0];
}

CycloElement CycloElement::operator+(const CycloElement& o) const {
  if (m() != o.m()) throw std::invalid_argument("CycloElement: field mismatch");
  CycloElement r(field_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] + o.c_[i];
  return r;
}

CycloElement CycloElement::operator-(const CycloElement& o) const {
  if (m() != o.m()) throw std::invalid_argument("CycloElement: field mismatch");
  CycloElement r(field_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] - o.c_[i];
  return r;
}

CycloElement CycloElement::operator-() const {
  CycloElement r(field_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = -c_[i];
  return r;
}

CycloElement CycloElement::operator*(const CycloElement& o) const {
  if (m() != o.m()) throw std::invalid_argument("CycloElement: field mismatch");
  std::vector<mpq_class> raw(2 * c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) raw[i + j] += c_[i] * o.c_[j];
  }
  return CycloElement(field_, std::move(raw));
}

CycloElement CycloElement::pow(u64 e) const {
  CycloElement result = rational(field_, 1), base = *this;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

CycloElement CycloElement::galois(u64 a) const {
  const u64 mm = m();
  if (mm > 1 && gcd_u64(a, mm) != 1) throw std::invalid_argument("galois: exponent must be a unit");
  std::vector<mpq_class> raw(std::max<u64>(mm, 1), 0);
  for (std::size_t i = 0; i < c_.size(); ++i) raw[(i * a) % mm] += c_[i];
  return CycloElement(field_, std::move(raw));
}

mpq_class CycloElement::norm() const {
  CycloElement prod = rational(field_, 1);
  for (u64 a : field_->units()) prod = prod * galois(a);
  return prod.rational_value();
}

CycloElement CycloElement::inverse() const {
  if (is_zero()) throw std::domain_error("CycloElement::inverse: zero");
  CycloElement prod = rational(field_, 1);
  for (u64 a : field_->units())
    if (a % m() != 1 % m()) prod = prod * galois(a);
  mpq_class n = (prod * *this).rational_value();
  return prod * rational(field_, 1 / n);
}

std::complex<double> CycloElement::embed(u64 a) const {
  std::complex<double> acc = 0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    double angle = 2 * std::numbers::pi * static_cast<double>((i * a) % m()) / static_cast<double>(m());
    acc += c_[i].get_d() * std::polar(1.0, angle);
  }
  return acc;
}

mpz_class CycloElement::denominator() const {
  mpz_class d = 1;
  for (const auto& v : c_) d = lcm(d, mpz_class(v.get_den()));
  return d;
}

bool CycloElement::operator==(const CycloElement& o) const { return m() == o.m() && c_ == o.c_; }

std::string CycloElement::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    mpq_class c = c_[i];
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    mpq_class a = abs(c);
    if (i == 0) os << a.get_str();
    else {
      if (a != 1) os << a.get_str() << "*";
      os << "z";
      if (i > 1) os << "^" << i;
    }
    first = false;
  }
  return first ? "0" : os.str();
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(const CycloFieldPtr& field, const std::string& text) : field_(field), s_(text) {}

  CycloElement parse() {
    CycloElement v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse_element: " + what + " at position " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  CycloElement expr() {
    CycloElement v = term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        v = v + term();
      } else if (peek('-')) {
        ++pos_;
        v = v - term();
      } else {
        return v;
      }
    }
  }

  CycloElement term() {
    CycloElement v = factor();
    for (;;) {
      skip();
      if (peek('*')) {
        ++pos_;
        v = v * factor();
      } else if (peek('/')) {
        ++pos_;
        CycloElement d = factor();
        if (d.is_zero()) fail("division by zero");
        v = v * d.inverse();
      } else if (pos_ < s_.size() && (s_[pos_] == 'z' || s_[pos_] == '(' || std::isdigit(static_cast<unsigned char>(s_[pos_])))) {
        v = v * factor();
      } else {
        return v;
      }
    }
  }

  CycloElement factor() {
    if (peek('-')) {
      ++pos_;
      return -factor();
    }
    if (peek('+')) {
      ++pos_;
      return factor();
    }
    CycloElement base = primary();
    if (peek('^')) {
      ++pos_;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      u64 e = std::stoull(s_.substr(start, pos_ - start));
      return base.pow(e);
    }
    return base;
  }

  CycloElement primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      CycloElement v = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return v;
    }
    if (c == 'z') {
      ++pos_;
      return CycloElement::zeta_power(field_, 1);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return CycloElement::rational(field_, mpq_class(mpz_class(s_.substr(start, pos_ - start))));
    }
    fail("unexpected character");
  }

  CycloFieldPtr field_;
  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

CycloElement parse_element(const CycloFieldPtr& field, const std::string& text) { return Parser(field, text).parse(); }

// ---------------------------------------------------------------------------
// Exact p-th roots

namespace {

std::optional<mpz_class> integer_root(const mpz_class& x, u64 p) {
  if (x < 0 && p % 2 == 0) return std::nullopt;
  mpz_class ax = abs(x), r;
  if (!mpz_root(r.get_mpz_t(), ax.get_mpz_t(), p)) return std::nullopt;
  return x < 0 ? mpz_class(-r) : r;
}

std::optional<mpq_class> rational_root(const mpq_class& x, u64 p) {
  auto n = integer_root(x.get_num(), p);
  auto d = integer_root(x.get_den(), p);
  if (!n || !d) return std::nullopt;
  return mpq_class(*n, *d);
}

// Solves V c = rhs with partial pivoting; V is square.
std::vector<std::complex<double>> complex_solve(std::vector<std::vector<std::complex<double>>> V,
                                                std::vector<std::complex<double>> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(V[i][c]) > std::abs(V[piv][c])) piv = i;
    std::swap(V[piv], V[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t i = c + 1; i < n; ++i) {
      auto f = V[i][c] / V[c][c];
      for (std::size_t k = c; k < n; ++k) V[i][k] -= f * V[c][k];
      rhs[i] -= f * rhs[c];
    }
  }
  std::vector<std::complex<double>> x(n);
  for (std::size_t i = n; i-- > 0;) {
    auto acc = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= V[i][k] * x[k];
    x[i] = acc / V[i][i];
  }
  return x;
}

}  // namespace

std::optional<CycloElement> exact_pth_root(const CycloElement& x, u64 p) {
  if (!is_prime(p)) throw std::invalid_argument("exact_pth_root: p must be prime");
  if (x.is_zero()) return x;
  const auto& field = x.field();
  // The norm of a p-th power is a p-th power in Q.
  if (!rational_root(x.norm(), p)) return std::nullopt;
  const mpz_class D = x.denominator();
  mpz_class Dp;
  mpz_pow_ui(Dp.get_mpz_t(), D.get_mpz_t(), p);
  const CycloElement xi = x * CycloElement::rational(field, mpq_class(Dp));  // in Z[zeta]
  const CycloElement inv_D = CycloElement::rational(field, mpq_class(mpz_class(1), D));
  if (field->degree() == 1) {
    auto r = rational_root(xi.rational_value(), p);
    if (!r) return std::nullopt;
    return CycloElement::rational(field, *r) * inv_D;
  }
  const u64 m = field->m();
  // Embeddings a with a <= m/2; the others are complex conjugates.
  std::vector<u64> half;
  for (u64 a : field->units())
    if (2 * a < m) half.push_back(a);
  const auto& units = field->units();
  const std::size_t phi = units.size();
  double combos = std::pow(static_cast<double>(p), static_cast<double>(half.size()));
  if (combos > 1e6) throw InconclusiveError("exact_pth_root: too many embedding combinations");
  std::vector<std::vector<std::complex<double>>> V(phi, std::vector<std::complex<double>>(phi));
  for (std::size_t r = 0; r < phi; ++r)
    for (std::size_t j = 0; j < phi; ++j)
      V[r][j] = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>((units[r] * j) % m) / static_cast<double>(m));
  std::vector<std::complex<double>> principal(half.size());
  for (std::size_t h = 0; h < half.size(); ++h) {
    auto v = xi.embed(half[h]);
    principal[h] = std::polar(std::pow(std::abs(v), 1.0 / static_cast<double>(p)), std::arg(v) / static_cast<double>(p));
  }
  std::vector<u64> choice(half.size(), 0);
  const double step = 2 * std::numbers::pi / static_cast<double>(p);
  for (;;) {
    std::vector<std::complex<double>> rhs(phi);
    for (std::size_t r = 0; r < phi; ++r) {
      u64 a = units[r];
      bool conj = 2 * a > m;
      u64 key = conj ? m - a : a;
      std::size_t h = std::find(half.begin(), half.end(), key) - half.begin();
      auto val = principal[h] * std::polar(1.0, step * static_cast<double>(choice[h]));
      rhs[r] = conj ? std::conj(val) : val;
    }
    auto c = complex_solve(V, rhs);
    bool plausible = true;
    std::vector<mpq_class> coeffs(phi);
    for (std::size_t j = 0; j < phi && plausible; ++j) {
      double re = c[j].real();
      if (std::abs(c[j].imag()) > 1e-6 * (1 + std::abs(re)) || std::abs(re) > 1e15) plausible = false;
      double rounded = std::round(re);
      if (std::abs(re - rounded) > 1e-4 * (1 + std::abs(re))) plausible = false;
      coeffs[j] = mpq_class(mpz_class(rounded));
    }
    if (plausible) {
      CycloElement y(field, coeffs);
      if (y.pow(p) == xi) return y * inv_D;
    }
    std::size_t i = 0;
    while (i < choice.size() && ++choice[i] == p) choice[i++] = 0;
    if (i == choice.size()) break;
  }
  double scale = 0;
  for (u64 a : units) scale = std::max(scale, std::abs(xi.embed(a)));
  if (scale > 1e30) throw InconclusiveError("exact_pth_root: element too large for floating-point root recovery");
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Primes

u64 frobenius(u64 m, u64 q) {
  if (m > 1 && gcd_u64(q, m) != 1) throw PreconditionError("frobenius: q divides m (ramified)");
  return m == 1 ? 0 : q % m;
}

std::vector<CycloPrime> cyclo_primes_above(u64 m, u64 q) {
  if (!is_prime(q)) throw std::invalid_argument("cyclo_primes_above: q must be prime");
  if (m == 0) throw std::invalid_argument("cyclo_primes_above: m must be >= 1");
  if (m > 1 && m % q == 0) throw PreconditionError("cyclo_primes_above: q divides m (ramified)");
  const unsigned f = m == 1 ? 1 : static_cast<unsigned>(mult_order_mod(q % m, m));
  auto F = ff::make_ext_field(q, f);
  if (m == 1) return {CycloPrime{m, q, 1, ff::FFElement::constant(F, 1)}};
  const mpz_class cofactor = (F->order() - 1) / m;
  const auto m_factors = factor_u64(m);
  ff::FFElement w;
  for (mpz_class k = 2;; ++k) {
    if (k >= F->order()) throw std::logic_error("cyclo_primes_above: no element of order m");
    w = ff::FFElement::from_index(F, k).pow(cofactor);
    bool exact = !w.is_zero() && w.pow(m).is_one();
    for (const auto& [l, e] : m_factors) exact = exact && !w.pow(m / l).is_one();
    if (exact) break;
  }
  std::vector<bool> seen(m, false);
  std::vector<CycloPrime> out;
  for (u64 k = 1; k < m; ++k) {
    if (seen[k] || gcd_u64(k, m) != 1) continue;
    ff::FFElement best = w.pow(k);
    for (u64 j = k; !seen[j]; j = mulmod(j, q, m)) {
      seen[j] = true;
      ff::FFElement cand = w.pow(j);
      if (cand < best) best = cand;
    }
    out.push_back(CycloPrime{m, q, f, best});
  }
  std::sort(out.begin(), out.end(), [](const CycloPrime& a, const CycloPrime& b) { return a.zbar < b.zbar; });
  return out;
}

bool integral_at(const CycloElement& x, u64 q) {
  for (const auto& c : x.coeffs())
    if (mpz_divisible_ui_p(c.get_den().get_mpz_t(), q)) return false;
  return true;
}

ff::FFElement reduce_element(const CycloElement& x, const ff::FFElement& zeta_image) {
  const u64 q = zeta_image.q();
  if (!integral_at(x, q)) throw PreconditionError("reduce_element: denominator divisible by q = " + std::to_string(q));
  const auto& F = zeta_image.field();
  ff::FFElement acc(F), power = ff::FFElement::constant(F, 1);
  for (std::size_t i = 0; i < x.coeffs().size(); ++i) {
    const mpq_class& c = x.coeffs()[i];
    if (c != 0) {
      u64 num = mpz_fdiv_ui(c.get_num().get_mpz_t(), q);
      u64 den = mpz_fdiv_ui(c.get_den().get_mpz_t(), q);
      acc = acc + power.scaled(mulmod(num, invmod(den, q), q));
    }
    power = power * zeta_image;
  }
  return acc;
}

ff::FFElement reduce_element(const CycloElement& x, const CycloPrime& P) {
  if (x.m() != P.m) throw std::invalid_argument("reduce_element: prime of a different field");
  return reduce_element(x, P.zbar);
}

CycloElement zeta_p(const CycloFieldPtr& field, u64 p) {
  if (field->m() % p == 0) return CycloElement::zeta_power(field, static_cast<i64>(field->m() / p));
  if (p == 2) return CycloElement::rational(field, -1);
  throw PreconditionError("zeta_p: mu_" + std::to_string(p) + " is not contained in Q(zeta_" + std::to_string(field->m()) + ")");
}

// ---------------------------------------------------------------------------
// (p,p) lattice

unsigned PPSubfieldLattice::label_of(std::pair<u64, u64> sigma) const {
  auto [x, y] = sigma;
  x %= p;
  y %= p;
  if (x == 0 && y == 0) throw std::invalid_argument("label_of: identity has no fixed field of degree p");
  if (x == 0) return 0;
  return static_cast<unsigned>(1 + mulmod(y, invmod(x, p), p));
}

std::string radical_field_name(const CycloElement& c, u64 p) {
  if (p == 2 && c.field()->degree() == 1 && c.is_rational() && c.rational_value() != 0) {
    mpq_class v = c.rational_value();
    mpz_class n = v.get_num() * v.get_den();  // same square class
    mpz_class sf = n < 0 ? -1 : 1;
    for (const auto& [l, e] : factor_mpz(abs(n)))
      if (e % 2) sf *= l;
    if (sf == 1) return "Q";
    if (sf == -1) return "Q(i)";
    return "Q(sqrt " + sf.get_str() + ")";
  }
  std::string base = c.m() == 1 ? "Q" : "Q(zeta_" + std::to_string(c.m()) + ")";
  return base + "((" + c.to_string() + ")^(1/" + std::to_string(p) + "))";
}

PPSubfieldLattice pp_lattice(const CycloElement& a, const CycloElement& b, u64 p) {
  if (!is_prime(p)) throw std::invalid_argument("pp_lattice: p must be prime");
  if (a.m() != b.m()) throw std::invalid_argument("pp_lattice: data live in different fields");
  const auto& field = a.field();
  if (!contains_roots_of_unity(field->m(), p)) throw PreconditionError("pp_lattice: mu_p not in the base field");
  if (a.is_zero() || b.is_zero()) throw std::invalid_argument("pp_lattice: zero datum");
  if (exact_pth_root(a, p)) throw std::invalid_argument("pp_lattice: K datum is a p-th power");
  if (exact_pth_root(b, p)) throw std::invalid_argument("pp_lattice: F datum is a p-th power");
  const CycloElement b_inv = b.inverse();
  for (u64 j = 1; j < p; ++j) {
    if (exact_pth_root(a * b_inv.pow(j), p)) throw std::invalid_argument("pp_lattice: K = F, not a (p,p)-extension");
  }
  PPSubfieldLattice L;
  L.p = p;
  L.a = a;
  L.b = b;
  L.subfields.push_back(PPSubfield{0, {0, 1}, 1, 0, a, radical_field_name(a, p)});
  for (u64 y = 0; y < p; ++y) {
    u64 ea = (p - y) % p;
    CycloElement c = a.pow(ea) * b;
    L.subfields.push_back(PPSubfield{static_cast<unsigned>(1 + y), {1, y}, ea, 1, c, radical_field_name(c, p)});
  }
  return L;
}

std::optional<std::pair<u64, u64>> frobenius_coords(const PPSubfieldLattice& L, const CycloPrime& P) {
  const u64 p = L.p;
  if (P.q == p || !integral_at(L.a, P.q) || !integral_at(L.b, P.q)) return std::nullopt;
  auto abar = reduce_element(L.a, P), bbar = reduce_element(L.b, P);
  if (abar.is_zero() || bbar.is_zero()) return std::nullopt;
  const ff::FFElement zp = reduce_element(zeta_p(L.a.field(), p), P);
  const mpz_class e = (P.norm() - 1) / p;
  auto dlog = [&](const ff::FFElement& x) -> u64 {
    ff::FFElement v = x.pow(e), acc = ff::FFElement::constant(x.field(), 1);
    for (u64 k = 0; k < p; ++k) {
      if (acc == v) return k;
      acc = acc * zp;
    }
    throw std::logic_error("frobenius_coords: power residue symbol not a p-th root of unity");
  };
  return std::make_pair(dlog(abar), dlog(bbar));
}

}  // namespace kummerlab::cyclo
