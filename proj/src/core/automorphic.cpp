#include "automorphic.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kummerlab::aut {

// ---------------------------------------------------------------------------
// Unit groups and Dirichlet characters

namespace {

u64 crt_lift(u64 g, u64 part, u64 N) {
  // x = g mod part, x = 1 mod N / part
  const u64 rest = N / part;
  if (rest == 1) return g % N;
  const u64 inv = invmod(rest % part, part);
  // x = 1 + rest * ((g - 1) * inv mod part)
  const u64 k = mulmod((g + part - 1) % part, inv, part);
  return (1 + mulmod(rest, k, N)) % N;
}

u64 primitive_root_prime_power(u64 l, unsigned e) {
  u64 pe = 1;
  for (unsigned i = 0; i < e; ++i) pe *= l;
  const u64 phi = pe / l * (l - 1);
  const auto fs = factor_u64(phi);
  for (u64 g = 2; g < pe; ++g) {
    if (g % l == 0) continue;
    bool ok = true;
    for (const auto& [r, k] : fs)
      if (powmod(g, phi / r, pe) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw std::logic_error("primitive_root_prime_power: none found");
}

i64 jacobi(i64 a, u64 n) {
  // n odd positive
  i64 result = 1;
  u64 x = static_cast<u64>(((a % static_cast<i64>(n)) + static_cast<i64>(n)) % static_cast<i64>(n));
  u64 m = n;
  while (x != 0) {
    while (x % 2 == 0) {
      x /= 2;
      const u64 r = m % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(x, m);
    if (x % 4 == 3 && m % 4 == 3) result = -result;
    x %= m;
  }
  return m == 1 ? result : 0;
}

u64 mod_floor(i64 a, u64 m) { return static_cast<u64>(((a % static_cast<i64>(m)) + static_cast<i64>(m)) % static_cast<i64>(m)); }

}  // namespace

std::vector<UnitGenerator> unit_generators(u64 N) {
  if (N == 0) throw std::invalid_argument("unit_generators: N = 0");
  std::vector<UnitGenerator> out;
  for (const auto& [l, e] : factor_u64(N)) {
    u64 pe = 1;
    for (unsigned i = 0; i < e; ++i) pe *= l;
    if (l == 2) {
      if (e >= 2) out.push_back({crt_lift(pe - 1, pe, N), 2});
      if (e >= 3) out.push_back({crt_lift(5, pe, N), pe / 4});
    } else {
      out.push_back({crt_lift(primitive_root_prime_power(l, e), pe, N), pe / l * (l - 1)});
    }
  }
  return out;
}

DirichletCharacter::DirichletCharacter() = default;

DirichletCharacter::DirichletCharacter(u64 N, u64 order, std::vector<i64> table)
    : N_(N), order_(order), table_(std::move(table)) {}

DirichletCharacter DirichletCharacter::from_generators(u64 N, const std::vector<u64>& exponents) {
  if (N == 0) throw std::invalid_argument("DirichletCharacter: modulus 0");
  const auto gens = unit_generators(N);
  if (exponents.size() != gens.size())
    throw std::invalid_argument("DirichletCharacter: expected " + std::to_string(gens.size()) + " generator exponents mod " +
                                std::to_string(N));
  u64 order = 1;
  std::vector<u64> num(gens.size()), den(gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j) {
    const u64 a = exponents[j] % gens[j].order;
    const u64 g = std::gcd(a, gens[j].order);
    num[j] = a / g;
    den[j] = gens[j].order / g;
    order = lcm_u64(order, den[j]);
  }
  std::vector<i64> table(N, -1);
  // walk all products of generator powers
  std::vector<u64> k(gens.size(), 0);
  u64 x = 1 % N, e = 0;
  std::vector<u64> step(gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j) step[j] = mulmod(num[j], order / den[j], order);
  if (N == 1) {
    table[0] = 0;
    return DirichletCharacter(1, 1, table);
  }
  while (true) {
    table[x] = static_cast<i64>(e);
    std::size_t j = 0;
    for (; j < gens.size(); ++j) {
      ++k[j];
      x = mulmod(x, gens[j].g, N);
      e = (e + step[j]) % order;
      if (k[j] < gens[j].order) break;
      // x, e have wrapped around for this generator
      k[j] = 0;
    }
    if (j == gens.size()) break;
  }
  return DirichletCharacter(N, order, std::move(table)).primitive();
}

DirichletCharacter DirichletCharacter::from_table(u64 N, u64 order, std::vector<i64> table) {
  if (N == 0 || order == 0) throw std::invalid_argument("DirichletCharacter: zero modulus or order");
  if (table.size() != N) throw std::invalid_argument("DirichletCharacter: table size differs from modulus");
  for (u64 x = 0; x < N; ++x) {
    const bool unit = gcd_u64(x, N) == 1;
    if (unit != (table[x] >= 0)) throw std::invalid_argument("DirichletCharacter: table must be defined exactly on units");
    if (unit) table[x] %= static_cast<i64>(order);
  }
  const auto gens = unit_generators(N);
  std::vector<u64> exps;
  for (const auto& g : gens) {
    const i64 e = table[g.g];
    // chi(g) = e/order must have order dividing ord(g)
    if ((static_cast<u64>(e) * g.order) % order != 0) throw std::invalid_argument("DirichletCharacter: table is not multiplicative");
    exps.push_back(static_cast<u64>(e) * g.order / order);
  }
  auto chi = from_generators(N, exps);
  const auto lifted = chi.lift(N);
  for (u64 x = 0; x < N; ++x) {
    if (table[x] < 0) continue;
    if (static_cast<u64>(table[x]) * lifted.order_ != static_cast<u64>(lifted.table_[x]) * order)
      throw std::invalid_argument("DirichletCharacter: table is not multiplicative");
  }
  return chi;
}

DirichletCharacter DirichletCharacter::kronecker(i64 D) {
  if (D == 0) throw std::invalid_argument("kronecker: D = 0");
  const u64 N = 4 * static_cast<u64>(D < 0 ? -D : D);
  std::vector<i64> table(N, -1);
  for (u64 x = 1; x < N; ++x) {
    if (gcd_u64(x, N) != 1) continue;
    table[x] = jacobi(D, x) == 1 ? 0 : 1;
  }
  return from_table(N, 2, std::move(table));
}

std::optional<u64> DirichletCharacter::exponent(u64 x) const {
  const i64 e = table_[x % N_];
  if (e < 0) return std::nullopt;
  return static_cast<u64>(e);
}

std::complex<double> DirichletCharacter::value(u64 x) const {
  auto e = exponent(x);
  if (!e) return 0.0;
  return std::polar(1.0, 2.0 * M_PI * static_cast<double>(*e) / static_cast<double>(order_));
}

DirichletCharacter DirichletCharacter::lift(u64 M) const {
  if (M % N_ != 0) throw std::invalid_argument("DirichletCharacter::lift: not a multiple of the modulus");
  std::vector<i64> t(M, -1);
  for (u64 x = 0; x < M; ++x)
    if (gcd_u64(x, M) == 1) t[x] = table_[x % N_];
  return DirichletCharacter(M, order_, std::move(t));
}

namespace {

DirichletCharacter reduce_order_helper(u64 N, u64 order, std::vector<i64> table);

}  // namespace

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& o) const {
  const u64 M = lcm_u64(N_, o.N_);
  const u64 ord = lcm_u64(order_, o.order_);
  std::vector<i64> t(M, -1);
  for (u64 x = 0; x < M; ++x) {
    if (gcd_u64(x, M) != 1) continue;
    const u64 a = static_cast<u64>(table_[x % N_]) * (ord / order_);
    const u64 b = static_cast<u64>(o.table_[x % o.N_]) * (ord / o.order_);
    t[x] = static_cast<i64>((a + b) % ord);
  }
  return reduce_order_helper(M, ord, std::move(t)).primitive();
}

DirichletCharacter DirichletCharacter::pow(i64 k) const {
  std::vector<i64> t(N_, -1);
  const u64 kk = mod_floor(k, order_);
  for (u64 x = 0; x < N_; ++x)
    if (table_[x] >= 0) t[x] = static_cast<i64>(mulmod(static_cast<u64>(table_[x]), kk, order_));
  return reduce_order_helper(N_, order_, std::move(t)).primitive();
}

namespace {

DirichletCharacter reduce_order_helper(u64 N, u64 order, std::vector<i64> table) {
  u64 g = order;
  for (i64 e : table)
    if (e >= 0) g = std::gcd(g, static_cast<u64>(e));
  if (g == 0) g = order;
  for (i64& e : table)
    if (e >= 0) e /= static_cast<i64>(g);
  return DirichletCharacter::from_table(N, order / g, std::move(table));
}

}  // namespace

DirichletCharacter DirichletCharacter::primitive() const {
  u64 d = N_;
  for (const auto& [l, e] : factor_u64(N_)) {
    while (d % l == 0) {
      const u64 c = d / l;
      // trivial on {x unit mod N : x = 1 mod c}?
      bool trivial = true;
      for (u64 x = 1; x < N_; x += c) {
        if (gcd_u64(x, N_) == 1 && table_[x] != 0) {
          trivial = false;
          break;
        }
      }
      if (!trivial) break;
      d = c;
    }
  }
  if (d == N_) return *this;
  std::vector<i64> t(d, -1);
  for (u64 y = 0; y < d; ++y) {
    if (gcd_u64(y, d) != 1) continue;
    for (u64 x = y; x < N_ + d; x += d) {
      if (gcd_u64(x % N_, N_) == 1) {
        t[y] = table_[x % N_];
        break;
      }
    }
  }
  if (d == 1) t[0] = 0;
  return DirichletCharacter(d, order_, std::move(t));
}

u64 DirichletCharacter::conductor() const { return primitive().modulus(); }

std::vector<u64> DirichletCharacter::generator_exponents() const {
  std::vector<u64> out;
  for (const auto& g : unit_generators(N_)) out.push_back(static_cast<u64>(table_[g.g]) * g.order / order_);
  return out;
}

bool DirichletCharacter::operator==(const DirichletCharacter& o) const {
  const auto a = primitive(), b = o.primitive();
  return a.N_ == b.N_ && a.order_ == b.order_ && a.table_ == b.table_;
}

bool DirichletCharacter::operator<(const DirichletCharacter& o) const {
  const auto a = primitive(), b = o.primitive();
  if (a.N_ != b.N_) return a.N_ < b.N_;
  return a.generator_exponents() < b.generator_exponents();
}

std::string DirichletCharacter::to_string() const {
  if (N_ == 1) return "1";
  std::ostringstream os;
  os << "chi_" << N_ << "[";
  const auto e = generator_exponents();
  for (std::size_t i = 0; i < e.size(); ++i) os << (i ? "," : "") << e[i];
  os << "]";
  return os.str();
}

DirichletCharacter order_p_character(u64 l, u64 p) {
  if (!is_prime(l) || !is_prime(p) || (l - 1) % p != 0)
    throw std::invalid_argument("order_p_character: need primes l, p with p | l - 1");
  return DirichletCharacter::from_generators(l, {(l - 1) / p});
}

// ---------------------------------------------------------------------------
// Field models

FieldModel::FieldModel(std::string name, unsigned degree, ExcludedFn excluded, PlacesFn places)
    : name_(std::move(name)), degree_(degree), excluded_(std::move(excluded)), places_(std::move(places)) {}

std::vector<Place> FieldModel::places(u64 q) const {
  if (excluded_(q)) throw PreconditionError("FieldModel::places: q = " + std::to_string(q) + " may ramify in " + name_);
  return places_(q);
}

FieldPtr FieldModel::rationals() {
  static const FieldPtr Q = std::make_shared<FieldModel>(
      "Q", 1, [](u64) { return false; }, [](u64 q) { return std::vector<Place>{Place{q, 1, 1, 0}}; });
  return Q;
}

FieldPtr FieldModel::cyclotomic(u64 m) {
  m = cyclo::normalize_conductor(m);
  if (m == 1) return rationals();
  return std::make_shared<FieldModel>(
      "Q(zeta_" + std::to_string(m) + ")", static_cast<unsigned>(euler_phi(m)), [m](u64 q) { return m % q == 0; },
      [m](u64 q) {
        const unsigned f = static_cast<unsigned>(mult_order_mod(q % m, m));
        const unsigned g = static_cast<unsigned>(euler_phi(m)) / f;
        std::vector<Place> out;
        for (unsigned i = 0; i < g; ++i) out.push_back(Place{q, f, 1, i});
        return out;
      });
}

FieldPtr FieldModel::cyclic(const split::CyclicExtension& K) {
  if (K.trivial) return cyclotomic(K.m());
  const auto R = std::make_shared<tower::RadicalTower>(K.radical());
  const unsigned deg = static_cast<unsigned>(euler_phi(K.m()) * K.p);
  return std::make_shared<FieldModel>(
      K.name, deg, [R](u64 q) { return R->excluded(q); },
      [R](u64 q) {
        std::vector<Place> out;
        for (const auto& t : tower::base_traces(*R, q)) {
          if (tower::next_step_splits(t, *R)) {
            for (unsigned i = 0; i < R->p(); ++i) out.push_back(Place{q, t.degree(), 1, static_cast<unsigned>(out.size())});
          } else {
            out.push_back(Place{q, t.degree() * static_cast<unsigned>(R->p()), static_cast<unsigned>(R->p()),
                                static_cast<unsigned>(out.size())});
          }
        }
        return out;
      });
}

FieldPtr FieldModel::radical(const tower::RadicalTower& T, unsigned level, std::string name, FieldPtr parent) {
  if (level > T.size()) throw std::invalid_argument("FieldModel::radical: level beyond the tower");
  if (!parent && level > 0) parent = radical(T, level - 1, name + "'");
  const auto R = std::make_shared<tower::RadicalTower>(T);
  u64 deg = euler_phi(T.m());
  for (unsigned i = 0; i < level; ++i) deg *= T.p();
  auto F = std::make_shared<FieldModel>(
      std::move(name), static_cast<unsigned>(deg), [R](u64 q) { return R->excluded(q); },
      [R, level](u64 q) {
        std::vector<Place> out;
        for (const auto& t : tower::traces_at(*R, q, level))
          out.push_back(Place{q, t.degree(), t.degree() / t.degrees.front(), static_cast<unsigned>(out.size())});
        return out;
      });
  F->parent_ = std::move(parent);
  return F;
}

const std::vector<char>& FieldModel::norm_subgroup(u64 L) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = subgroups_.find(L);
    if (it != subgroups_.end()) return *it->second;
  }
  auto H = std::make_shared<std::vector<char>>(L, 0);
  std::vector<u64> elems{1 % L};
  (*H)[1 % L] = 1;
  u64 full = L == 1 ? 1 : euler_phi(L);
  if (parent_) {
    // N_F is contained in the norm group of any subfield
    const auto& P = parent_->norm_subgroup(L);
    full = static_cast<u64>(std::count(P.begin(), P.end(), 1));
  }
  const u64 bound = std::min<u64>(std::max<u64>(300, 20 * L), 30000);
  auto add = [&](u64 g) {
    if ((*H)[g]) return;
    // H <- H <g>
    std::vector<u64> base = elems;
    u64 cur = g;
    while (!(*H)[cur]) {
      for (u64 h : base) {
        const u64 x = mulmod(h, cur, L);
        if (!(*H)[x]) {
          (*H)[x] = 1;
          elems.push_back(x);
        }
      }
      cur = mulmod(cur, g, L);
    }
  };
  for (u64 q : primes_up_to(bound)) {
    if (elems.size() == full) break;
    if (L % q == 0 || excluded_(q)) continue;
    for (const auto& v : places_(q)) add(v.norm_mod(L));
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = subgroups_.emplace(L, H);
  return *it->second;
}

bool equal_over(const DirichletCharacter& chi, const DirichletCharacter& psi, const FieldModel& F) {
  const u64 L = lcm_u64(chi.modulus(), psi.modulus());
  const auto& H = F.norm_subgroup(L);
  const u64 o1 = chi.order(), o2 = psi.order();
  for (u64 x = 0; x < L; ++x) {
    if (!H[x]) continue;
    const u64 e1 = *chi.exponent(x), e2 = *psi.exponent(x);
    if ((e1 * o2) % (o1 * o2) != (e2 * o1) % (o1 * o2)) return false;
  }
  return true;
}

bool trivial_over(const DirichletCharacter& chi, const FieldModel& F) {
  return equal_over(chi, DirichletCharacter::trivial(), F);
}

// ---------------------------------------------------------------------------
// Isobaric representations

IsobaricRep::IsobaricRep(FieldPtr field, std::vector<Component> components, mpq_class t)
    : field_(std::move(field)), comps_(std::move(components)), t_(std::move(t)) {}

unsigned IsobaricRep::n() const {
  unsigned n = 0;
  for (const auto& c : comps_) n += c.mult;
  return n;
}

u64 IsobaricRep::modulus() const {
  u64 L = 1;
  for (const auto& c : comps_) L = lcm_u64(L, c.chi.modulus());
  return L;
}

IsobaricRep IsobaricRep::twist(const DirichletCharacter& chi) const {
  std::vector<Component> cs;
  for (const auto& c : comps_) cs.push_back({c.chi * chi, c.mult});
  return make_isobaric(field_, cs, t_);
}

IsobaricRep IsobaricRep::conjugate() const {
  std::vector<Component> cs;
  for (const auto& c : comps_) cs.push_back({c.chi.conj(), c.mult});
  return make_isobaric(field_, cs, t_);
}

IsobaricRep IsobaricRep::contragredient() const {
  std::vector<Component> cs;
  for (const auto& c : comps_) cs.push_back({c.chi.conj(), c.mult});
  return make_isobaric(field_, cs, -t_);
}

std::string IsobaricRep::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (i) os << " + ";
    if (comps_[i].mult > 1) os << comps_[i].mult << "*";
    os << comps_[i].chi.to_string();
  }
  if (t_ != 0) os << " |.|^" << t_.get_str();
  os << " over " << field_->name();
  return os.str();
}

IsobaricRep make_isobaric(FieldPtr field, const std::vector<Component>& components, const mpq_class& t) {
  if (!field) throw std::invalid_argument("make_isobaric: no field");
  if (components.empty()) throw std::invalid_argument("make_isobaric: no components");
  std::vector<Component> out;
  for (const auto& c : components) {
    if (c.mult == 0) throw std::invalid_argument("make_isobaric: zero multiplicity");
    const auto chi = c.chi.primitive();
    bool merged = false;
    for (auto& o : out) {
      if (equal_over(o.chi, chi, *field)) {
        o.mult += c.mult;
        if (chi < o.chi) o.chi = chi;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({chi, c.mult});
  }
  std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) { return a.chi < b.chi; });
  mpq_class tt = t;
  tt.canonicalize();
  return IsobaricRep(std::move(field), std::move(out), tt);
}

std::complex<double> Eigenvalue::value(u64 q) const {
  return std::polar(std::pow(static_cast<double>(q), qexp.get_d()), 2.0 * M_PI * angle.get_d());
}

Eigenvalue Eigenvalue::pow(u64 f) const {
  mpq_class a = angle * static_cast<unsigned long>(f);
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  a -= fl;
  a.canonicalize();
  mpq_class e = qexp * static_cast<unsigned long>(f);
  e.canonicalize();
  return Eigenvalue{a, e};
}

Eigenvalue Eigenvalue::conj() const {
  mpq_class a = angle == 0 ? mpq_class(0) : mpq_class(1 - angle);
  a.canonicalize();
  return Eigenvalue{a, qexp};
}

std::complex<double> SatakeClass::trace() const {
  std::complex<double> s = 0;
  for (const auto& e : eigenvalues) s += e.value(v.q);
  return s;
}

SatakeClass SatakeClass::pow(u64 f) const {
  SatakeClass out;
  out.v = v;
  out.v.f = v.f * static_cast<unsigned>(f);
  for (const auto& e : eigenvalues) out.eigenvalues.push_back(e.pow(f));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

bool unramified_at(const IsobaricRep& pi, u64 q) {
  for (const auto& c : pi.components())
    if (c.chi.modulus() % q == 0) return false;
  return true;
}

SatakeClass satake(const IsobaricRep& pi, const Place& v) {
  SatakeClass A;
  A.v = v;
  for (const auto& c : pi.components()) {
    const auto e = c.chi.exponent(v.norm_mod(c.chi.modulus()));
    if (!e) throw PreconditionError("satake: " + c.chi.to_string() + " is ramified at q = " + std::to_string(v.q));
    mpq_class angle(static_cast<unsigned long>(*e), static_cast<unsigned long>(c.chi.order()));
    angle.canonicalize();
    mpq_class qexp = pi.t() * static_cast<unsigned long>(v.f);
    qexp.canonicalize();
    for (unsigned i = 0; i < c.mult; ++i) A.eigenvalues.push_back(Eigenvalue{angle, qexp});
  }
  std::sort(A.eigenvalues.begin(), A.eigenvalues.end());
  return A;
}

IsobaricRep base_change(const IsobaricRep& pi, FieldPtr M) {
  std::vector<Component> cs = pi.components();
  return make_isobaric(std::move(M), cs, pi.t());
}

BaseChangeReport verify_base_change(const IsobaricRep& pi, const tower::RadicalTower& T, int lo, int hi, u64 qmax,
                                    std::optional<int> mid) {
  if (lo < -1 || hi <= lo || hi > static_cast<int>(T.size())) throw std::invalid_argument("verify_base_change: bad levels");
  if (mid && (*mid <= lo || *mid >= hi)) throw std::invalid_argument("verify_base_change: mid must lie strictly between");
  const auto Mhi = FieldModel::radical(T, static_cast<unsigned>(hi), "level " + std::to_string(hi));
  const auto pi_hi = base_change(pi, Mhi);
  std::optional<IsobaricRep> pi_mid_hi, pi_mid;
  if (mid) {
    pi_mid = base_change(pi, FieldModel::radical(T, static_cast<unsigned>(*mid), "level " + std::to_string(*mid)));
    pi_mid_hi = base_change(*pi_mid, Mhi);
  }
  BaseChangeReport rep;
  rep.qmax = qmax;
  const auto primes = primes_up_to(qmax);
  struct Slot {
    u64 checked = 0, bad = 0, tchecked = 0, tbad = 0;
  };
  std::vector<Slot> slots(primes.size());
  parallel_for(primes.size(), [&](std::size_t idx) {
    const u64 q = primes[idx];
    if (T.excluded(q) || !unramified_at(pi, q)) return;
    Slot& s = slots[idx];
    for (const auto& w : tower::traces_at(T, q, static_cast<unsigned>(hi))) {
      const unsigned fv = lo < 0 ? 1 : w.degrees[static_cast<unsigned>(lo)];
      const unsigned fw = w.degree();
      const auto Av = satake(pi, Place{q, fv, 1, 0});
      const auto Aw = satake(pi_hi, Place{q, fw, 1, 0});
      ++s.checked;
      if (!Aw.same_multiset(Av.pow(fw / fv))) ++s.bad;
      if (mid) {
        const unsigned fu = w.degrees[static_cast<unsigned>(*mid)];
        const auto Au = satake(*pi_mid, Place{q, fu, 1, 0});
        const auto Aw2 = satake(*pi_mid_hi, Place{q, fw, 1, 0});
        ++s.tchecked;
        if (!Aw2.same_multiset(Aw) || !Aw2.same_multiset(Au.pow(fw / fu))) ++s.tbad;
      }
    }
  });
  for (const auto& s : slots) {
    rep.places_checked += s.checked;
    rep.mismatches += s.bad;
    rep.transitivity_checked += s.tchecked;
    rep.transitivity_mismatches += s.tbad;
  }
  return rep;
}

CentralCharacter central_char_and_t(const IsobaricRep& pi) {
  DirichletCharacter w;
  for (const auto& c : pi.components()) w = w * c.chi.pow(c.mult);
  mpq_class nt = pi.t() * pi.n();
  nt.canonicalize();
  return CentralCharacter{w, pi.t(), nt};
}

bool same_rep(const IsobaricRep& a, const IsobaricRep& b) {
  if (a.t() != b.t() || a.n() != b.n() || a.components().size() != b.components().size()) return false;
  const auto& F = *a.field();
  std::vector<char> used(b.components().size(), 0);
  for (const auto& c : a.components()) {
    bool found = false;
    for (std::size_t j = 0; j < b.components().size(); ++j) {
      if (used[j] || b.components()[j].mult != c.mult) continue;
      if (equal_over(c.chi, b.components()[j].chi, F)) {
        used[j] = 1;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::optional<DirichletCharacter> twist_equivalent(const IsobaricRep& a, const IsobaricRep& b) {
  if (a.n() != b.n()) throw std::invalid_argument("twist_equivalent: sizes differ");
  if (a.t() != b.t()) return std::nullopt;
  if (same_rep(make_isobaric(a.field(), a.components(), a.t()), make_isobaric(a.field(), b.components(), b.t())))
    return DirichletCharacter::trivial();
  const auto& c1 = a.components().front().chi;
  std::vector<DirichletCharacter> candidates;
  for (const auto& c : b.components()) candidates.push_back(c.chi * c1.conj());
  std::sort(candidates.begin(), candidates.end());
  for (const auto& chi : candidates) {
    const auto tw = make_isobaric(a.field(), a.twist(chi).components(), a.t());
    if (same_rep(tw, make_isobaric(a.field(), b.components(), b.t()))) return chi;
  }
  return std::nullopt;
}

bool lrs_check(const SatakeClass& A, unsigned n) {
  if (n < 2) throw std::invalid_argument("lrs_check: the strict bound is applied for n >= 2 only");
  mpq_class c = mpq_class(1, 2) - mpq_class(1, n * n + 1);
  c *= A.v.f;
  for (const auto& e : A.eigenvalues)
    if (!(e.qexp < c)) return false;
  return true;
}

TwistElimination twist_eliminate(const DirichletCharacter& eta, const DirichletCharacter& eta2, const DirichletCharacter& delta,
                                 u64 fresh, const FieldModel* field) {
  const u64 p = delta.order();
  if (!is_prime(p)) throw std::invalid_argument("twist_eliminate: delta must have prime order");
  if (delta.conductor() % fresh != 0) throw std::invalid_argument("twist_eliminate: fresh prime does not divide the conductor of delta");
  TwistElimination out;
  out.premise_ok = eta.conductor() % fresh != 0 && eta2.conductor() % fresh != 0;
  std::optional<u64> found;
  DirichletCharacter d = DirichletCharacter::trivial();
  for (u64 j = 0; j < p; ++j) {
    const auto cand = eta * d;
    const bool eq = field ? equal_over(cand, eta2, *field) : cand == eta2;
    if (eq) {
      found = j;
      break;
    }
    d = d * delta;
  }
  if (!found) throw PreconditionError("twist_eliminate: no j with eta' = eta delta^j");
  out.j = *found;
  if (out.j == 0) {
    out.forced = out.premise_ok;
    out.note = out.premise_ok ? "j = 0 forced: delta^j is ramified at the fresh prime for j != 0" : "j = 0 but premise fails";
  } else {
    out.inconsistent = true;
    out.note = out.premise_ok ? "j != 0 although neither conductor meets the fresh prime"
                              : "j != 0: eta' is ramified at the fresh prime, premise fails";
  }
  return out;
}

}  // namespace kummerlab::aut
