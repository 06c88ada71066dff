#include "lseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace kummerlab::ls {

namespace {

// Nv = q^f if it does not exceed X.
std::optional<u64> bounded_norm(u64 q, unsigned f, u64 X) {
  u64 n = 1;
  for (unsigned i = 0; i < f; ++i) {
    if (n > X / q) return std::nullopt;
    n *= q;
  }
  return n;
}

void require_unitary(const aut::IsobaricRep& a, const aut::IsobaricRep& b, const char* who) {
  if (!a.unitary() || !b.unitary())
    throw PreconditionError(std::string(who) + ": representations must be unitary (t = 0)");
}

void require_unramified(const aut::IsobaricRep& a, const aut::IsobaricRep& b, const std::vector<aut::Place>& places,
                        const char* who) {
  for (const auto& v : places)
    if (!aut::unramified_at(a, v.q) || !aut::unramified_at(b, v.q))
      throw PreconditionError(std::string(who) + ": selected prime q = " + std::to_string(v.q) + " is ramified");
}

u64 value_conductor(const aut::IsobaricRep& a, const aut::IsobaricRep& b) {
  u64 L = 1;
  for (const auto* r : {&a, &b})
    for (const auto& c : r->components()) L = lcm_u64(L, c.chi.order());
  return L;
}

// tr A^r as a group-ring element: exponent k of zeta_L -> multiplicity.
using GroupRing = std::map<u64, i64>;

GroupRing power_trace(const aut::SatakeClass& A, u64 r, u64 L) {
  GroupRing g;
  for (const auto& e : A.eigenvalues) {
    mpq_class k = e.angle * static_cast<unsigned long>(L) * static_cast<unsigned long>(r);
    k.canonicalize();
    const u64 kk = mpz_class(k.get_num() % static_cast<unsigned long>(L)).get_ui();
    g[kk] += 1;
  }
  return g;
}

// Raw coefficients of conj(a) * b in Z[zeta_L] before reduction.
void add_conj_product(std::vector<mpq_class>& raw, const GroupRing& a, const GroupRing& b, i64 sign, u64 L) {
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) raw[(kb + L - ka) % L] += sign * ca * cb;
}

GroupRing difference(const GroupRing& a, const GroupRing& b) {
  GroupRing d = a;
  for (const auto& [k, c] : b) d[k] -= c;
  for (auto it = d.begin(); it != d.end();) it = it->second == 0 ? d.erase(it) : std::next(it);
  return d;
}

int mobius(u64 n) {
  int mu = 1;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

// Trace from Q(zeta_L) to Q of zeta_L^k (Ramanujan sum).
i64 ramanujan(u64 L, u64 k) {
  const u64 g = std::gcd(k % L, L) == 0 ? L : std::gcd(k % L, L);
  const u64 d = L / g;
  return mobius(d) * static_cast<i64>(euler_phi(L) / euler_phi(d));
}

struct PlaceCoeffs {
  std::vector<std::pair<u64, cyclo::CycloElement>> entries;
};

}  // namespace

std::vector<aut::Place> PrimeSelector::enumerate() const {
  if (!field) throw std::invalid_argument("PrimeSelector: no field");
  std::vector<u64> qs;
  if (only) {
    for (u64 q : *only)
      if (q <= X) qs.push_back(q);
  } else {
    qs = primes_up_to(X);
  }
  // every selected place has Nv >= q^dmin, and f >= f_rel
  if (degrees && !degrees->empty()) {
    const unsigned dmin = *degrees->begin();
    qs.erase(std::remove_if(qs.begin(), qs.end(), [&](u64 q) { return !bounded_norm(q, dmin, X); }), qs.end());
  }
  std::vector<std::vector<aut::Place>> slots(qs.size());
  parallel_for(qs.size(), [&](std::size_t i) {
    const u64 q = qs[i];
    if (exceptions.count(q) || field->excluded(q)) return;
    for (const auto& v : field->places(q)) {
      if (!bounded_norm(q, v.f, X)) continue;
      const unsigned d = over == DegreeBase::Base ? v.f_rel : v.f;
      if (degrees && !degrees->count(d)) continue;
      slots[i].push_back(v);
    }
  });
  std::vector<aut::Place> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end(), [](const aut::Place& a, const aut::Place& b) {
    const auto na = a.norm(), nb = b.norm();
    if (na != nb) return na < nb;
    if (a.q != b.q) return a.q < b.q;
    return a.index < b.index;
  });
  return out;
}

PrimeSelector PrimeSelector::excluding_ramified(const aut::IsobaricRep& a, const aut::IsobaricRep& b) const {
  PrimeSelector s = *this;
  for (const auto* r : {&a, &b})
    for (const auto& c : r->components())
      for (const auto& [p, e] : factor_u64(c.chi.modulus())) s.exceptions.insert(p);
  return s;
}

std::string PrimeSelector::describe() const {
  std::ostringstream os;
  os << (field ? field->name() : "?") << ", Nv <= " << X;
  if (degrees) {
    os << ", degrees {";
    bool first = true;
    for (unsigned d : *degrees) {
      os << (first ? "" : ",") << d;
      first = false;
    }
    os << "} over " << (over == DegreeBase::Base ? "base" : "Q");
  }
  if (only) os << ", " << only->size() << " listed primes";
  if (!exceptions.empty()) {
    os << ", except {";
    bool first = true;
    for (u64 q : exceptions) {
      os << (first ? "" : ",") << q;
      first = false;
    }
    os << "}";
  }
  return os.str();
}

cyclo::CycloElement CoefficientSeries::at(u64 m) const {
  auto it = coeffs.find(m);
  if (it != coeffs.end()) return it->second;
  return cyclo::CycloElement(values);
}

std::complex<double> CoefficientSeries::value(u64 m) const { return at(m).embed(1); }

CoefficientSeries rs_coeffs(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel, u64 M,
                            SeriesKind kind) {
  require_unitary(pi, pi2, "rs_coeffs");
  PrimeSelector s = sel;
  s.X = std::min(sel.X, M);
  const auto places = s.enumerate();
  require_unramified(pi, pi2, places, "rs_coeffs");
  const u64 L = value_conductor(pi, pi2);
  CoefficientSeries out;
  out.kind = kind;
  out.M = M;
  out.values = cyclo::make_cyclo_field(L);
  out.pi = pi.to_string();
  out.pi2 = pi2.to_string();
  out.selector = sel.describe();
  out.places = places.size();
  std::vector<PlaceCoeffs> slots(places.size());
  parallel_for(places.size(), [&](std::size_t i) {
    const auto& v = places[i];
    const auto A = aut::satake(pi, v), B = aut::satake(pi2, v);
    const u64 Nv = *bounded_norm(v.q, v.f, M);
    u64 m = Nv;
    for (u64 r = 1;; ++r) {
      const auto a = power_trace(A, r, L), b = power_trace(B, r, L);
      std::vector<mpq_class> raw(L, 0);
      if (kind == SeriesKind::Y) {
        add_conj_product(raw, a, b, 1, L);
      } else {
        const auto d = difference(a, b);
        add_conj_product(raw, d, d, 1, L);
      }
      for (auto& x : raw) x /= static_cast<unsigned long>(r);
      slots[i].entries.emplace_back(m, cyclo::CycloElement(out.values, std::move(raw)));
      if (m > M / Nv) break;
      m *= Nv;
    }
  });
  for (auto& s2 : slots)
    for (auto& [m, c] : s2.entries) {
      auto it = out.coeffs.find(m);
      if (it == out.coeffs.end())
        out.coeffs.emplace(m, std::move(c));
      else
        it->second = it->second + c;
    }
  return out;
}

CoefficientSeries add_series(const CoefficientSeries& a, const CoefficientSeries& b) {
  if (a.kind != b.kind || a.values->m() != b.values->m())
    throw std::invalid_argument("add_series: series of different kinds or value fields");
  CoefficientSeries out = a;
  out.M = std::min(a.M, b.M);
  out.places = a.places + b.places;
  out.selector = a.selector + " + " + b.selector;
  for (const auto& [m, c] : b.coeffs) {
    auto it = out.coeffs.find(m);
    if (it == out.coeffs.end())
      out.coeffs.emplace(m, c);
    else
      it->second = it->second + c;
  }
  for (auto it = out.coeffs.begin(); it != out.coeffs.end();) it = it->first > out.M ? out.coeffs.erase(it) : std::next(it);
  return out;
}

std::vector<ZTerm> z_terms(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel) {
  require_unitary(pi, pi2, "z_terms");
  const auto places = sel.enumerate();
  require_unramified(pi, pi2, places, "z_terms");
  std::vector<std::vector<ZTerm>> slots(places.size());
  parallel_for(places.size(), [&](std::size_t i) {
    const auto& v = places[i];
    const auto A = aut::satake(pi, v), B = aut::satake(pi2, v);
    const u64 Nv = *bounded_norm(v.q, v.f, sel.X);
    const double logN = std::log(static_cast<double>(Nv));
    u64 m = Nv;
    for (u64 r = 1;; ++r) {
      std::complex<double> d = 0;
      for (const auto& e : A.eigenvalues) d += std::polar(1.0, 2.0 * M_PI * e.pow(r).angle.get_d());
      for (const auto& e : B.eigenvalues) d -= std::polar(1.0, 2.0 * M_PI * e.pow(r).angle.get_d());
      slots[i].push_back(ZTerm{static_cast<double>(r) * logN, std::norm(d) / static_cast<double>(r), static_cast<unsigned>(r), v.f});
      if (m > sel.X / Nv) break;
      m *= Nv;
    }
  });
  std::vector<ZTerm> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

double eval_terms(const std::vector<ZTerm>& terms, double s) {
  if (!(s > 1)) throw std::invalid_argument("log Z is evaluated only for real s > 1");
  double sum = 0, comp = 0;
  for (const auto& t : terms) {
    const double y = t.c * std::exp(-s * t.log_m) - comp;
    const double tmp = sum + y;
    comp = (tmp - sum) - y;
    sum = tmp;
  }
  return sum;
}

double log_partial_Z(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel, double s) {
  if (!(s > 1)) throw std::invalid_argument("log Z is evaluated only for real s > 1");
  return eval_terms(z_terms(pi, pi2, sel), s);
}

PoleBook pole_book(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2) {
  require_unitary(pi, pi2, "pole_book");
  if (pi.field()->name() != pi2.field()->name()) throw PreconditionError("pole_book: representations over different fields");
  PoleBook b;
  for (const auto& c : pi.components()) b.mu += static_cast<u64>(c.mult) * c.mult;
  for (const auto& c : pi2.components()) b.mu2 += static_cast<u64>(c.mult) * c.mult;
  for (const auto& c : pi.components())
    for (const auto& d : pi2.components())
      if (aut::equal_over(c.chi, d.chi, *pi.field())) b.shared += static_cast<u64>(c.mult) * d.mult;
  b.neg_ord = static_cast<i64>(b.mu + b.mu2) - 2 * static_cast<i64>(b.shared);
  return b;
}

PositivityReport positivity_check(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel,
                                  u64 M) {
  require_unitary(pi, pi2, "positivity_check");
  PrimeSelector s = sel;
  s.X = std::min(sel.X, M);
  const auto places = s.enumerate();
  require_unramified(pi, pi2, places, "positivity_check");
  const u64 L = value_conductor(pi, pi2);
  const auto F = cyclo::make_cyclo_field(L);

  struct Local {
    std::size_t checked = 0, nonzero = 0;
    bool real = true, identity = true, nonneg = true;
    std::optional<u64> min_m;
    double min_value = 0;
  };
  std::vector<Local> slots(places.size());
  parallel_for(places.size(), [&](std::size_t i) {
    auto& st = slots[i];
    const auto& v = places[i];
    const auto A = aut::satake(pi, v), B = aut::satake(pi2, v);
    const u64 Nv = *bounded_norm(v.q, v.f, M);
    u64 m = Nv;
    for (u64 r = 1;; ++r) {
      const auto a = power_trace(A, r, L), b = power_trace(B, r, L);
      const auto d = difference(a, b);
      std::vector<mpq_class> sq(L, 0), expanded(L, 0);
      add_conj_product(sq, d, d, 1, L);
      add_conj_product(expanded, a, a, 1, L);
      add_conj_product(expanded, b, b, 1, L);
      add_conj_product(expanded, a, b, -1, L);
      add_conj_product(expanded, b, a, -1, L);
      mpq_class trace = 0;
      for (u64 k = 0; k < L; ++k)
        if (sq[k] != 0) trace += sq[k] * ramanujan(L, k);
      trace /= static_cast<unsigned long>(r);
      for (auto& x : sq) x /= static_cast<unsigned long>(r);
      for (auto& x : expanded) x /= static_cast<unsigned long>(r);
      const cyclo::CycloElement c(F, std::move(sq)), c2(F, std::move(expanded));
      ++st.checked;
      if (!(c == c2)) st.identity = false;
      if (!(c == c.conj())) st.real = false;
      if (trace < 0) st.nonneg = false;
      if (!c.is_zero()) ++st.nonzero;
      const double val = c.embed(1).real();
      if (!st.min_m || val < st.min_value) {
        st.min_m = m;
        st.min_value = val;
      }
      if (m > M / Nv) break;
      m *= Nv;
    }
  });
  PositivityReport rep;
  for (const auto& st : slots) {
    rep.checked += st.checked;
    rep.nonzero += st.nonzero;
    rep.all_real = rep.all_real && st.real;
    rep.identity_ok = rep.identity_ok && st.identity;
    rep.all_nonnegative = rep.all_nonnegative && st.nonneg;
    if (st.min_m && (!rep.min_m || st.min_value < rep.min_value)) {
      rep.min_m = st.min_m;
      rep.min_value = st.min_value;
    }
  }
  return rep;
}

unsigned tail_threshold(unsigned n) {
  if (n < 1) throw std::invalid_argument("tail_threshold: n >= 1");
  return (n * n + 1) / 2 + 1;
}

TailReport tail_convergence_report(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, unsigned n,
                                   const PrimeSelector& sel, const std::vector<double>& s_grid) {
  TailReport rep;
  rep.n = n;
  rep.d0 = tail_threshold(n);
  if (!sel.degrees || sel.degrees->empty() || *sel.degrees->begin() < rep.d0)
    throw std::invalid_argument("tail_convergence_report: selector degrees must all be >= " + std::to_string(rep.d0));
  const auto terms = z_terms(pi, pi2, sel);
  for (const auto& t : terms)
    if (t.r == 1) ++rep.places;
  for (double s : s_grid) {
    if (!(s > 1) || !(s < 2)) throw std::invalid_argument("tail_convergence_report: grid must lie in (1, 2)");
    const double z = eval_terms(terms, s);
    rep.rows.push_back(TailRow{s, z, z / std::log(1.0 / (s - 1.0))});
  }
  return rep;
}

SlopeReport slope_experiment(const aut::IsobaricRep& pi, const aut::IsobaricRep& pi2, const PrimeSelector& sel,
                             const std::vector<double>& eps) {
  if (eps.size() < 2) throw std::invalid_argument("slope_experiment: need at least two values of eps");
  SlopeReport rep;
  rep.X = sel.X;
  const auto terms = z_terms(pi, pi2, sel);
  const double logX = std::log(static_cast<double>(sel.X));
  const double logHalf = std::log(static_cast<double>(sel.X) / 2.0);
  double sum = 0;
  std::size_t cnt = 0;
  for (const auto& t : terms)
    if (t.r == 1 && t.f == 1 && t.log_m > logHalf) {
      sum += t.c;
      ++cnt;
    }
  rep.tail_mean = cnt ? sum / static_cast<double>(cnt) : 0.0;
  for (double e : eps) {
    if (!(e > 0)) throw std::invalid_argument("slope_experiment: eps must be positive");
    const double raw = eval_terms(terms, 1.0 + e);
    const double tail = rep.tail_mean * -std::expint(-e * logX);
    rep.rows.push_back(SlopeRow{e, raw, raw + tail});
  }
  auto fit = [&](auto get) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(rep.rows.size());
    for (const auto& row : rep.rows) {
      const double x = std::log(1.0 / row.eps), y = get(row);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
  };
  rep.raw_slope = fit([](const SlopeRow& r) { return r.raw; });
  rep.completed_slope = fit([](const SlopeRow& r) { return r.completed; });
  if (pi.unitary() && pi2.unitary() && pi.field()->name() == pi2.field()->name())
    rep.predicted = pole_book(pi, pi2).neg_ord;
  return rep;
}

std::string series_csv(const CoefficientSeries& c) {
  std::ostringstream os;
  os << "m,re,im,exact\n";
  os.precision(17);
  for (const auto& [m, v] : c.coeffs) {
    const auto z = v.embed(1);
    os << m << "," << z.real() << "," << z.imag() << ",\"" << v.to_string() << "\"\n";
  }
  return os.str();
}

std::string slope_csv(const SlopeReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,log_inv_eps,raw,completed\n";
  for (const auto& row : r.rows) os << row.eps << "," << std::log(1.0 / row.eps) << "," << row.raw << "," << row.completed << "\n";
  return os.str();
}

std::string tail_csv(const TailReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "s,log_Z,ratio\n";
  for (const auto& row : r.rows) os << row.s << "," << row.log_Z << "," << row.ratio << "\n";
  return os.str();
}

}  // namespace kummerlab::ls
