#include "serialize.hpp"

#include <stdexcept>

namespace kummerlab::io {

namespace {

template <class T>
json list(const std::vector<T>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

json integers(const std::vector<mpz_class>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(integer(x));
  return out;
}

json optional_witness(const std::optional<det::Witness>& w) { return w ? to_json(*w) : json(nullptr); }

}  // namespace

json integer(const mpz_class& z) {
  if (z >= 0 && mpz_sizeinbase(z.get_mpz_t(), 2) <= 64) {
    u64 v = 0;
    mpz_export(&v, nullptr, -1, sizeof v, 0, 0, z.get_mpz_t());
    return v;
  }
  if (z < 0 && z.fits_slong_p()) return static_cast<i64>(z.get_si());
  return z.get_str();
}

json to_json(const aut::DirichletCharacter& chi) {
  return {{"text", chi.to_string()},
          {"modulus", chi.modulus()},
          {"order", chi.order()},
          {"conductor", chi.conductor()},
          {"generators", chi.generator_exponents()}};
}

json to_json(const aut::IsobaricRep& pi) {
  json comps = json::array();
  for (const auto& c : pi.components()) comps.push_back({{"character", to_json(c.chi)}, {"mult", c.mult}});
  return {{"text", pi.to_string()},
          {"field", pi.field() ? pi.field()->name() : ""},
          {"n", pi.n()},
          {"t", pi.t().get_str()},
          {"components", comps}};
}

json to_json(const split::Exception& e) { return {{"q", e.q}, {"reason", e.reason}}; }

json to_json(const split::SweepReport& r) {
  return {{"lemma", r.lemma},
          {"parameters", r.parameters},
          {"range", {r.range_lo, r.range_hi}},
          {"checked", r.checked},
          {"verified_count", r.verified_count},
          {"exceptions", list(r.exceptions)},
          {"skipped", r.skipped},
          {"ok", r.ok()}};
}

json to_json(const split::DensityReport& r) {
  return {{"X", r.X},
          {"degree1", r.degree1},
          {"degreep", r.degreep},
          {"total", r.total},
          {"ratio", r.ratio ? json(*r.ratio) : json("NA")},
          {"ramified", r.ramified}};
}

json to_json(const std::vector<split::ClassifiedPrime>& v) {
  json out = json::array();
  for (const auto& c : v)
    out.push_back({{"q", c.q},
                   {"base_index", c.base_index},
                   {"index", c.index},
                   {"class", split::to_string(c.cls)},
                   {"norm", integer(c.norm)},
                   {"degree_over_q", c.degree_over_q}});
  return out;
}

json to_json(const split::Lemma44Result& r) {
  return {{"norms", integers(r.norms)},
          {"unique", r.unique},
          {"norms_ok", r.norms_ok},
          {"lifts_per_level", r.lifts_per_level}};
}

json to_json(const split::DisjointnessCertificate& c) {
  json w = json::array();
  for (const auto& [vec, q] : c.witnesses) w.push_back({{"exponents", vec}, {"q", q}});
  return {{"certified", c.certified}, {"witnesses", w}};
}

json to_json(const split::Lemma45Result& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"q", e.q},
                       {"chain", to_json(e.chain)},
                       {"bound", integer(e.bound)},
                       {"unramified_in_compositum", e.unramified_in_compositum}});
  return {{"disjoint", to_json(r.disjoint)}, {"entries", entries}, {"certified", r.certified}};
}

json to_json(const cyclo::PPSubfieldLattice& L) {
  json subs = json::array();
  for (const auto& s : L.subfields)
    subs.push_back({{"label", s.label},
                    {"generator", {s.generator.first, s.generator.second}},
                    {"kummer", s.kummer.to_string()},
                    {"name", s.name}});
  return {{"p", L.p}, {"a", L.a.to_string()}, {"b", L.b.to_string()}, {"subfields", subs}};
}

json to_json(const split::Lemma58Result& r, const cyclo::PPSubfieldLattice& L) {
  std::string name;
  for (const auto& s : L.subfields)
    if (s.label == r.index) name = s.name;
  return {{"index", r.index},
          {"subfield", name},
          {"frobenius", {r.frobenius.first, r.frobenius.second}},
          {"verified", r.verified},
          {"raw_candidates", r.raw_candidates}};
}

json to_json(const tower::PrimeTrace& t) {
  json roots = json::array();
  for (const auto& y : t.roots) roots.push_back(y.to_string());
  return {{"q", t.q},
          {"level", t.level()},
          {"degree", t.degree()},
          {"norm", integer(t.norm())},
          {"degrees", t.degrees},
          {"modulus", t.field->modulus()},
          {"zeta", t.zeta.to_string()},
          {"roots", roots}};
}

json to_json(const tower::RadicalStep& s) {
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back({{"coeff", t.coeff.to_string()}, {"exponents", t.exponents}});
  json out = {{"label", s.label}, {"base_factor", s.base_factor.to_string()}, {"exponents", s.exponents}};
  if (!s.terms.empty()) out["terms"] = terms;
  return out;
}

json to_json(const tower::KummerTower& t) {
  json mult = json::array();
  for (const auto& [b, e] : t.multipliers) mult.push_back({{"beta", b.get_str()}, {"exponent", e}});
  const auto R = t.radical();
  return {{"m", t.m()},
          {"p", t.p},
          {"r", t.r},
          {"sub_base", t.sub_base},
          {"alpha", t.alpha.to_string()},
          {"original", t.original.to_string()},
          {"multipliers", mult},
          {"prefix", list(t.prefix)},
          {"steps", list(R.steps())},
          {"support", R.support()}};
}

json to_json(const tower::NestednessCertificate& c) {
  json degrees = json::array(), cyc = json::array();
  for (const auto& d : c.degrees) degrees.push_back({{"level", d.level}, {"witness_q", d.witness_q}, {"certified", d.certified}});
  for (const auto& pc : c.cyclicity) cyc.push_back({{"level", pc.level}, {"certified", pc.certified}, {"reason", pc.reason}});
  return {{"valid", c.valid},
          {"inconclusive", c.inconclusive},
          {"failure", c.failure},
          {"witness_q", c.witness_q},
          {"degrees", degrees},
          {"cyclicity", cyc}};
}

json to_json(const tower::RamificationProfile& r) {
  return {{"q", r.q}, {"wild", r.wild}, {"valuation", r.valuation}, {"levels", r.levels}, {"e", r.e}};
}

json to_json(const tower::FreshPrimePlan& f) {
  json mult = json::array();
  for (const auto& [b, e] : f.multipliers) mult.push_back({{"beta", b.get_str()}, {"exponent", e}});
  return {{"primes", f.primes}, {"multipliers", mult}, {"profiles", list(f.profiles)}, {"certified", f.certified}};
}

json to_json(const ls::CoefficientSeries& c) {
  json coeffs = json::array();
  for (const auto& [m, x] : c.coeffs) {
    const auto v = c.value(m);
    coeffs.push_back({{"m", m}, {"exact", x.to_string()}, {"re", v.real()}, {"im", v.imag()}});
  }
  return {{"kind", c.kind == ls::SeriesKind::Z ? "Z" : "Y"},
          {"M", c.M},
          {"value_field", "Q(zeta_" + std::to_string(c.values->m()) + ")"},
          {"pi", c.pi},
          {"pi2", c.pi2},
          {"selector", c.selector},
          {"places", c.places},
          {"coefficients", coeffs}};
}

json to_json(const ls::PositivityReport& r) {
  return {{"checked", r.checked},
          {"nonzero", r.nonzero},
          {"all_real", r.all_real},
          {"identity_ok", r.identity_ok},
          {"all_nonnegative", r.all_nonnegative},
          {"min_m", r.min_m ? json(*r.min_m) : json(nullptr)},
          {"min_value", r.min_value},
          {"ok", r.ok()}};
}

json to_json(const ls::PoleBook& b) {
  return {{"mu", b.mu}, {"mu2", b.mu2}, {"shared", b.shared}, {"neg_ord", b.neg_ord}};
}

json to_json(const ls::SlopeReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"eps", row.eps}, {"raw", row.raw}, {"completed", row.completed}});
  return {{"X", r.X},
          {"tail_mean", r.tail_mean},
          {"rows", rows},
          {"raw_slope", r.raw_slope},
          {"completed_slope", r.completed_slope},
          {"predicted", r.predicted ? json(*r.predicted) : json(nullptr)}};
}

json to_json(const ls::TailReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"s", row.s}, {"log_Z", row.log_Z}, {"ratio", row.ratio}});
  return {{"n", r.n}, {"d0", r.d0}, {"places", r.places}, {"rows", rows}};
}

json to_json(const det::Witness& w) {
  return {{"q", w.q}, {"f", w.f}, {"degree", w.degree}, {"detail", w.detail}};
}

json to_json(const det::AgreementHypothesis& h) {
  json tables = json::array();
  for (const auto& t : h.tables) tables.push_back({{"degree", t.degree}, {"checked", t.checked}, {"agreed", t.agreed}});
  return {{"K", h.K},
          {"p", h.p},
          {"X", h.X},
          {"holds", h.holds()},
          {"tables", tables},
          {"witness", optional_witness(h.witness)},
          {"witness_p", optional_witness(h.witness_p)},
          {"exceptions", h.exceptions}};
}

json to_json(const det::Prop21Report& r) {
  json comps = json::array(), res = json::array(), res2 = json::array();
  for (const auto& c : r.peeled) comps.push_back({{"character", to_json(c.chi)}, {"mult", c.mult}});
  for (const auto& c : r.residual) res.push_back({{"character", to_json(c.chi)}, {"mult", c.mult}});
  for (const auto& c : r.residual2) res2.push_back({{"character", to_json(c.chi)}, {"mult", c.mult}});
  return {{"verdict", det::to_string(r.verdict)},
          {"field", r.field},
          {"n", r.n},
          {"d0", r.d0},
          {"X", r.X},
          {"places_checked", r.places_checked},
          {"witness", optional_witness(r.witness)},
          {"model_equal", r.model_equal},
          {"poles", to_json(r.poles)},
          {"slope", r.slope ? to_json(*r.slope) : json(nullptr)},
          {"peeled", comps},
          {"residual", res},
          {"residual2", res2}};
}

json to_json(const det::TowerPlan& p) {
  json chains = json::array();
  for (const auto& c : p.chains)
    chains.push_back({{"index", c.index},
                      {"subfield", c.subfield},
                      {"anchor", c.anchor_text},
                      {"quartic", c.quartic},
                      {"tower", to_json(c.tower)},
                      {"fresh", to_json(c.fresh)}});
  json steps = json::array();
  for (const auto& s : p.steps)
    steps.push_back({{"level", s.level}, {"chain", s.chain}, {"chain_level", s.chain_level}, {"fresh", s.fresh}});
  json levels = json::array();
  for (const auto& f : p.level_fields) levels.push_back({{"name", f->name()}, {"degree", f->degree()}});
  return {{"K", p.K.name},
          {"p", p.K.p},
          {"n", p.n},
          {"r", p.r.r},
          {"direct", p.r.direct},
          {"K_is_E", p.K_is_E},
          {"lattice", p.lattice ? to_json(*p.lattice) : json(nullptr)},
          {"chains", chains},
          {"E_level", p.E_level},
          {"steps", steps},
          {"levels", levels},
          {"forbidden", p.forbidden},
          {"obstruction", p.obstruction.empty() ? json(nullptr) : json(p.obstruction)},
          {"corrupted", p.corrupted}};
}

json to_json(const det::Prop53Report& r) {
  return {{"X", r.X},
          {"bound", r.bound},
          {"inert_checked", r.inert_checked},
          {"inert_certified", r.inert_certified},
          {"split_count", r.split_count},
          {"index_counts", r.index_counts},
          {"min_degree", r.min_degree},
          {"exceptions", list(r.exceptions)},
          {"skipped", r.skipped},
          {"ok", r.ok()}};
}

json to_json(const det::LAgreementReport& r) {
  return {{"X", r.X},
          {"d0", r.d0},
          {"places", r.places},
          {"small_degree", r.small_degree},
          {"small_over_sigma1", r.small_over_sigma1},
          {"small_agree", r.small_agree},
          {"large_over_sigmap", r.large_over_sigmap},
          {"witness", optional_witness(r.witness)},
          {"model_equal", r.model_equal},
          {"ok", r.ok()}};
}

json to_json(const det::DescentCertificate& c) {
  json steps = json::array();
  for (const auto& s : c.steps) {
    json pairs = json::array();
    for (const auto& e : s.pairs)
      pairs.push_back({{"j", e.j},
                       {"premise_ok", e.premise_ok},
                       {"forced", e.forced},
                       {"inconsistent", e.inconsistent},
                       {"note", e.note}});
    steps.push_back({{"level", s.level},
                     {"chain", s.chain},
                     {"chain_level", s.chain_level},
                     {"fresh", s.fresh},
                     {"field", s.field},
                     {"delta", s.delta},
                     {"pairs", pairs},
                     {"ok", s.ok}});
  }
  return {{"premise", c.premise},
          {"steps", steps},
          {"fresh_increasing", c.fresh_increasing},
          {"ok", c.ok},
          {"failure", c.failure},
          {"statement", c.statement}};
}

json to_json(const det::Descent7Report& r) {
  return {{"passthrough", r.passthrough},
          {"X", r.X},
          {"sigma1", {{"checked", r.sigma1_checked}, {"agree", r.sigma1_agree}}},
          {"sigmap", {{"checked", r.sigmap_checked}, {"agree", r.sigmap_agree}}},
          {"witness", optional_witness(r.witness)},
          {"exceptions", list(r.exceptions)},
          {"model_equal", r.model_equal},
          {"verdict", det::to_string(r.verdict)}};
}

json to_json(const det::TheoremAReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages) stages.push_back({{"name", s.name}, {"verdict", s.verdict}, {"detail", s.detail}});
  auto central = [](const aut::CentralCharacter& c) {
    return json{{"omega", to_json(c.omega)}, {"t", c.t.get_str()}, {"abs_exponent", c.abs_exponent.get_str()}};
  };
  return {{"verdict", det::to_string(r.verdict)},
          {"exit_code", det::exit_code(r.verdict)},
          {"K", r.K},
          {"pi", r.pi},
          {"pi2", r.pi2},
          {"central", central(r.omega)},
          {"central2", central(r.omega2)},
          {"hypothesis", to_json(r.hypothesis)},
          {"r", r.r ? json{{"r", r.r->r}, {"direct", r.r->direct}} : json(nullptr)},
          {"prop53", r.prop53 ? to_json(*r.prop53) : json(nullptr)},
          {"prop21_direct", r.prop21_direct ? to_json(*r.prop21_direct) : json(nullptr)},
          {"prop21_L", r.prop21_L ? to_json(*r.prop21_L) : json(nullptr)},
          {"descent6", r.descent6 ? to_json(*r.descent6) : json(nullptr)},
          {"descent7", r.descent7 ? to_json(*r.descent7) : json(nullptr)},
          {"twist", r.twist ? to_json(*r.twist) : json(nullptr)},
          {"corollary_b", r.corollary_b},
          {"fresh_primes", r.fresh_primes},
          {"stages", stages}};
}

aut::DirichletCharacter character_from_json(const json& j) {
  if (j.is_object() && j.contains("kronecker")) return aut::DirichletCharacter::kronecker(j.at("kronecker").get<i64>());
  if (j.is_object() && j.value("trivial", false)) return aut::DirichletCharacter::trivial();
  if (j.is_object() && j.contains("modulus")) {
    std::vector<u64> gens = j.value("generators", std::vector<u64>{});
    return aut::DirichletCharacter::from_generators(j.at("modulus").get<u64>(), gens);
  }
  throw std::invalid_argument("character: expected {kronecker}, {modulus, generators} or {trivial}");
}

aut::IsobaricRep rep_from_json(const json& j, aut::FieldPtr field) {
  const json& comps = j.is_array() ? j : j.at("components");
  if (!comps.is_array() || comps.empty()) throw std::invalid_argument("representation: empty component list");
  std::vector<aut::Component> out;
  for (const auto& c : comps) {
    const json& ch = c.contains("character") ? c.at("character") : c;
    const unsigned mult = c.value("mult", 1u);
    if (mult == 0) throw std::invalid_argument("representation: multiplicity 0");
    out.push_back(aut::Component{character_from_json(ch), mult});
  }
  mpq_class t = 0;
  if (j.is_object() && j.contains("t")) {
    const auto& tj = j.at("t");
    t = tj.is_string() ? mpq_class(tj.get<std::string>()) : mpq_class(tj.get<i64>());
    t.canonicalize();
  }
  return aut::make_isobaric(std::move(field), out, t);
}

}  // namespace kummerlab::io
