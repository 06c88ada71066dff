#pragma once

// JSON forms of the report objects, and the pair-file reader.

#include <json.hpp>

#include "determination.hpp"
#include "lseries.hpp"
#include "splitting.hpp"
#include "tower.hpp"

namespace kummerlab::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

/// Exact integers as numbers when they fit in 64 bits, decimal strings otherwise.
json integer(const mpz_class& z);

json to_json(const aut::DirichletCharacter& chi);
json to_json(const aut::IsobaricRep& pi);
json to_json(const split::Exception& e);
json to_json(const split::SweepReport& r);
json to_json(const split::DensityReport& r);
json to_json(const std::vector<split::ClassifiedPrime>& v);
json to_json(const split::Lemma44Result& r);
json to_json(const split::DisjointnessCertificate& c);
json to_json(const split::Lemma45Result& r);
json to_json(const split::Lemma58Result& r, const cyclo::PPSubfieldLattice& L);
json to_json(const cyclo::PPSubfieldLattice& L);
json to_json(const tower::PrimeTrace& t);
json to_json(const tower::RadicalStep& s);
json to_json(const tower::KummerTower& t);
json to_json(const tower::NestednessCertificate& c);
json to_json(const tower::RamificationProfile& r);
json to_json(const tower::FreshPrimePlan& f);
json to_json(const ls::CoefficientSeries& c);
json to_json(const ls::PositivityReport& r);
json to_json(const ls::PoleBook& b);
json to_json(const ls::SlopeReport& r);
json to_json(const ls::TailReport& r);
json to_json(const det::Witness& w);
json to_json(const det::AgreementHypothesis& h);
json to_json(const det::Prop21Report& r);
json to_json(const det::TowerPlan& p);
json to_json(const det::Prop53Report& r);
json to_json(const det::LAgreementReport& r);
json to_json(const det::DescentCertificate& c);
json to_json(const det::Descent7Report& r);
json to_json(const det::TheoremAReport& r);

/// A character: {"kronecker": D}, {"modulus": N, "generators": [a_1, ...]},
/// or {"trivial": true}. Throws std::invalid_argument.
aut::DirichletCharacter character_from_json(const json& j);
/// {"components": [{"character": ..., "mult": m}, ...], "t": "0"} or a bare component list.
aut::IsobaricRep rep_from_json(const json& j, aut::FieldPtr field);

}  // namespace kummerlab::io
