#include "run.hpp"

#include <algorithm>
#include <stdexcept>

namespace kummerlab::cli {

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

u64 positive(const json& j, const char* key, u64 fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<i64>() <= 0) throw std::invalid_argument(std::string(key) + " must be a positive integer");
  return v.get<u64>();
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

cyclo::CycloElement parse_datum(u64 m, const std::string& text) {
  require(!text.empty(), "--alpha is required");
  if (m == 0) {
    require(text.find('z') == std::string::npos, "--m is required when the datum involves z");
    m = 1;
  }
  return cyclo::parse_element(cyclo::make_cyclo_field(cyclo::normalize_conductor(m)), text);
}

tower::KummerTower make_tower(const RunConfig& c, const std::string& alpha) {
  return tower::build_nested_chain(parse_datum(c.m, alpha), c.p, c.r, c.sub_base);
}

aut::FieldPtr field_of(const split::CyclicExtension& K) {
  if (K.trivial && K.m() == 1) return aut::FieldModel::rationals();
  return aut::FieldModel::cyclic(K);
}

std::pair<aut::IsobaricRep, aut::IsobaricRep> read_pair(const RunConfig& c, const aut::FieldPtr& field) {
  require(c.pair.is_object() && c.pair.contains("pi") && c.pair.contains("pi2"), "--pair must give pi and pi2");
  return {io::rep_from_json(c.pair.at("pi"), field), io::rep_from_json(c.pair.at("pi2"), field)};
}

cyclo::PPSubfieldLattice lattice_of(const RunConfig& c) {
  require(!c.F.empty(), "--F is required");
  const auto K = split::parse_extension(c.K), F = split::parse_extension(c.F);
  require(!K.trivial && !F.trivial, "K and F must be nontrivial");
  require(K.p == F.p, "K and F must have the same degree p");
  require(K.m() == F.m(), "K and F must be radical extensions of the same base");
  return cyclo::pp_lattice(K.a, F.a, K.p);
}

int sweep_code(bool ok) { return ok ? kOk : kInconclusive; }

struct Outcome {
  json report;
  int code = kOk;
  std::optional<std::string> csv;
};

Outcome dispatch(const RunConfig& c, ContextCache* cache) {
  Outcome out;
  const std::string& cmd = c.command;
  if (cmd == "tower build") {
    const auto t = make_tower(c, c.alpha);
    out.report = {{"tower", io::to_json(t)}};
  } else if (cmd == "tower verify") {
    const auto t = make_tower(c, c.alpha);
    const auto cert = tower::verify_nested(t, c.search_bound);
    out.report = {{"tower", io::to_json(t)}, {"certificate", io::to_json(cert)}};
    out.code = cert.valid ? kOk : kInconclusive;
  } else if (cmd == "split trace") {
    require(c.q.has_value(), "--q is required");
    const auto R = make_tower(c, c.alpha).radical();
    json levels = json::array();
    for (unsigned level = 0; level <= R.size(); ++level) {
      json traces = json::array();
      for (const auto& t : tower::traces_at(R, *c.q, level)) traces.push_back(io::to_json(t));
      levels.push_back({{"level", level}, {"traces", traces}});
    }
    out.report = {{"q", *c.q}, {"levels", levels}};
  } else if (cmd == "split classify") {
    require(c.q.has_value(), "--q is required");
    out.report = {{"K", c.K}, {"q", *c.q}, {"primes", io::to_json(split::classify_prime(split::parse_extension(c.K), *c.q))}};
  } else if (cmd == "split density") {
    require(c.X >= 2, "--X must be at least 2");
    out.report = io::to_json(split::degree1_density(split::parse_extension(c.K), c.X));
    out.report["K"] = c.K;
  } else if (cmd == "lemma 44") {
    const auto t = make_tower(c, c.alpha);
    if (c.q) {
      const auto R = t.radical();
      json results = json::array();
      bool any = false;
      for (const auto& v0 : split::chain_bottom_traces(t, *c.q)) {
        if (tower::next_step_splits(v0, R)) {
          results.push_back({{"norm", io::integer(v0.norm())}, {"status", "split at the first step"}});
          continue;
        }
        any = true;
        json r = io::to_json(split::lemma44_check(t, v0));
        r["status"] = "certified";
        results.push_back(r);
      }
      if (!any) throw PreconditionError("lemma 44: no prime above q is inert at the first step");
      out.report = {{"q", *c.q}, {"results", results}};
      for (const auto& r : results)
        if (r.contains("norms")) {
          out.report["norms"] = r.at("norms");
          break;
        }
    } else {
      require(c.X >= 2, "--q or --X is required");
      const auto s = split::lemma44_sweep(t, c.X);
      out.report = io::to_json(s);
      out.code = sweep_code(s.ok());
    }
  } else if (cmd == "lemma 45") {
    require(c.alphas.size() >= 1, "--alpha is required (one per chain)");
    std::vector<tower::KummerTower> towers;
    for (const auto& a : c.alphas) towers.push_back(make_tower(c, a));
    const auto s = split::lemma45_sweep(towers, c.X ? c.X : 500);
    out.report = io::to_json(s);
    out.code = sweep_code(s.ok());
  } else if (cmd == "lemma 58") {
    const auto L = lattice_of(c);
    out.report = {{"lattice", io::to_json(L)}};
    if (c.q) {
      json res = json::array();
      for (const auto& P : cyclo::cyclo_primes_above(L.a.m(), *c.q)) res.push_back(io::to_json(split::lemma58_classify(L, P), L));
      out.report["q"] = *c.q;
      out.report["results"] = res;
    } else {
      require(c.X >= 2, "--q or --X is required");
      std::vector<u64> counts;
      const auto s = split::lemma58_sweep(L, c.X, &counts);
      out.report["sweep"] = io::to_json(s);
      out.report["index_counts"] = counts;
      out.code = sweep_code(s.ok());
    }
  } else if (cmd == "lemma 7split") {
    require(c.X >= 2, "--X must be at least 2");
    const auto L = lattice_of(c);
    const auto s = split::inert_splits_in_E(L, c.X);
    out.report = {{"lattice", io::to_json(L)}, {"sweep", io::to_json(s)}};
    out.code = sweep_code(s.ok());
  } else if (cmd == "rs coeffs" || cmd == "rs positivity" || cmd == "rs slope") {
    const auto field = field_of(split::parse_extension(c.K));
    const auto [pi, pi2] = read_pair(c, field);
    ls::PrimeSelector sel;
    sel.field = field;
    if (cmd == "rs slope") {
      require(c.X >= 2, "--X must be at least 2");
      sel.X = c.X;
      sel = sel.excluding_ramified(pi, pi2);
      const auto rep = ls::slope_experiment(pi, pi2, sel, c.eps.empty() ? std::vector<double>{0.1, 0.05, 0.02, 0.01} : c.eps);
      out.report = {{"pi", io::to_json(pi)}, {"pi2", io::to_json(pi2)}, {"poles", io::to_json(ls::pole_book(pi, pi2))},
                    {"slope", io::to_json(rep)}};
      out.csv = ls::slope_csv(rep);
    } else {
      require(c.M >= 1, "--M must be positive");
      sel.X = c.M;
      sel = sel.excluding_ramified(pi, pi2);
      if (cmd == "rs coeffs") {
        require(c.kind == "Z" || c.kind == "Y", "--kind must be Z or Y");
        const auto s = ls::rs_coeffs(pi, pi2, sel, c.M, c.kind == "Z" ? ls::SeriesKind::Z : ls::SeriesKind::Y);
        out.report = io::to_json(s);
        out.csv = ls::series_csv(s);
      } else {
        const auto rep = ls::positivity_check(pi, pi2, sel, c.M);
        out.report = {{"pi", io::to_json(pi)}, {"pi2", io::to_json(pi2)}, {"M", c.M}, {"positivity", io::to_json(rep)}};
        out.code = rep.ok() ? kOk : kInconclusive;
      }
    }
  } else if (cmd == "rs tail") {
    require(c.n >= 1, "--n must be positive");
    const unsigned d0 = ls::tail_threshold(c.n);
    out.report = {{"n", c.n}, {"d0", d0}};
    if (!c.pair.is_null()) {
      const auto field = field_of(split::parse_extension(c.K));
      const auto [pi, pi2] = read_pair(c, field);
      require(c.X >= 2, "--X must be at least 2");
      ls::PrimeSelector sel;
      sel.field = field;
      sel.X = c.X;
      sel.over = ls::DegreeBase::Rational;
      std::set<unsigned> degrees;
      for (unsigned d = d0; d < d0 + 8; ++d) degrees.insert(d);
      sel.degrees = degrees;
      sel = sel.excluding_ramified(pi, pi2);
      const auto rep = ls::tail_convergence_report(
          pi, pi2, c.n, sel, c.s_grid.empty() ? std::vector<double>{1.5, 1.2, 1.1, 1.05, 1.02} : c.s_grid);
      out.report["tail"] = io::to_json(rep);
      out.csv = ls::tail_csv(rep);
    }
  } else if (cmd == "descent plan") {
    const auto K = split::parse_extension(c.K);
    const auto plan = det::build_L(K, c.n);
    const auto p53 = det::verify_prop53(plan, c.X_prop53);
    out.report = {{"plan", io::to_json(plan)}, {"prop53", io::to_json(p53)}};
    out.code = p53.ok() ? kOk : kInconclusive;
  } else if (cmd == "descent run" || cmd == "theorem-a") {
    const auto K = split::parse_extension(c.K);
    const auto field = field_of(K);
    const auto [pi, pi2] = read_pair(c, field);
    det::TheoremAOptions opt;
    opt.X = c.X ? c.X : 100000;
    opt.X_L = c.X_L;
    opt.X_prop53 = c.X_prop53;
    const det::TheoremAContext* ctx = nullptr;
    if (cache && !K.trivial && pi.n() == pi2.n() && !det::choose_r(pi.n(), K.p).direct)
      ctx = &cache->get(K, pi.n(), opt.X_prop53);
    const auto rep = det::theorem_a(K, pi, pi2, opt, ctx);
    if (cmd == "theorem-a") {
      out.report = io::to_json(rep);
    } else {
      const json full = io::to_json(rep);
      out.report = json::object();
      for (const char* key : {"verdict", "K", "pi", "pi2", "r", "fresh_primes", "prop53", "prop21_L", "descent6", "descent7", "stages"})
        out.report[key] = full.at(key);
    }
    out.code = det::exit_code(rep.verdict);
  } else {
    throw std::invalid_argument("unknown command '" + cmd + "'");
  }
  return out;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> all = {
      "tower build", "tower verify", "split trace", "split classify", "split density", "lemma 44", "lemma 45",
      "lemma 58",    "lemma 7split", "rs coeffs",   "rs slope",       "rs positivity", "rs tail",  "descent plan",
      "descent run", "theorem-a"};
  return all;
}

const det::TheoremAContext& ContextCache::get(const split::CyclicExtension& K, unsigned n, u64 X_prop53) {
  std::lock_guard lock(mu_);
  auto key = std::make_tuple(K.name, n, X_prop53);
  auto it = contexts_.find(key);
  if (it == contexts_.end()) it = contexts_.emplace(key, det::prepare_context(K, n, {}, X_prop53)).first;
  return it->second;
}

RunConfig config_from_json(const json& j) {
  require(j.is_object(), "configuration must be a JSON object");
  RunConfig c;
  c.command = get_or<std::string>(j, "command", "");
  require(std::find(commands().begin(), commands().end(), c.command) != commands().end(),
          "unknown command '" + c.command + "'");
  c.m = j.contains("m") ? positive(j, "m", 1) : 0;
  c.p = positive(j, "p", 2);
  require(is_prime(c.p), "--p must be prime");
  c.r = static_cast<unsigned>(get_or<u64>(j, "r", 1));
  c.sub_base = get_or<bool>(j, "sub_base", false);
  if (j.contains("alpha") && j.at("alpha").is_array()) {
    c.alphas = j.at("alpha").get<std::vector<std::string>>();
    if (!c.alphas.empty()) c.alpha = c.alphas.front();
  } else {
    c.alpha = get_or<std::string>(j, "alpha", "");
    if (!c.alpha.empty()) c.alphas = {c.alpha};
  }
  c.K = get_or<std::string>(j, "K", "Q");
  c.F = get_or<std::string>(j, "F", "");
  if (j.contains("q") && !j.at("q").is_null()) {
    c.q = positive(j, "q", 0);
    require(is_prime(*c.q), "--q must be prime");
  }
  c.X = positive(j, "X", 0);
  c.M = positive(j, "M", 0);
  c.X_L = positive(j, "X_L", 2000);
  c.X_prop53 = positive(j, "X_prop53", 2000);
  c.n = static_cast<unsigned>(positive(j, "n", 2));
  c.eps = get_or<std::vector<double>>(j, "eps", {});
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    require(c.eps[i] > 0, "--eps values must be positive");
    require(i == 0 || c.eps[i] < c.eps[i - 1], "--eps grid must be strictly decreasing");
  }
  c.s_grid = get_or<std::vector<double>>(j, "s", {});
  for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
    require(c.s_grid[i] > 1, "--s values must exceed 1");
    require(i == 0 || c.s_grid[i] < c.s_grid[i - 1], "--s grid must be strictly decreasing");
  }
  c.kind = get_or<std::string>(j, "kind", "Z");
  c.pair = j.contains("pair") ? j.at("pair") : json(nullptr);
  c.format = get_or<std::string>(j, "format", "json");
  require(c.format == "json" || c.format == "csv", "--format must be json or csv");
  c.threads = static_cast<unsigned>(get_or<u64>(j, "threads", 0));
  c.search_bound = positive(j, "search_bound", 10000);
  return c;
}

json to_json(const RunConfig& c) {
  json j = {{"command", c.command}};
  if (c.m) j["m"] = c.m;
  j["p"] = c.p;
  j["r"] = c.r;
  if (c.sub_base) j["sub_base"] = true;
  if (c.alphas.size() > 1) j["alpha"] = c.alphas;
  else if (!c.alpha.empty()) j["alpha"] = c.alpha;
  j["K"] = c.K;
  if (!c.F.empty()) j["F"] = c.F;
  if (c.q) j["q"] = *c.q;
  if (c.X) j["X"] = c.X;
  if (c.M) j["M"] = c.M;
  j["X_L"] = c.X_L;
  j["X_prop53"] = c.X_prop53;
  j["n"] = c.n;
  if (!c.eps.empty()) j["eps"] = c.eps;
  if (!c.s_grid.empty()) j["s"] = c.s_grid;
  j["kind"] = c.kind;
  if (!c.pair.is_null()) j["pair"] = c.pair;
  j["format"] = c.format;
  return j;
}

RunResult run(const RunConfig& config, ContextCache* cache) {
  RunResult res;
  try {
    if (config.threads) set_worker_threads(config.threads);
    Outcome o = dispatch(config, cache);
    res.exit_code = o.code;
    if (config.format == "csv") {
      if (!o.csv) throw std::invalid_argument("--format csv is not available for '" + config.command + "'");
      res.output = *o.csv;
    } else {
      json doc = {{"schema", io::kSchema}, {"command", config.command}, {"parameters", to_json(config)}, {"report", o.report}};
      res.output = doc.dump(2) + "\n";
    }
  } catch (const InconclusiveError& e) {
    res.exit_code = kInconclusive;
    res.error = e.what();
  } catch (const std::invalid_argument& e) {
    res.exit_code = kUsage;
    res.error = e.what();
  } catch (const PreconditionError& e) {
    res.exit_code = kUsage;
    res.error = e.what();
  } catch (const json::exception& e) {
    res.exit_code = kUsage;
    res.error = e.what();
  } catch (const std::exception& e) {
    res.exit_code = kInternal;
    res.error = e.what();
  }
  if (!res.error.empty()) {
    json doc = {{"schema", io::kSchema}, {"command", config.command}, {"error", res.error}, {"exit_code", res.exit_code}};
    res.output = doc.dump(2) + "\n";
  }
  return res;
}

RunResult run_json(const std::string& config_text, ContextCache* cache) {
  RunConfig c;
  try {
    c = config_from_json(json::parse(config_text));
  } catch (const std::exception& e) {
    RunResult res;
    res.exit_code = kUsage;
    res.error = e.what();
    res.output = json{{"schema", io::kSchema}, {"error", res.error}, {"exit_code", kUsage}}.dump(2) + "\n";
    return res;
  }
  return run(c, cache);
}

}  // namespace kummerlab::cli
