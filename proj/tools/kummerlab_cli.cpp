// kummerlab: command-line driver over the C interface.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kummerlab/kummerlab.h"

namespace {

using json = nlohmann::ordered_json;

struct Flags {
  unsigned long m = 0, p = 2, q = 0, X = 0, M = 0, X_L = 0, X_prop53 = 0, search_bound = 0;
  unsigned r = 1, n = 2, threads = 0;
  bool sub_base = false;
  std::vector<std::string> alpha;
  std::string K, F, pair, format = "json", out, kind;
  std::vector<double> eps, s;
};

struct Leaf {
  CLI::App* app = nullptr;
  std::string command;
  std::map<std::string, CLI::Option*> opts;
};

Leaf make_leaf(CLI::App* parent, const std::string& name, const std::string& command, const std::string& help,
               Flags& f) {
  Leaf leaf{parent->add_subcommand(name, help), command, {}};
  auto* a = leaf.app;
  auto& o = leaf.opts;
  o["m"] = a->add_option("--m", f.m, "conductor of the base Q(zeta_m)");
  o["alpha"] = a->add_option("--alpha", f.alpha, "Kummer datum as a polynomial in z (repeat for lemma 45)");
  o["p"] = a->add_option("--p", f.p, "prime degree");
  o["r"] = a->add_option("--r", f.r, "chain length");
  o["sub_base"] = a->add_flag("--sub-base", f.sub_base, "chain starts below the base");
  o["K"] = a->add_option("--K", f.K, "field: Q, Q(i), Q(sqrt D) or Q(zeta_m)(x^(1/p))");
  o["F"] = a->add_option("--F", f.F, "second field of a (p,p) lattice");
  o["q"] = a->add_option("--q", f.q, "rational prime");
  o["X"] = a->add_option("--X", f.X, "norm cutoff");
  o["M"] = a->add_option("--M", f.M, "coefficient cutoff");
  o["X_L"] = a->add_option("--X-L", f.X_L, "cutoff over L");
  o["X_prop53"] = a->add_option("--X-prop53", f.X_prop53, "cutoff for the degree certificate");
  o["n"] = a->add_option("--n", f.n, "rank");
  o["eps"] = a->add_option("--eps", f.eps, "epsilon grid, strictly decreasing")->delimiter(',');
  o["s"] = a->add_option("--s", f.s, "s grid, strictly decreasing toward 1")->delimiter(',');
  o["kind"] = a->add_option("--kind", f.kind, "Z or Y");
  o["pair"] = a->add_option("--pair", f.pair, "JSON file with pi and pi2")->check(CLI::ExistingFile);
  o["search_bound"] = a->add_option("--search-bound", f.search_bound, "prime search bound for certificates");
  a->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  a->add_option("--out", f.out, "output path (default stdout)");
  a->add_option("--threads", f.threads, "worker threads (default KUMMERLAB_THREADS, else 1)");
  return leaf;
}

json build_config(const Leaf& leaf, const Flags& f) {
  json c = {{"command", leaf.command}};
  auto set = [&](const char* key) { return leaf.opts.at(key)->count() > 0; };
  if (set("m")) c["m"] = f.m;
  if (set("alpha")) {
    if (f.alpha.size() == 1) c["alpha"] = f.alpha.front();
    else c["alpha"] = f.alpha;
  }
  if (set("p")) c["p"] = f.p;
  if (set("r")) c["r"] = f.r;
  if (f.sub_base) c["sub_base"] = true;
  if (set("K")) c["K"] = f.K;
  if (set("F")) c["F"] = f.F;
  if (set("q")) c["q"] = f.q;
  if (set("X")) c["X"] = f.X;
  if (set("M")) c["M"] = f.M;
  if (set("X_L")) c["X_L"] = f.X_L;
  if (set("X_prop53")) c["X_prop53"] = f.X_prop53;
  if (set("n")) c["n"] = f.n;
  if (set("eps")) c["eps"] = f.eps;
  if (set("s")) c["s"] = f.s;
  if (set("kind")) c["kind"] = f.kind;
  if (set("search_bound")) c["search_bound"] = f.search_bound;
  if (set("pair")) {
    std::ifstream in(f.pair);
    c["pair"] = json::parse(in);
  }
  c["format"] = f.format;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kummerlab: prime splitting in Kummer towers and the determination pipeline"};
  app.require_subcommand(1);
  Flags f;
  std::vector<Leaf> leaves;

  auto* tower = app.add_subcommand("tower", "nested Kummer chains")->require_subcommand(1);
  leaves.push_back(make_leaf(tower, "build", "tower build", "build a chain and list its steps", f));
  leaves.push_back(make_leaf(tower, "verify", "tower verify", "degree and cyclicity certificate", f));
  auto* split = app.add_subcommand("split", "prime splitting")->require_subcommand(1);
  leaves.push_back(make_leaf(split, "trace", "split trace", "residue traces of q through every level", f));
  leaves.push_back(make_leaf(split, "classify", "split classify", "Sigma^j class of the primes of K above q", f));
  leaves.push_back(make_leaf(split, "density", "split density", "degree-1 density up to X", f));
  auto* lemma = app.add_subcommand("lemma", "norm and index certificates")->require_subcommand(1);
  leaves.push_back(make_leaf(lemma, "44", "lemma 44", "unique lifts and norm sequence along a chain", f));
  leaves.push_back(make_leaf(lemma, "45", "lemma 45", "norm bounds in a compositum of disjoint chains", f));
  leaves.push_back(make_leaf(lemma, "58", "lemma 58", "subfield index of primes inert in K", f));
  leaves.push_back(make_leaf(lemma, "7split", "lemma 7split", "primes inert in K split in E", f));
  auto* rs = app.add_subcommand("rs", "Rankin-Selberg series")->require_subcommand(1);
  leaves.push_back(make_leaf(rs, "coeffs", "rs coeffs", "exact coefficients of log Z or log L", f));
  leaves.push_back(make_leaf(rs, "slope", "rs slope", "slope of log Z_X(1+eps)", f));
  leaves.push_back(make_leaf(rs, "positivity", "rs positivity", "exact nonnegativity of Z coefficients", f));
  leaves.push_back(make_leaf(rs, "tail", "rs tail", "degree threshold and tail convergence", f));
  auto* descent = app.add_subcommand("descent", "auxiliary tower and descent")->require_subcommand(1);
  leaves.push_back(make_leaf(descent, "plan", "descent plan", "build L and certify its prime degrees", f));
  leaves.push_back(make_leaf(descent, "run", "descent run", "descent certificates for a pair", f));
  leaves.push_back(make_leaf(&app, "theorem-a", "theorem-a", "end-to-end verdict for a pair", f));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return KL_EINVAL;
  }

  const Leaf* chosen = nullptr;
  for (const auto& l : leaves)
    if (l.app->parsed()) chosen = &l;
  if (!chosen) return KL_EINVAL;

  std::string config;
  try {
    config = build_config(*chosen, f).dump();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return KL_EINVAL;
  }

  kl_session* s = kl_session_new();
  if (!s) return KL_EINTERNAL;
  if (f.threads) kl_set_threads(s, f.threads);
  kl_result* res = nullptr;
  const int code = kl_run(s, config.c_str(), &res);
  if (code != KL_OK && code != KL_NOT_HYPOTHESIS && *kl_last_error(s)) std::cerr << "error: " << kl_last_error(s) << "\n";
  int status = code;
  if (res) {
    if (f.out.empty()) {
      std::cout.write(kl_result_text(res), static_cast<std::streamsize>(kl_result_size(res)));
    } else {
      std::ofstream o(f.out, std::ios::binary);
      o.write(kl_result_text(res), static_cast<std::streamsize>(kl_result_size(res)));
      if (!o) {
        std::cerr << "error: cannot write " << f.out << "\n";
        status = KL_EINVAL;
      }
    }
    kl_result_free(res);
  }
  kl_session_free(s);
  return status;
}
