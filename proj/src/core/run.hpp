#pragma once

// Batch driver: one configuration in, one deterministic report out.

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "serialize.hpp"

namespace kummerlab::cli {

using io::json;

enum ExitCode : int { kOk = 0, kNotHypothesis = 2, kInconclusive = 3, kUsage = 64, kInternal = 70 };

struct RunConfig {
  std::string command;  // "tower build", "split trace", "lemma 44", "rs slope", "theorem-a", ...
  u64 m = 0;            // 0: taken from the datum (1 for rational data)
  u64 p = 2;
  unsigned r = 1;
  bool sub_base = false;
  std::string alpha;
  std::vector<std::string> alphas;  // lemma 45: one datum per chain
  std::string K = "Q";
  std::string F;
  std::optional<u64> q;
  u64 X = 0, M = 0, X_L = 2000, X_prop53 = 2000;
  unsigned n = 2;
  std::vector<double> eps;
  std::vector<double> s_grid;
  std::string kind = "Z";
  json pair;
  std::string format = "json";
  unsigned threads = 0;  // 0: KUMMERLAB_THREADS or the default
  u64 search_bound = 10000;
};

/// Validates and fills defaults. Throws std::invalid_argument.
RunConfig config_from_json(const json& j);
/// Canonical echo of the configuration (thread count omitted).
json to_json(const RunConfig& c);

struct RunResult {
  int exit_code = kOk;
  std::string output;  // JSON document or CSV text
  std::string error;   // set for exit codes 64 and 70
};

/// Reusable (K, n) contexts for repeated theorem-a runs.
class ContextCache {
 public:
  const det::TheoremAContext& get(const split::CyclicExtension& K, unsigned n, u64 X_prop53);

 private:
  std::mutex mu_;
  std::map<std::tuple<std::string, unsigned, u64>, det::TheoremAContext> contexts_;
};

RunResult run(const RunConfig& config, ContextCache* cache = nullptr);
RunResult run_json(const std::string& config_text, ContextCache* cache = nullptr);

/// Subcommands accepted by run().
const std::vector<std::string>& commands();

}  // namespace kummerlab::cli
