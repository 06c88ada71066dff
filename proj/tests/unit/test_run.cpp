#include <doctest.h>

#include "run.hpp"

using namespace kummerlab;
using cli::json;

namespace {

cli::RunResult run_text(const json& j) { return cli::run_json(j.dump()); }

json report_of(const cli::RunResult& r) { return json::parse(r.output).at("report"); }

}  // namespace

TEST_CASE("integers keep exactness") {
  CHECK(io::integer(mpz_class(6561)) == json(6561));
  CHECK(io::integer(mpz_class(-7)) == json(-7));
  const mpz_class big = pow_mpz(3, 64);
  CHECK(io::integer(big) == json(big.get_str()));
  const mpz_class edge = pow_mpz(2, 64) - 1;
  CHECK(io::integer(edge).get<u64>() == 18446744073709551615ull);
}

TEST_CASE("representations read from JSON") {
  const auto Q = aut::FieldModel::rationals();
  const json j = {{"components",
                   {{{"character", {{"modulus", 5}, {"generators", {1}}}}, {"mult", 2}},
                    {{"character", {{"kronecker", -4}}}}}},
                  {"t", "0"}};
  const auto pi = io::rep_from_json(j, Q);
  CHECK(pi.n() == 3);
  CHECK(pi.unitary());
  // the serialized form reads back to the same representation
  const json back = io::to_json(pi);
  json comps = json::array();
  for (const auto& c : back.at("components"))
    comps.push_back({{"character", {{"modulus", c["character"]["modulus"]}, {"generators", c["character"]["generators"]}}},
                     {"mult", c["mult"]}});
  CHECK(aut::same_rep(io::rep_from_json(comps, Q), pi));
  CHECK_THROWS_AS(io::rep_from_json(json::array(), Q), std::invalid_argument);
  CHECK_THROWS_AS(io::character_from_json(json{{"foo", 1}}), std::invalid_argument);
  const auto tw = io::rep_from_json(json{{"components", {{{"character", {{"trivial", true}}}}}}, {"t", "1/2"}}, Q);
  CHECK(tw.t() == mpq_class(1, 2));
}

TEST_CASE("run: documented examples") {
  SUBCASE("norm sequence over 3") {
    const auto r = run_text({{"command", "lemma 44"}, {"m", 4}, {"alpha", "1+z"}, {"p", 2}, {"r", 2}, {"q", 3}});
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.output);
    CHECK(doc.at("schema") == 1);
    CHECK(doc.at("report").at("norms") == json({9, 81, 6561}));
  }
  SUBCASE("tail threshold") {
    const auto r = run_text({{"command", "rs tail"}, {"n", 2}});
    REQUIRE(r.exit_code == 0);
    CHECK(report_of(r).at("d0") == 3);
  }
  SUBCASE("classification over Q(i)") {
    const auto r = run_text({{"command", "split classify"}, {"K", "Q(i)"}, {"q", 5}});
    const auto primes = report_of(r).at("primes");
    REQUIRE(primes.size() == 2);
    for (const auto& p : primes) CHECK(p.at("class") == "DEGREE1");
  }
  SUBCASE("density at 100") {
    const auto r = run_text({{"command", "split density"}, {"K", "Q(i)"}, {"X", 100}});
    const auto rep = report_of(r);
    CHECK(rep.at("degree1") == 22);
    CHECK(rep.at("degreep") == 2);
  }
}

TEST_CASE("run: exit codes") {
  auto code = [](const json& j) { return run_text(j).exit_code; };
  CHECK(code({{"command", "frobnicate"}}) == cli::kUsage);
  CHECK(code({{"command", "split density"}, {"K", "Q(i)"}, {"X", 0}}) == cli::kUsage);
  CHECK(code({{"command", "split density"}, {"K", "Q(i)"}, {"X", 1}}) == cli::kUsage);
  CHECK(code({{"command", "split classify"}, {"K", "Q(i)"}, {"q", 9}}) == cli::kUsage);
  CHECK(code({{"command", "rs slope"}, {"X", 1000}, {"eps", {0.01, 0.1}}}) == cli::kUsage);
  CHECK(code({{"command", "split classify"}, {"K", "Q(i)"}, {"q", 5}, {"format", "csv"}}) == cli::kUsage);
  CHECK(code({{"command", "tower build"}, {"m", 4}, {"alpha", "1+z"}, {"p", 3}, {"r", 2}}) == cli::kUsage);
  CHECK(code({{"command", "lemma 44"}, {"m", 4}, {"alpha", "1+z"}, {"p", 2}, {"r", 2}, {"q", 7}}) == cli::kUsage);
  CHECK(code({{"command", "lemma 58"}, {"K", "Q(sqrt 3)"}, {"F", "Q(i)"}, {"X", 200}}) == cli::kOk);
  CHECK(cli::run_json("{").exit_code == cli::kUsage);
}

TEST_CASE("run: every command answers") {
  const json pair = {{"pi", {{{"character", {{"trivial", true}}}}}}, {"pi2", {{{"character", {{"kronecker", -4}}}}}}};
  const json pair2 = {{"pi", {{{"character", {{"trivial", true}}}}, {{"character", {{"modulus", 5}, {"generators", {1}}}}}}},
                      {"pi2", {{{"character", {{"kronecker", 12}}}}, {{"character", {{"modulus", 5}, {"generators", {1}}}}}}}};
  const std::vector<json> configs = {
      {{"command", "tower build"}, {"m", 4}, {"alpha", "1+z"}, {"p", 2}, {"r", 2}},
      {{"command", "tower verify"}, {"m", 4}, {"alpha", "1+z"}, {"p", 2}, {"r", 2}},
      {{"command", "split trace"}, {"m", 4}, {"alpha", "1+z"}, {"p", 2}, {"r", 2}, {"q", 13}},
      {{"command", "split classify"}, {"K", "Q(sqrt 3)"}, {"q", 7}},
      {{"command", "split density"}, {"K", "Q(i)"}, {"X", 1000}},
      {{"command", "lemma 44"}, {"m", 4}, {"alpha", "1+z"}, {"p", 2}, {"r", 2}, {"X", 200}},
      {{"command", "lemma 45"}, {"m", 4}, {"alpha", {"1+z", "3"}}, {"p", 2}, {"r", 1}, {"X", 100}},
      {{"command", "lemma 58"}, {"K", "Q(sqrt 3)"}, {"F", "Q(i)"}, {"q", 5}},
      {{"command", "lemma 7split"}, {"K", "Q(sqrt 3)"}, {"F", "Q(i)"}, {"X", 300}},
      {{"command", "rs coeffs"}, {"pair", pair}, {"M", 50}},
      {{"command", "rs slope"}, {"pair", pair}, {"X", 2000}},
      {{"command", "rs positivity"}, {"pair", pair}, {"M", 200}},
      {{"command", "rs tail"}, {"n", 1}, {"K", "Q(i)"}, {"pair", pair}, {"X", 2000}},
      {{"command", "descent plan"}, {"K", "Q(sqrt 3)"}, {"n", 2}, {"X_prop53", 200}},
      {{"command", "descent run"}, {"K", "Q(i)"}, {"pair", pair}, {"X", 2000}},
      {{"command", "theorem-a"}, {"K", "Q(sqrt 3)"}, {"pair", pair2}, {"X", 3000}, {"X_L", 300}, {"X_prop53", 300}},
  };
  std::set<std::string> seen;
  for (const auto& c : configs) {
    CAPTURE(c.dump());
    const auto r = run_text(c);
    CHECK(r.error == "");
    CHECK((r.exit_code == 0 || r.exit_code == 2 || r.exit_code == 3));
    seen.insert(c.at("command").get<std::string>());
  }
  CHECK(seen.size() == cli::commands().size());
  const auto ta = report_of(run_text(configs.back()));
  CHECK(ta.at("verdict") == "EQUAL");
}

TEST_CASE("run: reports are byte-identical across runs and thread counts") {
  const json cfg = {{"command", "lemma 58"}, {"K", "Q(sqrt 3)"}, {"F", "Q(i)"}, {"X", 2000}};
  json one = cfg, three = cfg;
  one["threads"] = 1;
  three["threads"] = 3;
  const auto a = run_text(one), b = run_text(three), c = run_text(one);
  CHECK(a.output == b.output);
  CHECK(a.output == c.output);
  const json slope = {{"command", "rs slope"},
                      {"pair", {{"pi", {{{"character", {{"trivial", true}}}}}}, {"pi2", {{{"character", {{"kronecker", -4}}}}}}}},
                      {"X", 20000},
                      {"format", "csv"}};
  json s3 = slope;
  s3["threads"] = 3;
  CHECK(run_text(slope).output == run_text(s3).output);
  set_worker_threads(1);
}
