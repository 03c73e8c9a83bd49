#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "csplab/error.hpp"
#include "csplab/io.hpp"
#include "csplab/sampler.hpp"
#include "support.hpp"

using namespace csplab;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Formula two_clause(Family family, ClauseSemantics s) {
  Formula f;
  f.n = 2;
  f.k = 2;
  f.family = family;
  f.model = Model::kUnplanted;
  f.clauses.push_back(Clause{Edge{{0, 1}}, std::move(s)});
  return f;
}

std::string temp_path(const std::string& name) { return "csplab_test_" + name; }

}  // namespace

TEST_CASE("DIMACS literal mapping") {
  CHECK(export_dimacs(two_clause(Family::kSat, SatForbidden{0b00})) == "p cnf 2 1\n1 2 0\n");
  CHECK(export_dimacs(two_clause(Family::kSat, SatForbidden{0b10})) == "p cnf 2 1\n-1 2 0\n");
  CHECK(export_dimacs(two_clause(Family::kNaeSat, NaeForbidden{0b01})) == "p cnf 2 2\n1 -2 0\n-1 2 0\n");
  const Formula x = two_clause(Family::kXorSat, XorTarget{false});
  CHECK(export_dimacs(x, true) == "p cnf 2 1\nx-1 2 0\n");
  CHECK(export_dimacs(two_clause(Family::kXorSat, XorTarget{true}), true) == "p cnf 2 1\nx1 2 0\n");
  try {
    export_dimacs(x);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnsupportedFamily);
  }
  const auto chi = std::make_shared<const Predicate>(Predicate::parity(2));
  CHECK_THROWS_AS(export_dimacs(two_clause(Family::kGold, GoldTarget{chi, true}), true), Error);
}

TEST_CASE("DIMACS round trip preserves Z") {
  std::mt19937_64 rng(41);
  for (int family = 0; family < 3; ++family) {
    for (Seed seed = 0; seed < 30; ++seed) {
      ModelSpec s = oracle::random_spec(family, 5 + seed % 8, 1.5, rng);
      if (seed % 3 == 0) s.plant_mode = PlantMode::kUnplanted;
      const Formula f = sample(s, seed);
      const Formula g = parse_dimacs(export_dimacs(f, true));
      CHECK(g.n == f.n);
      CHECK(oracle::count(g) == oracle::count(f));
      if (family != 1) CHECK(g.clauses == f.clauses);
    }
  }
}

TEST_CASE("DIMACS reader rejects malformed input") {
  for (const char* text : {"1 2 0\n", "p cnf 2 1\n1 2\n", "p cnf 2 2\n1 2 0\n", "p cnf 2 1\n1 3 0\n",
                           "p cnf 3 2\n1 2 0\n1 2 3 0\n", "p cnf 2 2\n1 2 0\nx1 2 0\n", "p cnf 2 1\n1 1 0\n",
                           "p dnf 2 1\n1 2 0\n"}) {
    try {
      parse_dimacs(text);
      FAIL("accepted: " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kData);
    }
  }
  const Formula f = parse_dimacs("c comment\np cnf 3 1\n  -1 3 2 0\n");
  CHECK(f.clauses.size() == 1);
  CHECK(f.clauses[0].edge.vars == std::vector<Var>{0, 2, 1});
  CHECK(std::get<SatForbidden>(f.clauses[0].semantics).pattern == 0b100);
}

TEST_CASE("JSON serialization") {
  const Formula f = two_clause(Family::kSat, SatForbidden{0b10});
  const auto j = to_json(f);
  CHECK(j["n"] == 2);
  CHECK(j["family"] == "sat");
  CHECK(j["clauses"][0]["pattern"] == 2);
  CHECK(j["planted"].is_null());

  CountResult c = make_count(BigInt(1) << 100, CountMethod::kGf2);
  const auto cj = to_json(c);
  CHECK(cj["z"] == "1267650600228229401496703205376");
  CHECK(cj["log2_z"] == 100.0);
  CHECK(to_json(make_count(BigInt(0), CountMethod::kBrute))["log2_z"].is_null());

  const auto rec = make_record("count", {{"seed", 3}}, {{"x", 1}}, "");
  CHECK(rec["schema_version"] == kSchemaVersion);
  CHECK(rec["timestamp"].is_null());
  CHECK(rec["subcommand"] == "count");
}

TEST_CASE("CLI determinism") {
  const std::vector<std::string> count = {"count", "--family", "sat", "--n", "10", "--k", "3", "--alpha", "1",
                                          "--seed", "7"};
  const CliResult a = cli(count);
  const CliResult b = cli(count);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"subcommand\":\"count\"") != std::string::npos);
  CHECK(a.out.find("\"timestamp\":null") != std::string::npos);
}

TEST_CASE("CLI exit codes") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"count", "--family", "sat"}).code == kExitUsage);
  CHECK(cli({"count", "--family", "sat", "--n", "10", "--alpha", "1", "--bogus", "1"}).code == kExitUsage);
  CHECK(cli({"count", "--family", "sat", "--n", "ten", "--alpha", "1"}).code == kExitUsage);
  CHECK(cli({"count", "--family", "pizza", "--n", "10", "--alpha", "1"}).code == kExitUsage);
  CHECK(cli({"count", "--family", "sat", "--n", "5", "--alpha", "100"}).code == kExitUsage);
  CHECK(cli({"count", "--family", "sat", "--n", "10", "--alpha", "1", "--plant", "0101"}).code == kExitUsage);
  CHECK(cli({"export", "--family", "xorsat", "--n", "10", "--alpha", "1"}).code == kExitUsage);
  CHECK(cli({"export", "--family", "xorsat", "--n", "10", "--alpha", "1", "--xor-dialect"}).code == kExitOk);
  CHECK(cli({"count", "--family", "sat", "--n", "40", "--alpha", "0.1", "--method", "brute"}).code ==
        kExitResourceLimit);
  CHECK(cli({"azuma-check", "--n", "20"}).code == kExitResourceLimit);
  CHECK(cli({"predicate-scan", "--k", "6"}).code == kExitResourceLimit);
  CHECK(cli({"qn-curve", "--family", "sat", "--ns", "10", "--alphas", "1", "--phi", "1.5"}).code == kExitUsage);
  CHECK(cli({"threshold", "--family", "sat", "--n", "10", "--alpha-max", "0.1", "--samples", "20"}).code ==
        kExitData);
  CHECK(cli({"count", "--family", "sat", "--n", "10", "--alpha", "1", "--format", "csv"}).code == kExitUsage);
  CHECK(cli({"count", "--help"}).code == kExitOk);

  const CliResult r = cli({"qn-curve", "--family", "sat", "--ns", "10", "--alphas", "1", "--phi", "1.5"});
  CHECK(r.out.empty());
  CHECK(r.err == "error: invalid-argument: phi must lie in [0, 1]\n");
}

TEST_CASE("CLI config files") {
  const std::string path = temp_path("config.cfg");
  {
    std::ofstream f(path);
    f << "# 3-SAT sample\nfamily=sat\nn=10\nalpha=1.0\nseed=7\n";
  }
  const CliResult from_file = cli({"count", "--config", path});
  const CliResult from_flags = cli({"count", "--family", "sat", "--n", "10", "--alpha", "1", "--seed", "7"});
  CHECK(from_file.code == 0);
  CHECK(from_file.out == from_flags.out);
  const CliResult overridden = cli({"count", "--config", path, "--alpha", "2"});
  CHECK(overridden.out.find("\"alpha\":2.0") != std::string::npos);
  {
    std::ofstream f(path);
    f << "family=sat\nn=10\nalpha=1.0\nwidth=3\n";
  }
  CHECK(cli({"count", "--config", path}).code == kExitUsage);
  std::remove(path.c_str());
}

TEST_CASE("CLI config echo replays every subcommand") {
  const std::vector<std::vector<std::string>> runs = {
      {"sample", "--family", "naesat", "--n", "9", "--alpha", "1.3", "--seed", "4"},
      {"count", "--family", "gold", "--predicate", "0x96", "--n", "10", "--alpha", "1.1", "--seed", "4"},
      {"psi-curve", "--family", "xorsat", "--ns", "10,12", "--alphas", "0.5,0.8", "--samples", "5"},
      {"qn-curve", "--family", "sat", "--ns", "10", "--alphas", "1,2.5", "--samples", "8", "--phi", "0.6"},
      {"threshold", "--family", "sat", "--n", "10", "--alpha-max", "8", "--samples", "20", "--tolerance", "0.1"},
      {"azuma-check", "--n", "8", "--trials", "5", "--predicate", "0xe8", "--seed", "2"},
      {"variance-split", "--family", "sat", "--n", "10", "--alpha", "1", "--graph-samples", "3",
       "--plant-samples", "2", "--scheme", "uniform"},
      {"predicate-scan", "--k", "3", "--pairs", "500", "--hessian-points", "10"},
      {"hypothesis-h", "--predicate", "0x96", "--k", "3", "--pairs", "500", "--hessian-points", "10"},
  };
  const std::string path = temp_path("replay.cfg");
  for (const auto& args : runs) {
    const CliResult first = cli(args);
    REQUIRE_MESSAGE(first.code == 0, first.err);
    std::string line = first.out.substr(0, first.out.find('\n'));
    const auto record = nlohmann::json::parse(line);
    {
      std::ofstream f(path);
      f << config_file_from_echo(record["config"]);
    }
    const CliResult replay = cli({args[0], "--config", path});
    CHECK_MESSAGE(replay.out == first.out, args[0]);
  }
  std::remove(path.c_str());
}

TEST_CASE("CLI output independent of --jobs") {
  const std::vector<std::string> base = {"qn-curve", "--family", "sat", "--ns", "10,12", "--alphas", "1,2,3",
                                         "--samples", "20"};
  auto with_jobs = [&](const char* jobs) {
    auto args = base;
    args.push_back("--jobs");
    args.push_back(jobs);
    return cli(args).out;
  };
  CHECK(with_jobs("1") == with_jobs("4"));
  CHECK(cli({"qn-curve", "--family", "sat", "--ns", "10", "--alphas", "1", "--jobs", "0"}).code == kExitUsage);
}

TEST_CASE("CLI csv and output files") {
  const CliResult csv = cli({"psi-curve", "--family", "sat", "--ns", "8,10", "--alphas", "0,1", "--samples", "5",
                             "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("n,0.0,1.0\n8,1.0,", 0) == 0);
  const std::string path = temp_path("out.dimacs");
  const CliResult r = cli({"export", "--family", "sat", "--n", "6", "--alpha", "1", "--output", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().rfind("p cnf 6 ", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("CLI timestamp flag") {
  const CliResult r = cli({"sample", "--family", "sat", "--n", "5", "--alpha", "1", "--timestamp"});
  const auto record = nlohmann::json::parse(r.out);
  CHECK(record["timestamp"].is_string());
  CHECK(record["timestamp"].get<std::string>().size() == 20);
}
