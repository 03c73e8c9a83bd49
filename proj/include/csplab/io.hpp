#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "csplab/counting.hpp"
#include "csplab/error.hpp"
#include "csplab/experiments.hpp"
#include "csplab/formula.hpp"
#include "csplab/predicate_analysis.hpp"

namespace csplab {

inline constexpr int kSchemaVersion = 1;

/// DIMACS CNF text. A SAT clause forbidding pattern x becomes one CNF clause
/// whose literal i is +v if x_i = 0 and -v otherwise; a NAE clause becomes
/// two. With `xor_dialect`, XOR clauses are written as "x" rows whose
/// literals XOR to true.
std::string export_dimacs(const Formula& f, bool xor_dialect = false);

/// Reads back what export_dimacs writes: CNF rows become SAT clauses and "x"
/// rows XOR clauses. All rows must share one arity and one kind.
Formula parse_dimacs(std::string_view text);

nlohmann::json to_json(const Formula& f);
nlohmann::json to_json(const CountResult& c);
nlohmann::json to_json(const EstimateResult& e);
nlohmann::json to_json(const QnEstimate& q);
nlohmann::json to_json(const ThresholdEstimate& t);
nlohmann::json to_json(const TransitionWindow& w);
nlohmann::json to_json(const AzumaReport& r);
nlohmann::json to_json(const VarianceSplit& v);
nlohmann::json to_json(const ConvexityWitness& w);
nlohmann::json to_json(const ScanReport& r);

/// Self-describing output record; `config` echoes every resolved option.
nlohmann::json make_record(std::string_view subcommand, const nlohmann::json& config,
                           const nlohmann::json& payload, const std::string& timestamp);

/// Flat key=value text that replays an echoed config through --config.
std::string config_file_from_echo(const nlohmann::json& config);

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitResourceLimit = 3,
  kExitData = 4,
};

int exit_code_for(ErrorKind kind);

/// Entry point of the csplab tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csplab
