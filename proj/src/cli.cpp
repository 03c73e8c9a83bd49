#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csplab/error.hpp"
#include "csplab/io.hpp"
#include "csplab/sampler.hpp"

namespace csplab {

namespace {

using nlohmann::json;

const std::vector<std::string> kSubcommands = {
    "sample",      "count",          "export",         "psi-curve",     "qn-curve",
    "threshold",   "azuma-check",    "variance-split", "predicate-scan", "hypothesis-h"};

struct Args {
  std::string family;
  std::size_t n = 0;
  std::vector<std::size_t> ns;
  int k = 3;
  double alpha = 0.0;
  std::vector<double> alphas;
  std::string predicate;
  std::string plant = "random";
  std::string scheme = "binomial";
  std::string method = "auto";
  int cap = 30;
  Seed seed = 0;
  std::size_t samples = 0;
  double phi = 0.5;
  double tolerance = 0.01;
  double alpha_max = 0.0;
  double lower_level = 0.1;
  double upper_level = 0.9;
  std::size_t trials = 200;
  double edges_per_var = 1.0;
  std::size_t exact_cap = 14;
  std::size_t graph_samples = 100;
  std::size_t plant_samples = 20;
  bool fixed_plant = false;
  int lmax = 3;
  int ell = 0;
  std::size_t pairs = 20000;
  std::size_t hessian_points = 200;
  bool xor_dialect = false;

  // Not echoed: they change where or how output is written, never what.
  std::string output;
  std::string format = "jsonl";
  int jobs = 1;
  bool timestamp = false;
};

std::string first_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_model_options(CLI::App& app, Args& a, bool single_n, bool single_alpha) {
  app.add_option("--family", a.family, "sat | naesat | xorsat | gold")->required();
  if (single_n) {
    app.add_option("--n", a.n, "number of variables")->required();
  } else {
    app.add_option("--ns", a.ns, "comma-separated variable counts")->required()->delimiter(',');
  }
  app.add_option("--k", a.k, "clause arity")->capture_default_str();
  if (single_alpha) {
    app.add_option("--alpha", a.alpha, "clause density")->required();
  }
  app.add_option("--predicate", a.predicate, "hex truth table (gold)");
  app.add_option("--plant", a.plant, "random | none | 0/1 string of length n")->capture_default_str();
  app.add_option("--scheme", a.scheme, "binomial | uniform")->capture_default_str();
}

void add_count_options(CLI::App& app, Args& a) {
  app.add_option("--method", a.method, "auto | brute | components | gf2 | preimage")->capture_default_str();
  app.add_option("--cap", a.cap, "brute-force variable cap")->capture_default_str();
}

void add_budget_options(CLI::App& app, Args& a) {
  app.add_option("--lmax", a.lmax, "largest ell examined")->capture_default_str();
  app.add_option("--pairs", a.pairs, "random segment pairs per ell")->capture_default_str();
  app.add_option("--hessian-points", a.hessian_points, "curvature probes per ell")->capture_default_str();
}

json echo_model(const Args& a, bool single_n, bool single_alpha) {
  json c;
  c["family"] = a.family;
  if (single_n) {
    c["n"] = a.n;
  } else {
    c["ns"] = a.ns;
  }
  c["k"] = a.k;
  if (single_alpha) c["alpha"] = a.alpha;
  if (!a.predicate.empty()) c["predicate"] = a.predicate;
  c["plant"] = a.plant;
  c["scheme"] = a.scheme;
  return c;
}

void echo_count(json& c, const Args& a) {
  c["method"] = a.method;
  c["cap"] = a.cap;
}

void echo_budget(json& c, const Args& a) {
  c["lmax"] = a.lmax;
  c["pairs"] = a.pairs;
  c["hessian-points"] = a.hessian_points;
}

PredicatePtr parse_predicate(const std::string& hex, int k) {
  return std::make_shared<const Predicate>(Predicate::from_hex(k, hex));
}

ModelSpec make_spec(const Args& a, std::size_t n, double alpha) {
  ModelSpec spec;
  spec.family = parse_family(a.family);
  spec.n = n;
  spec.k = a.k;
  spec.alpha = alpha;
  if (spec.family == Family::kGold) {
    if (a.predicate.empty()) throw Error(ErrorKind::kInvalidArgument, "gold needs --predicate");
    spec.predicate = parse_predicate(a.predicate, a.k);
  } else if (!a.predicate.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "--predicate applies to gold only");
  }
  if (a.plant == "random") {
    spec.plant_mode = PlantMode::kRandom;
  } else if (a.plant == "none") {
    spec.plant_mode = PlantMode::kUnplanted;
  } else {
    if (a.plant.size() != n) {
      throw Error(ErrorKind::kDimension, "--plant has " + std::to_string(a.plant.size()) +
                                             " bits, expected " + std::to_string(n));
    }
    spec.plant_mode = PlantMode::kFixed;
    spec.fixed_plant = Assignment::from_string(a.plant);
  }
  if (a.scheme == "binomial") {
    spec.scheme = Scheme::kBinomial;
  } else if (a.scheme == "uniform") {
    spec.scheme = Scheme::kUniform;
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown scheme '" + a.scheme + "'");
  }
  validate_spec(spec);
  return spec;
}

ExperimentOptions make_experiment_options(const Args& a) {
  ExperimentOptions o;
  o.jobs = a.jobs;
  o.count.brute_force_cap = a.cap;
  if (a.method == "auto") {
    o.method = std::nullopt;
  } else if (a.method == "brute") {
    o.method = CountMethod::kBrute;
  } else if (a.method == "components") {
    o.method = CountMethod::kComponents;
  } else if (a.method == "gf2") {
    o.method = CountMethod::kGf2;
  } else if (a.method == "preimage") {
    o.method = CountMethod::kPreimage;
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown counting method '" + a.method + "'");
  }
  if (a.cap < 1 || a.cap > kMaxBruteForceCap) {
    throw Error(ErrorKind::kInvalidArgument, "--cap must lie in [1, " + std::to_string(kMaxBruteForceCap) + "]");
  }
  return o;
}

CountResult run_count(const Formula& f, const ExperimentOptions& o) {
  if (o.method) return count_with(f, *o.method, o.count);
  return count_auto(f, o.count);
}

std::string csv_number(double x) { return json(x).dump(); }

/// Rows are sizes, columns densities.
std::string csv_matrix(const std::vector<std::size_t>& ns, const std::vector<double>& alphas,
                       const std::vector<std::vector<double>>& values) {
  std::string out = "n";
  for (double alpha : alphas) out += "," + csv_number(alpha);
  out += "\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    out += std::to_string(ns[i]);
    for (double v : values[i]) out += "," + csv_number(v);
    out += "\n";
  }
  return out;
}

json rational_json(const Rational& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

class Runner {
 public:
  Runner(std::string subcommand, Args& args) : name_(std::move(subcommand)), a_(args) {}

  void configure(CLI::App& app);
  /// Returns the full text to write.
  std::string run();

 private:
  json config() const;
  std::string record(const json& payload) const {
    return make_record(name_, config(), payload, stamp_).dump() + "\n";
  }

  std::string name_;
  Args& a_;
  std::string stamp_;
};

void Runner::configure(CLI::App& app) {
  const std::string& s = name_;
  if (s == "sample" || s == "count" || s == "export") {
    add_model_options(app, a_, true, true);
    if (s == "count") add_count_options(app, a_);
    if (s == "export") app.add_flag("--xor-dialect", a_.xor_dialect, "write xorsat as x-rows");
  } else if (s == "psi-curve" || s == "qn-curve") {
    add_model_options(app, a_, false, false);
    app.add_option("--alphas", a_.alphas, "comma-separated densities")->required()->delimiter(',');
    add_count_options(app, a_);
    a_.samples = s == "psi-curve" ? 100 : 200;
    app.add_option("--samples", a_.samples, "samples per point")->capture_default_str();
    if (s == "qn-curve") app.add_option("--phi", a_.phi, "exponent in [0, 1]")->capture_default_str();
  } else if (s == "threshold") {
    add_model_options(app, a_, true, false);
    add_count_options(app, a_);
    a_.samples = 200;
    app.add_option("--samples", a_.samples, "coupled samples")->capture_default_str();
    app.add_option("--phi", a_.phi, "exponent in [0, 1]")->capture_default_str();
    app.add_option("--tolerance", a_.tolerance, "bracket width")->capture_default_str();
    app.add_option("--alpha-max", a_.alpha_max, "upper end of the initial bracket")->required();
    app.add_option("--lower-level", a_.lower_level, "window lower level")->capture_default_str();
    app.add_option("--upper-level", a_.upper_level, "window upper level")->capture_default_str();
  } else if (s == "azuma-check") {
    app.add_option("--n", a_.n, "number of variables")->required();
    app.add_option("--k", a_.k, "predicate arity")->capture_default_str();
    app.add_option("--predicate", a_.predicate, "hex truth table (default parity)");
    app.add_option("--trials", a_.trials, "number of trials")->capture_default_str();
    app.add_option("--edges-per-var", a_.edges_per_var, "largest edge count per variable")->capture_default_str();
    app.add_option("--exact-cap", a_.exact_cap, "largest n averaged exactly")->capture_default_str();
  } else if (s == "variance-split") {
    add_model_options(app, a_, true, true);
    add_count_options(app, a_);
    app.add_option("--graph-samples", a_.graph_samples, "hypergraph skeletons")->capture_default_str();
    app.add_option("--plant-samples", a_.plant_samples, "plants per skeleton")->capture_default_str();
    app.add_flag("--fixed-plant", a_.fixed_plant, "reuse one plant per skeleton");
  } else if (s == "predicate-scan") {
    app.add_option("--k", a_.k, "predicate arity")->capture_default_str();
    add_budget_options(app, a_);
  } else if (s == "hypothesis-h") {
    app.add_option("--predicate", a_.predicate, "hex truth table")->required();
    app.add_option("--k", a_.k, "predicate arity")->capture_default_str();
    app.add_option("--ell", a_.ell, "single ell to examine (default 2..lmax)");
    add_budget_options(app, a_);
  }
  app.add_option("--seed", a_.seed, "root seed")->capture_default_str();
  app.add_option("--output", a_.output, "write to this file instead of stdout");
  app.add_option("--format", a_.format, "jsonl | csv")->capture_default_str();
  app.add_option("--jobs", a_.jobs, "worker threads")->envname("CSPLAB_JOBS")->capture_default_str();
  app.add_flag("--timestamp", a_.timestamp, "record the wall-clock time");
}

json Runner::config() const {
  const std::string& s = name_;
  json c;
  if (s == "sample" || s == "count" || s == "export") {
    c = echo_model(a_, true, true);
    if (s == "count") echo_count(c, a_);
    if (s == "export") c["xor-dialect"] = a_.xor_dialect;
  } else if (s == "psi-curve" || s == "qn-curve") {
    c = echo_model(a_, false, false);
    c["alphas"] = a_.alphas;
    echo_count(c, a_);
    c["samples"] = a_.samples;
    if (s == "qn-curve") c["phi"] = a_.phi;
  } else if (s == "threshold") {
    c = echo_model(a_, true, false);
    echo_count(c, a_);
    c["samples"] = a_.samples;
    c["phi"] = a_.phi;
    c["tolerance"] = a_.tolerance;
    c["alpha-max"] = a_.alpha_max;
    c["lower-level"] = a_.lower_level;
    c["upper-level"] = a_.upper_level;
  } else if (s == "azuma-check") {
    c["n"] = a_.n;
    c["k"] = a_.k;
    if (!a_.predicate.empty()) c["predicate"] = a_.predicate;
    c["trials"] = a_.trials;
    c["edges-per-var"] = a_.edges_per_var;
    c["exact-cap"] = a_.exact_cap;
  } else if (s == "variance-split") {
    c = echo_model(a_, true, true);
    echo_count(c, a_);
    c["graph-samples"] = a_.graph_samples;
    c["plant-samples"] = a_.plant_samples;
    c["fixed-plant"] = a_.fixed_plant;
  } else if (s == "predicate-scan") {
    c["k"] = a_.k;
    echo_budget(c, a_);
  } else if (s == "hypothesis-h") {
    c["predicate"] = a_.predicate;
    c["k"] = a_.k;
    if (a_.ell != 0) c["ell"] = a_.ell;
    echo_budget(c, a_);
  }
  c["seed"] = a_.seed;
  return c;
}

std::string Runner::run() {
  if (a_.timestamp) stamp_ = utc_now();
  if (a_.jobs < 1) throw Error(ErrorKind::kInvalidArgument, "--jobs must be at least 1");
  const bool csv = a_.format == "csv";
  if (a_.format != "jsonl" && !csv) throw Error(ErrorKind::kInvalidArgument, "unknown format '" + a_.format + "'");
  if (csv && name_ != "psi-curve" && name_ != "qn-curve") {
    throw Error(ErrorKind::kInvalidArgument, "csv output is available for psi-curve and qn-curve only");
  }
  const std::string& s = name_;

  if (s == "sample") {
    return record(to_json(sample(make_spec(a_, a_.n, a_.alpha), a_.seed)));
  }
  if (s == "count") {
    const ExperimentOptions o = make_experiment_options(a_);
    const Formula f = sample(make_spec(a_, a_.n, a_.alpha), a_.seed);
    json payload = to_json(run_count(f, o));
    payload["n"] = f.n;
    payload["m"] = f.clauses.size();
    return record(payload);
  }
  if (s == "export") {
    return export_dimacs(sample(make_spec(a_, a_.n, a_.alpha), a_.seed), a_.xor_dialect);
  }
  if (s == "psi-curve" || s == "qn-curve") {
    const ExperimentOptions o = make_experiment_options(a_);
    if (a_.alphas.empty()) throw Error(ErrorKind::kInvalidArgument, "--alphas is empty");
    if (s == "qn-curve" && !(a_.phi >= 0.0 && a_.phi <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "phi must lie in [0, 1]");
    }
    std::string out;
    std::vector<std::vector<double>> matrix;
    for (std::size_t n : a_.ns) {
      std::vector<double> row;
      if (s == "psi-curve") {
        for (double alpha : a_.alphas) {
          const EstimateResult e = estimate_psi(make_spec(a_, n, alpha), a_.samples, a_.seed, o);
          row.push_back(e.estimate);
          json payload = to_json(e);
          payload["n"] = n;
          payload["alpha"] = alpha;
          out += record(payload);
        }
      } else {
        const std::vector<QnEstimate> curve =
            qn_curve(make_spec(a_, n, a_.alphas.front()), a_.alphas, a_.phi, a_.samples, a_.seed, o);
        for (const QnEstimate& q : curve) {
          row.push_back(q.proportion);
          out += record(to_json(q));
        }
      }
      matrix.push_back(std::move(row));
    }
    return csv ? csv_matrix(a_.ns, a_.alphas, matrix) : out;
  }
  if (s == "threshold") {
    const ExperimentOptions o = make_experiment_options(a_);
    const ModelSpec spec = make_spec(a_, a_.n, a_.alpha_max);
    const ThresholdEstimate t =
        locate_threshold(spec, a_.phi, a_.tolerance, a_.samples, a_.seed, a_.alpha_max, o);
    const TransitionWindow w =
        transition_window(spec, a_.phi, a_.samples, a_.seed, a_.alpha_max, a_.lower_level, a_.upper_level, o);
    return record({{"threshold", to_json(t)}, {"window", to_json(w)}});
  }
  if (s == "azuma-check") {
    const PredicatePtr chi = a_.predicate.empty() ? std::make_shared<const Predicate>(Predicate::parity(a_.k))
                                                  : parse_predicate(a_.predicate, a_.k);
    AzumaOptions o;
    o.edges_per_var = a_.edges_per_var;
    o.exact_cap = a_.exact_cap;
    o.jobs = a_.jobs;
    json payload = to_json(azuma_increment_check(a_.n, a_.k, chi, a_.trials, a_.seed, o));
    payload["predicate"] = chi->to_hex();
    return record(payload);
  }
  if (s == "variance-split") {
    const ExperimentOptions o = make_experiment_options(a_);
    return record(to_json(variance_split(make_spec(a_, a_.n, a_.alpha), a_.graph_samples, a_.plant_samples,
                                         a_.seed, o, !a_.fixed_plant)));
  }
  const SearchBudget budget{a_.pairs, a_.hessian_points};
  if (s == "predicate-scan") {
    return record(to_json(scan_predicates(a_.k, a_.lmax, budget, a_.seed, a_.jobs)));
  }
  // hypothesis-h
  const Predicate chi = Predicate::from_hex(a_.k, a_.predicate);
  json one_bit = json::array();
  json two_bit = json::array();
  for (int i = 0; i < a_.k; ++i) {
    const int pos[] = {i};
    one_bit.push_back(rational_json(correlation(chi, pos)));
    for (int j = i + 1; j < a_.k; ++j) {
      const int pair[] = {i, j};
      two_bit.push_back(rational_json(correlation(chi, pair)));
    }
  }
  if (a_.ell < 0 || (a_.ell == 0 && a_.lmax < 1)) throw Error(ErrorKind::kInvalidArgument, "ell must be positive");
  const int first = a_.ell != 0 ? a_.ell : std::min(2, a_.lmax);
  const int last = a_.ell != 0 ? a_.ell : a_.lmax;
  json results = json::array();
  for (int ell = first; ell <= last; ++ell) {
    const std::optional<ConvexityWitness> w = falsify_convexity(chi, ell, budget, a_.seed);
    json entry{{"ell", ell}, {"status", std::string(to_string(w ? HStatus::kViolated : HStatus::kUnresolved))}};
    if (w) entry["witness"] = to_json(*w);
    results.push_back(std::move(entry));
  }
  return record({{"predicate", chi.to_hex()},
                 {"k", a_.k},
                 {"balanced", is_balanced(chi)},
                 {"antisymmetric", is_antisymmetric(chi)},
                 {"one_bit_correlations", one_bit},
                 {"two_bit_correlations", two_bit},
                 {"results", results}});
}

std::string usage() {
  std::string text = "usage: csplab <subcommand> [options]\nsubcommands:";
  for (const std::string& s : kSubcommands) text += " " + s;
  return text + "\n";
}

}  // namespace

std::string config_file_from_echo(const nlohmann::json& config) {
  std::string out;
  for (const auto& [key, value] : config.items()) {
    out += key + "=";
    if (value.is_string()) {
      out += value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i > 0) out += ",";
        out += value[i].dump();
      }
    } else {
      out += value.dump();
    }
    out += "\n";
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args[0] == "-h" || args[0] == "--help") {
    (args.empty() ? err : out) << usage();
    return args.empty() ? kExitUsage : kExitOk;
  }
  const std::string subcommand = args[0];
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end()) {
    err << "error: usage: unknown subcommand '" << subcommand << "'\n";
    return kExitUsage;
  }
  Args a;
  Runner runner(subcommand, a);
  CLI::App app("csplab " + subcommand, "csplab " + subcommand);
  app.set_config("--config", "", "flat key=value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  runner.configure(app);
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return kExitOk;
    }
    err << "error: usage: " << first_line(e.what()) << "\n";
    return kExitUsage;
  }
  try {
    const std::string text = runner.run();
    if (a.output.empty()) {
      out << text;
      out.flush();
    } else {
      std::ofstream file(a.output, std::ios::binary);
      file << text;
      if (!file) throw Error(ErrorKind::kData, "cannot write '" + a.output + "'");
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << first_line(e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: internal: " << first_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace csplab
