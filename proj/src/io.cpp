#include "csplab/io.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "csplab/error.hpp"

namespace csplab {

namespace {

void append_row(std::string& out, const char* prefix, const Edge& edge, std::uint32_t negated, int k) {
  out += prefix;
  for (int i = 0; i < k; ++i) {
    if (i > 0) out += ' ';
    if (pattern_bit(negated, k, i)) out += '-';
    out += std::to_string(edge[i] + 1);
  }
  out += " 0\n";
}

nlohmann::json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

std::string export_dimacs(const Formula& f, bool xor_dialect) {
  validate_formula(f);
  if (f.family == Family::kGold) {
    throw Error(ErrorKind::kUnsupportedFamily, "gold formulas have no DIMACS encoding");
  }
  if (f.family == Family::kXorSat && !xor_dialect) {
    throw Error(ErrorKind::kUnsupportedFamily, "xorsat export needs the xor dialect flag");
  }
  const std::size_t rows = f.family == Family::kNaeSat ? 2 * f.clauses.size() : f.clauses.size();
  std::string out = "p cnf " + std::to_string(f.n) + " " + std::to_string(rows) + "\n";
  const int k = f.k;
  for (const Clause& c : f.clauses) {
    if (const auto* s = std::get_if<SatForbidden>(&c.semantics)) {
      append_row(out, "", c.edge, s->pattern, k);
    } else if (const auto* s = std::get_if<NaeForbidden>(&c.semantics)) {
      append_row(out, "", c.edge, s->pattern, k);
      append_row(out, "", c.edge, ~s->pattern & full_mask(k), k);
    } else if (const auto* s = std::get_if<XorTarget>(&c.semantics)) {
      // Literals XOR to true; negating the first literal encodes target 0.
      const std::uint32_t negated = s->bit ? 0U : (1U << (k - 1));
      append_row(out, "x", c.edge, negated, k);
    }
  }
  return out;
}

Formula parse_dimacs(std::string_view text) {
  Formula f;
  bool header = false;
  bool saw_cnf = false;
  bool saw_xor = false;
  std::size_t declared_rows = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::kData, "dimacs line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == 'c' || line[start] == '%') continue;
    if (line[start] == 'p') {
      std::istringstream hs(line.substr(start + 1));
      std::string kind;
      long long n = -1;
      long long m = -1;
      if (!(hs >> kind >> n >> m) || kind != "cnf" || n < 0 || m < 0) fail("bad problem line");
      f.n = static_cast<std::size_t>(n);
      declared_rows = static_cast<std::size_t>(m);
      header = true;
      continue;
    }
    if (!header) fail("clause before the problem line");
    bool is_xor = false;
    if (line[start] == 'x') {
      is_xor = true;
      ++start;
    }
    std::istringstream ls(line.substr(start));
    std::vector<long long> literals;
    long long lit = 0;
    bool terminated = false;
    while (ls >> lit) {
      if (lit == 0) {
        terminated = true;
        break;
      }
      literals.push_back(lit);
    }
    if (!terminated) fail("row not terminated by 0");
    if (literals.empty()) fail("empty row");
    const int k = static_cast<int>(literals.size());
    if (f.k == 0) f.k = k;
    if (k != f.k) fail("rows of different arity");
    Edge edge;
    std::uint32_t negated = 0;
    for (int i = 0; i < k; ++i) {
      const long long v = literals[static_cast<std::size_t>(i)];
      const long long index = v < 0 ? -v : v;
      if (index > static_cast<long long>(f.n)) fail("variable index above n");
      edge.vars.push_back(static_cast<Var>(index - 1));
      if (v < 0) negated |= 1U << (k - 1 - i);
    }
    if (is_xor) {
      saw_xor = true;
      const bool bit = (std::popcount(negated) & 1) == 0;
      f.clauses.push_back(Clause{std::move(edge), XorTarget{bit}});
    } else {
      saw_cnf = true;
      f.clauses.push_back(Clause{std::move(edge), SatForbidden{negated}});
    }
  }
  if (!header) throw Error(ErrorKind::kData, "dimacs text has no problem line");
  if (saw_cnf && saw_xor) throw Error(ErrorKind::kData, "mixed CNF and XOR rows");
  if (declared_rows != f.clauses.size()) {
    throw Error(ErrorKind::kData, "header declares " + std::to_string(declared_rows) + " rows, found " +
                                      std::to_string(f.clauses.size()));
  }
  f.family = saw_xor ? Family::kXorSat : Family::kSat;
  f.model = Model::kUnplanted;
  try {
    validate_formula(f);
  } catch (const Error& e) {
    throw Error(ErrorKind::kData, std::string("dimacs: ") + e.what());
  }
  return f;
}

nlohmann::json to_json(const Formula& f) {
  nlohmann::json clauses = nlohmann::json::array();
  std::string predicate;
  for (const Clause& c : f.clauses) {
    nlohmann::json entry;
    entry["edge"] = c.edge.vars;
    if (const auto* s = std::get_if<SatForbidden>(&c.semantics)) {
      entry["pattern"] = s->pattern;
    } else if (const auto* s = std::get_if<NaeForbidden>(&c.semantics)) {
      entry["pattern"] = s->pattern;
    } else if (const auto* s = std::get_if<XorTarget>(&c.semantics)) {
      entry["target"] = s->bit ? 1 : 0;
    } else if (const auto* s = std::get_if<GoldTarget>(&c.semantics)) {
      entry["target"] = s->bit ? 1 : 0;
      predicate = s->predicate->to_hex();
    }
    clauses.push_back(std::move(entry));
  }
  nlohmann::json j;
  j["n"] = f.n;
  j["k"] = f.k;
  j["family"] = std::string(to_string(f.family));
  j["model"] = std::string(to_string(f.model));
  j["planted"] = f.planted ? nlohmann::json(f.planted->to_string()) : nlohmann::json(nullptr);
  j["clauses"] = std::move(clauses);
  if (!predicate.empty()) j["predicate"] = predicate;
  return j;
}

nlohmann::json to_json(const CountResult& c) {
  return {{"z", c.z.str()}, {"log2_z", number_or_null(c.log2_z)}, {"method", std::string(to_string(c.method))}};
}

nlohmann::json to_json(const EstimateResult& e) {
  return {{"estimate", e.estimate}, {"std_error", e.std_error}, {"variance", e.variance},
          {"samples", e.samples},   {"seed", e.seed}};
}

nlohmann::json to_json(const QnEstimate& q) {
  return {{"proportion", q.proportion}, {"ci_lower", q.lower}, {"ci_upper", q.upper}, {"hits", q.hits},
          {"alpha", q.alpha},           {"phi", q.phi},        {"n", q.n},           {"samples", q.samples}};
}

nlohmann::json to_json(const ThresholdEstimate& t) {
  return {{"alpha_hat", t.alpha_hat}, {"alpha_lo", t.alpha_lo},   {"alpha_hi", t.alpha_hi},
          {"q_lo", t.q_lo},           {"q_hi", t.q_hi},           {"tolerance", t.tolerance},
          {"phi", t.phi},             {"n", t.n},                 {"samples", t.samples},
          {"iterations", t.iterations}};
}

nlohmann::json to_json(const TransitionWindow& w) {
  nlohmann::json crossings = nlohmann::json::array();
  for (double c : w.crossings) crossings.push_back(number_or_null(c));
  return {{"lower_level", w.lower_level}, {"upper_level", w.upper_level}, {"alpha_lower", w.alpha_lower},
          {"alpha_upper", w.alpha_upper}, {"width", w.width},             {"crossings", crossings}};
}

nlohmann::json to_json(const AzumaReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const AzumaTrial& t : r.trials) {
    trials.push_back({{"edges", t.edges}, {"before", t.before}, {"after", t.after}, {"increment", t.increment}});
  }
  return {{"trials", trials},
          {"min_increment", r.min_increment},
          {"max_increment", r.max_increment},
          {"violations", r.violations}};
}

nlohmann::json to_json(const VarianceSplit& v) {
  return {{"total", v.total},
          {"between", v.between},
          {"within", v.within},
          {"graph_samples", v.graph_samples},
          {"plant_samples", v.plant_samples}};
}

nlohmann::json to_json(const ConvexityWitness& w) {
  return {{"ell", w.ell},
          {"nu_a", std::vector<double>(w.nu_a.weights().begin(), w.nu_a.weights().end())},
          {"nu_b", std::vector<double>(w.nu_b.weights().begin(), w.nu_b.weights().end())},
          {"lambda", w.lambda},
          {"lhs", w.lhs},
          {"rhs", w.rhs},
          {"margin", w.margin}};
}

nlohmann::json to_json(const ScanReport& r) {
  nlohmann::json survivors = nlohmann::json::array();
  for (const SurvivorResult& s : r.survivors) {
    nlohmann::json entry{{"predicate", s.predicate.to_hex()}, {"status", std::string(to_string(s.status))}};
    if (s.witness) {
      entry["ell"] = s.witness->ell;
      entry["witness"] = to_json(*s.witness);
    }
    survivors.push_back(std::move(entry));
  }
  return {{"k", r.k},
          {"lmax", r.max_ell},
          {"seed", r.seed},
          {"budget", {{"random_pairs", r.budget.random_pairs}, {"hessian_points", r.budget.hessian_points}}},
          {"candidates", r.candidates},
          {"balanced", r.balanced},
          {"no_one_bit_correlation", r.no_one_bit_correlation},
          {"no_two_bit_correlation", r.no_two_bit_correlation},
          {"unresolved", r.unresolved()},
          {"survivors", survivors}};
}

nlohmann::json make_record(std::string_view subcommand, const nlohmann::json& config,
                           const nlohmann::json& payload, const std::string& timestamp) {
  return {{"schema_version", kSchemaVersion},
          {"timestamp", timestamp.empty() ? nlohmann::json(nullptr) : nlohmann::json(timestamp)},
          {"subcommand", std::string(subcommand)},
          {"config", config},
          {"payload", payload}};
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kResourceLimit: return kExitResourceLimit;
    case ErrorKind::kNoCrossing:
    case ErrorKind::kData: return kExitData;
    default: return kExitUsage;
  }
}

}  // namespace csplab
