#include "csplab/counting.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "csplab/error.hpp"

namespace csplab {

std::string_view to_string(CountMethod method) {
  switch (method) {
    case CountMethod::kBrute: return "brute";
    case CountMethod::kComponents: return "components";
    case CountMethod::kGf2: return "gf2";
    case CountMethod::kPreimage: return "preimage";
  }
  return "?";
}

double log2_of(const BigInt& z) {
  if (z.is_zero()) return -std::numeric_limits<double>::infinity();
  const std::size_t top = boost::multiprecision::msb(z);
  if (top < 62) return std::log2(static_cast<double>(z.convert_to<std::uint64_t>()));
  const std::size_t shift = top - 61;
  const BigInt head = z >> shift;
  return std::log2(static_cast<double>(head.convert_to<std::uint64_t>())) + static_cast<double>(shift);
}

CountResult make_count(BigInt z, CountMethod method) {
  CountResult r;
  r.log2_z = log2_of(z);
  r.z = std::move(z);
  r.method = method;
  return r;
}

namespace {

constexpr int kLanes = 6;
constexpr std::uint64_t kAll = ~std::uint64_t{0};

constexpr std::array<std::uint64_t, kLanes> kLaneMasks = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};

/// Clause lowered to a form evaluable on 64 assignments at once.
struct CompiledClause {
  enum class Kind { kForbidden, kParity };
  Kind kind = Kind::kForbidden;
  std::vector<Var> vars;
  std::vector<std::uint32_t> forbidden;  // violating inputs, MSB-first
  bool parity_target = false;
};

CompiledClause compile(const Clause& clause) {
  CompiledClause out;
  out.vars = clause.edge.vars;
  const int k = clause.edge.size();
  if (const auto* x = std::get_if<XorTarget>(&clause.semantics)) {
    out.kind = CompiledClause::Kind::kParity;
    out.parity_target = x->bit;
    return out;
  }
  if (const auto* s = std::get_if<SatForbidden>(&clause.semantics)) {
    out.forbidden = {s->pattern};
    return out;
  }
  if (const auto* s = std::get_if<NaeForbidden>(&clause.semantics)) {
    out.forbidden = {s->pattern, ~s->pattern & full_mask(k)};
    return out;
  }
  const auto table = satisfying_table(clause.semantics, k);
  for (std::uint32_t y = 0; y < table.size(); ++y) {
    if (!table[y]) out.forbidden.push_back(y);
  }
  return out;
}

std::uint64_t violated_lanes(const CompiledClause& c, const std::vector<std::uint64_t>& lanes) {
  const int k = static_cast<int>(c.vars.size());
  if (c.kind == CompiledClause::Kind::kParity) {
    std::uint64_t parity = 0;
    for (Var v : c.vars) parity ^= lanes[v];
    const std::uint64_t satisfied = c.parity_target ? parity : ~parity;
    return ~satisfied;
  }
  std::uint64_t violated = 0;
  for (std::uint32_t pattern : c.forbidden) {
    std::uint64_t match = kAll;
    for (int i = 0; i < k && match; ++i) {
      const std::uint64_t lane = lanes[c.vars[static_cast<std::size_t>(i)]];
      match &= pattern_bit(pattern, k, i) ? lane : ~lane;
    }
    violated |= match;
  }
  return violated;
}

void check_cap(std::size_t n, const CountOptions& options, const std::string& what) {
  if (options.brute_force_cap < 0 || options.brute_force_cap > kMaxBruteForceCap) {
    throw Error(ErrorKind::kInvalidArgument,
                "brute-force cap must be in [0, " + std::to_string(kMaxBruteForceCap) + "]");
  }
  if (n > static_cast<std::size_t>(options.brute_force_cap)) {
    throw Error(ErrorKind::kResourceLimit, what + " has " + std::to_string(n) +
                                               " variables, over the brute-force cap of " +
                                               std::to_string(options.brute_force_cap));
  }
}

std::uint64_t brute_force(const Formula& f) {
  const std::size_t n = f.n;
  const std::size_t lane_vars = std::min<std::size_t>(n, kLanes);
  const std::size_t high = n - lane_vars;
  const std::uint64_t valid =
      lane_vars == kLanes ? kAll : ((std::uint64_t{1} << (std::size_t{1} << lane_vars)) - 1);

  std::vector<std::uint64_t> lanes(n, 0);
  for (std::size_t v = 0; v < lane_vars; ++v) lanes[v] = kLaneMasks[v];

  std::vector<CompiledClause> compiled;
  compiled.reserve(f.clauses.size());
  std::vector<std::vector<std::size_t>> occurrences(n);
  for (const Clause& c : f.clauses) {
    for (Var v : c.edge.vars) occurrences[v].push_back(compiled.size());
    compiled.push_back(compile(c));
  }
  std::vector<std::uint64_t> violated(compiled.size());
  for (std::size_t i = 0; i < compiled.size(); ++i) violated[i] = violated_lanes(compiled[i], lanes);

  std::uint64_t total = 0;
  const std::uint64_t blocks = std::uint64_t{1} << high;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    if (b != 0) {
      const Var flipped = static_cast<Var>(lane_vars + static_cast<std::size_t>(std::countr_zero(b)));
      lanes[flipped] = ~lanes[flipped];
      for (std::size_t c : occurrences[flipped]) violated[c] = violated_lanes(compiled[c], lanes);
    }
    std::uint64_t any = 0;
    for (std::uint64_t v : violated) any |= v;
    total += static_cast<std::uint64_t>(std::popcount(~any & valid));
  }
  return total;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

CountResult count_exact(const Formula& f, const CountOptions& options) {
  validate_formula(f);
  check_cap(f.n, options, "formula");
  return make_count(BigInt(brute_force(f)), CountMethod::kBrute);
}

ComponentSplit split_components(const Formula& f) {
  validate_formula(f);
  DisjointSets sets(f.n);
  std::vector<std::uint8_t> touched(f.n, 0);
  for (const Clause& c : f.clauses) {
    for (Var v : c.edge.vars) {
      touched[v] = 1;
      sets.unite(c.edge.vars.front(), v);
    }
  }
  ComponentSplit split;
  std::vector<std::size_t> component_of_root(f.n, SIZE_MAX);
  std::vector<Var> local_index(f.n, 0);
  for (std::size_t v = 0; v < f.n; ++v) {
    if (!touched[v]) {
      ++split.isolated;
      continue;
    }
    const std::size_t root = sets.find(v);
    if (component_of_root[root] == SIZE_MAX) {
      component_of_root[root] = split.components.size();
      split.components.emplace_back();
    }
    auto& vars = split.components[component_of_root[root]];
    local_index[v] = static_cast<Var>(vars.size());
    vars.push_back(static_cast<Var>(v));
  }
  split.formulas.resize(split.components.size());
  for (std::size_t i = 0; i < split.components.size(); ++i) {
    Formula& sub = split.formulas[i];
    sub.n = split.components[i].size();
    sub.k = f.k;
    sub.family = f.family;
    sub.model = f.model;
    if (f.planted) {
      Assignment local(sub.n);
      for (std::size_t j = 0; j < sub.n; ++j) local.set(j, (*f.planted)[split.components[i][j]]);
      sub.planted = std::move(local);
    }
  }
  for (const Clause& c : f.clauses) {
    const std::size_t comp = component_of_root[sets.find(c.edge.vars.front())];
    Clause local = c;
    for (Var& v : local.edge.vars) v = local_index[v];
    split.formulas[comp].clauses.push_back(std::move(local));
  }
  return split;
}

CountResult count_components(const Formula& f, const CountOptions& options) {
  const ComponentSplit split = split_components(f);
  BigInt z = BigInt(1) << split.isolated;
  for (std::size_t i = 0; i < split.formulas.size(); ++i) {
    check_cap(split.formulas[i].n, options, "component " + std::to_string(i));
  }
  for (const Formula& sub : split.formulas) {
    const std::uint64_t part = brute_force(sub);
    if (part == 0) return make_count(BigInt(0), CountMethod::kComponents);
    z *= part;
  }
  return make_count(std::move(z), CountMethod::kComponents);
}

Gf2Summary eliminate_xorsat(const Formula& f) {
  if (f.family != Family::kXorSat) {
    throw Error(ErrorKind::kUnsupportedFamily, "GF(2) counting applies to xorsat formulas only");
  }
  validate_formula(f);
  const std::size_t words = (f.n + 1 + 63) / 64;
  const std::size_t rhs_word = f.n / 64;
  const std::uint64_t rhs_bit = std::uint64_t{1} << (f.n % 64);
  std::vector<std::vector<std::uint64_t>> rows;
  rows.reserve(f.clauses.size());
  for (const Clause& c : f.clauses) {
    std::vector<std::uint64_t> row(words, 0);
    for (Var v : c.edge.vars) row[v / 64] ^= std::uint64_t{1} << (v % 64);
    if (std::get<XorTarget>(c.semantics).bit) row[rhs_word] ^= rhs_bit;
    rows.push_back(std::move(row));
  }
  Gf2Summary summary;
  for (std::size_t col = 0; col < f.n && summary.rank < rows.size(); ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t pivot = summary.rank;
    while (pivot < rows.size() && !(rows[pivot][w] & bit)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[summary.rank]);
    const auto& pivot_row = rows[summary.rank];
    for (std::size_t r = summary.rank + 1; r < rows.size(); ++r) {
      if (rows[r][w] & bit) {
        for (std::size_t j = w; j < words; ++j) rows[r][j] ^= pivot_row[j];
      }
    }
    ++summary.rank;
  }
  for (std::size_t r = summary.rank; r < rows.size(); ++r) {
    if (rows[r][rhs_word] & rhs_bit) {
      summary.consistent = false;
      break;
    }
  }
  return summary;
}

CountResult count_xorsat(const Formula& f) {
  const Gf2Summary s = eliminate_xorsat(f);
  if (!s.consistent) return make_count(BigInt(0), CountMethod::kGf2);
  return make_count(BigInt(1) << (f.n - s.rank), CountMethod::kGf2);
}

Formula gold_output_formula(const Assignment& x, std::span<const Edge> edges,
                            const PredicatePtr& predicate) {
  if (!predicate) throw Error(ErrorKind::kInvalidArgument, "missing predicate");
  Formula f;
  f.n = x.size();
  f.k = predicate->arity();
  f.family = Family::kGold;
  f.model = Model::kUnplanted;
  f.planted = x;
  for (const Edge& e : edges) {
    for (Var v : e.vars) {
      if (v >= x.size()) throw Error(ErrorKind::kDimension, "edge index outside the input");
    }
    if (e.size() != predicate->arity()) {
      throw Error(ErrorKind::kInvalidClause, "edge arity differs from predicate arity");
    }
    f.clauses.push_back(Clause{e, GoldTarget{predicate, (*predicate)(x.restrict_to(e))}});
  }
  return f;
}

CountResult count_gold_preimages(const Assignment& x, std::span<const Edge> edges,
                                 const PredicatePtr& predicate, const CountOptions& options) {
  check_cap(x.size(), options, "input");
  CountResult r = count_components(gold_output_formula(x, edges, predicate), options);
  r.method = CountMethod::kPreimage;
  return r;
}

CountResult count_gold_preimages(const Assignment& x, const Formula& f, const CountOptions& options) {
  if (f.family != Family::kGold) {
    throw Error(ErrorKind::kUnsupportedFamily, "preimage counting needs a gold formula");
  }
  if (x.size() != f.n) throw Error(ErrorKind::kDimension, "input length differs from n");
  std::vector<Edge> edges;
  edges.reserve(f.clauses.size());
  PredicatePtr predicate;
  for (const Clause& c : f.clauses) {
    edges.push_back(c.edge);
    predicate = std::get<GoldTarget>(c.semantics).predicate;
  }
  if (!predicate) return make_count(BigInt(1) << f.n, CountMethod::kPreimage);
  return count_gold_preimages(x, edges, predicate, options);
}

CountResult count_auto(const Formula& f, const CountOptions& options) {
  if (f.family == Family::kXorSat) return count_xorsat(f);
  return count_components(f, options);
}

CountResult count_with(const Formula& f, CountMethod method, const CountOptions& options) {
  switch (method) {
    case CountMethod::kBrute: return count_exact(f, options);
    case CountMethod::kComponents: return count_components(f, options);
    case CountMethod::kGf2: return count_xorsat(f);
    case CountMethod::kPreimage: {
      if (!f.planted) throw Error(ErrorKind::kInvalidArgument, "preimage counting needs an input");
      return count_gold_preimages(*f.planted, f, options);
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown count method");
}

}  // namespace csplab
