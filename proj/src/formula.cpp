#include "csplab/formula.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "csplab/error.hpp"

namespace csplab {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kSat: return "sat";
    case Family::kNaeSat: return "naesat";
    case Family::kXorSat: return "xorsat";
    case Family::kGold: return "gold";
  }
  return "?";
}

std::string_view to_string(Model model) {
  switch (model) {
    case Model::kBinomial: return "binomial";
    case Model::kUniform: return "uniform";
    case Model::kUnplanted: return "unplanted";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "sat") return Family::kSat;
  if (text == "naesat" || text == "nae") return Family::kNaeSat;
  if (text == "xorsat" || text == "xor") return Family::kXorSat;
  if (text == "gold") return Family::kGold;
  throw Error(ErrorKind::kInvalidArgument, "unknown family '" + std::string(text) + "'");
}

Assignment::Assignment(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

Assignment Assignment::from_string(std::string_view bits) {
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw Error(ErrorKind::kInvalidArgument, "assignment string must contain only 0/1");
    }
    out.push_back(c == '1' ? 1 : 0);
  }
  return Assignment(std::move(out));
}

Assignment Assignment::from_word(std::uint64_t word, std::size_t n) {
  Assignment a(n);
  for (std::size_t i = 0; i < n && i < 64; ++i) a.set(i, (word >> i) & 1U);
  return a;
}

std::uint32_t Assignment::restrict_to(const Edge& edge) const {
  std::uint32_t out = 0;
  for (Var v : edge.vars) out = (out << 1) | bits_[v];
  return out;
}

std::string Assignment::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

NaeForbidden NaeForbidden::canonical(std::uint32_t pattern, int k) {
  const std::uint32_t complement = ~pattern & full_mask(k);
  return NaeForbidden{std::min(pattern & full_mask(k), complement)};
}

Family family_of(const ClauseSemantics& semantics) {
  switch (semantics.index()) {
    case 0: return Family::kSat;
    case 1: return Family::kNaeSat;
    case 2: return Family::kXorSat;
    default: return Family::kGold;
  }
}

namespace {

bool eval_semantics(const ClauseSemantics& semantics, std::uint32_t y, int k) {
  struct Visitor {
    std::uint32_t y;
    int k;
    bool operator()(const SatForbidden& s) const { return y != s.pattern; }
    bool operator()(const NaeForbidden& s) const {
      return y != s.pattern && y != (~s.pattern & full_mask(k));
    }
    bool operator()(const XorTarget& s) const { return (std::popcount(y) & 1) == (s.bit ? 1 : 0); }
    bool operator()(const GoldTarget& s) const { return (*s.predicate)(y) == s.bit; }
  };
  return std::visit(Visitor{y, k}, semantics);
}

}  // namespace

std::vector<std::uint8_t> satisfying_table(const ClauseSemantics& semantics, int k) {
  std::vector<std::uint8_t> table(std::size_t{1} << k);
  for (std::uint32_t y = 0; y < table.size(); ++y) table[y] = eval_semantics(semantics, y, k);
  return table;
}

void validate_clause(const Clause& clause) {
  const int k = clause.edge.size();
  if (k < 1 || k > kMaxArity) {
    throw Error(ErrorKind::kInvalidClause, "edge arity must be in [1, 16]");
  }
  auto sorted = clause.edge.vars;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::kInvalidClause, "edge variables must be distinct");
  }
  const std::uint32_t mask = full_mask(k);
  if (const auto* s = std::get_if<SatForbidden>(&clause.semantics); s && (s->pattern & ~mask)) {
    throw Error(ErrorKind::kInvalidClause, "SAT pattern wider than the edge");
  }
  if (const auto* s = std::get_if<NaeForbidden>(&clause.semantics)) {
    if (s->pattern & ~mask) throw Error(ErrorKind::kInvalidClause, "NAE pattern wider than the edge");
    if (NaeForbidden::canonical(s->pattern, k).pattern != s->pattern) {
      throw Error(ErrorKind::kInvalidClause, "NAE pattern is not canonical");
    }
  }
  if (const auto* s = std::get_if<GoldTarget>(&clause.semantics)) {
    if (!s->predicate) throw Error(ErrorKind::kInvalidClause, "GOLD clause without predicate");
    if (s->predicate->arity() != k) {
      throw Error(ErrorKind::kInvalidClause, "predicate arity " +
                                                 std::to_string(s->predicate->arity()) +
                                                 " does not match edge arity " + std::to_string(k));
    }
  }
}

bool eval_clause(const Clause& clause, const Assignment& a) {
  validate_clause(clause);
  for (Var v : clause.edge.vars) {
    if (v >= a.size()) {
      throw Error(ErrorKind::kDimension, "edge index " + std::to_string(v) +
                                             " outside assignment of length " +
                                             std::to_string(a.size()));
    }
  }
  return eval_semantics(clause.semantics, a.restrict_to(clause.edge), clause.edge.size());
}

void validate_formula(const Formula& f) {
  for (const Clause& c : f.clauses) {
    validate_clause(c);
    if (c.edge.size() != f.k) {
      throw Error(ErrorKind::kInvalidClause, "clause arity differs from formula arity");
    }
    if (family_of(c.semantics) != f.family) {
      throw Error(ErrorKind::kInvalidClause, "clause semantics inconsistent with formula family");
    }
    for (Var v : c.edge.vars) {
      if (v >= f.n) throw Error(ErrorKind::kDimension, "edge index out of range");
    }
  }
  if (f.planted && f.planted->size() != f.n) {
    throw Error(ErrorKind::kDimension, "planted assignment length differs from n");
  }
}

bool eval_formula(const Formula& f, const Assignment& a) {
  if (a.size() != f.n) {
    throw Error(ErrorKind::kDimension, "assignment length " + std::to_string(a.size()) +
                                           " differs from n = " + std::to_string(f.n));
  }
  return std::all_of(f.clauses.begin(), f.clauses.end(),
                     [&](const Clause& c) { return eval_clause(c, a); });
}

Formula zero_plant_transform(const Formula& f) {
  if (f.family == Family::kGold) {
    throw Error(ErrorKind::kUnsupportedFamily,
                "zero-plant reduction is not defined for the gold family");
  }
  if (!f.planted) throw Error(ErrorKind::kInvalidArgument, "formula has no planted solution");
  validate_formula(f);
  const Assignment& v0 = *f.planted;
  Formula out = f;
  for (Clause& c : out.clauses) {
    const std::uint32_t shift = v0.restrict_to(c.edge);
    if (auto* s = std::get_if<SatForbidden>(&c.semantics)) {
      s->pattern ^= shift;
    } else if (auto* s = std::get_if<NaeForbidden>(&c.semantics)) {
      *s = NaeForbidden::canonical(s->pattern ^ shift, f.k);
    } else if (auto* s = std::get_if<XorTarget>(&c.semantics)) {
      s->bit ^= (std::popcount(shift) & 1) != 0;
    }
  }
  out.planted = Assignment::zeros(f.n);
  return out;
}

std::vector<Var> inverse_permutation(std::span<const Var> perm) {
  std::vector<Var> inverse(perm.size(), 0);
  std::vector<std::uint8_t> seen(perm.size(), 0);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size() || seen[perm[i]]) {
      throw Error(ErrorKind::kInvalidPermutation, "permutation is not a bijection on [0, n)");
    }
    seen[perm[i]] = 1;
    inverse[perm[i]] = static_cast<Var>(i);
  }
  return inverse;
}

Formula relabel(const Formula& f, std::span<const Var> perm) {
  if (perm.size() != f.n) {
    throw Error(ErrorKind::kInvalidPermutation, "permutation length differs from n");
  }
  inverse_permutation(perm);  // bijectivity check
  Formula out = f;
  for (Clause& c : out.clauses) {
    for (Var& v : c.edge.vars) v = perm[v];
  }
  if (f.planted) {
    Assignment moved(f.n);
    for (std::size_t i = 0; i < f.n; ++i) moved.set(perm[i], (*f.planted)[i]);
    out.planted = std::move(moved);
  }
  return out;
}

}  // namespace csplab
