#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "csplab/predicate.hpp"

namespace csplab {

enum class Family { kSat, kNaeSat, kXorSat, kGold };
enum class Model { kBinomial, kUniform, kUnplanted };

std::string_view to_string(Family family);
std::string_view to_string(Model model);
Family parse_family(std::string_view text);

using Var = std::uint32_t;

/// Ordered sequence of k distinct variable indices.
struct Edge {
  std::vector<Var> vars;

  int size() const noexcept { return static_cast<int>(vars.size()); }
  Var operator[](int i) const { return vars[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : bits_(n, 0) {}
  explicit Assignment(std::vector<std::uint8_t> bits);

  static Assignment zeros(std::size_t n) { return Assignment(n); }
  /// Parses a string of '0'/'1' characters, variable 0 first.
  static Assignment from_string(std::string_view bits);
  /// Low n bits of `word`, variable 0 taken from bit 0.
  static Assignment from_word(std::uint64_t word, std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// Values on `edge`, packed MSB-first.
  std::uint32_t restrict_to(const Edge& edge) const;
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Clause semantics. Patterns are k-bit words, MSB-first along the edge.

/// Satisfied iff y[e] differs from the pattern.
struct SatForbidden {
  std::uint32_t pattern = 0;
  friend bool operator==(const SatForbidden&, const SatForbidden&) = default;
};

/// Satisfied iff y[e] is neither the pattern nor its complement. Always holds
/// the lexicographically smaller member of the pair.
struct NaeForbidden {
  std::uint32_t pattern = 0;

  static NaeForbidden canonical(std::uint32_t pattern, int k);
  friend bool operator==(const NaeForbidden&, const NaeForbidden&) = default;
};

/// Satisfied iff the parity of y[e] equals bit.
struct XorTarget {
  bool bit = false;
  friend bool operator==(const XorTarget&, const XorTarget&) = default;
};

/// Satisfied iff predicate(y[e]) equals bit.
struct GoldTarget {
  PredicatePtr predicate;
  bool bit = false;

  friend bool operator==(const GoldTarget& a, const GoldTarget& b) {
    return a.bit == b.bit && (a.predicate == b.predicate ||
                              (a.predicate && b.predicate && *a.predicate == *b.predicate));
  }
};

using ClauseSemantics = std::variant<SatForbidden, NaeForbidden, XorTarget, GoldTarget>;

Family family_of(const ClauseSemantics& semantics);

struct Clause {
  Edge edge;
  ClauseSemantics semantics;

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Truth table (2^k entries, MSB-first indexing) of the clause function.
std::vector<std::uint8_t> satisfying_table(const ClauseSemantics& semantics, int k);

/// Checks edge and semantics agree on arity and that edge variables are
/// distinct; throws kInvalidClause otherwise.
void validate_clause(const Clause& clause);

bool eval_clause(const Clause& clause, const Assignment& a);

struct Formula {
  std::size_t n = 0;
  int k = 0;
  Family family = Family::kSat;
  Model model = Model::kBinomial;
  std::vector<Clause> clauses;
  std::optional<Assignment> planted;

  std::size_t size() const noexcept { return clauses.size(); }
  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Structural checks: arity, family consistency, index range, plant length.
void validate_formula(const Formula& f);

bool eval_formula(const Formula& f, const Assignment& a);

/// Rewrites a planted SAT/NAESAT/XORSAT formula so the plant is all-zero while
/// keeping its solution set in bijection with the original (y -> y xor v0).
Formula zero_plant_transform(const Formula& f);

/// Replaces every variable index i by perm[i].
Formula relabel(const Formula& f, std::span<const Var> perm);

std::vector<Var> inverse_permutation(std::span<const Var> perm);

}  // namespace csplab
