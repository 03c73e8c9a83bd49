#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "csplab/formula.hpp"

namespace csplab {

using BigInt = boost::multiprecision::cpp_int;

enum class CountMethod { kBrute, kComponents, kGf2, kPreimage };

std::string_view to_string(CountMethod method);

struct CountResult {
  BigInt z;
  double log2_z = 0.0;  // -inf when z == 0
  CountMethod method = CountMethod::kBrute;
};

struct CountOptions {
  int brute_force_cap = 30;
};

inline constexpr int kMaxBruteForceCap = 40;

/// log2 of a non-negative integer, -inf for zero. Exact for powers of two.
double log2_of(const BigInt& z);

CountResult make_count(BigInt z, CountMethod method);

/// Exhaustive count. Assignments are visited 64 at a time in Gray-code order
/// over the remaining variables; only clauses touching the flipped variable
/// are re-evaluated between blocks.
CountResult count_exact(const Formula& f, const CountOptions& options = {});

struct ComponentSplit {
  /// Variables of each component, ascending; components ordered by smallest
  /// variable.
  std::vector<std::vector<Var>> components;
  /// Component-local formulas (variables renumbered to [0, size)).
  std::vector<Formula> formulas;
  std::size_t isolated = 0;
};

ComponentSplit split_components(const Formula& f);

/// Product of per-component exhaustive counts times 2^isolated.
CountResult count_components(const Formula& f, const CountOptions& options = {});

/// Z = 2^(n - rank) or 0 for an XORSAT system, by GF(2) elimination.
CountResult count_xorsat(const Formula& f);

/// Rank and consistency of the XOR system of `f`.
struct Gf2Summary {
  std::size_t rank = 0;
  bool consistent = true;
};
Gf2Summary eliminate_xorsat(const Formula& f);

/// Number of u with predicate(u[e]) == predicate(x[e]) for every edge.
CountResult count_gold_preimages(const Assignment& x, std::span<const Edge> edges,
                                 const PredicatePtr& predicate, const CountOptions& options = {});
/// Same, using the edges of a gold formula (targets are ignored).
CountResult count_gold_preimages(const Assignment& x, const Formula& f,
                                 const CountOptions& options = {});

/// Gold formula whose targets are the outputs of x.
Formula gold_output_formula(const Assignment& x, std::span<const Edge> edges,
                            const PredicatePtr& predicate);

/// GF(2) for XORSAT, components otherwise.
CountResult count_auto(const Formula& f, const CountOptions& options = {});

CountResult count_with(const Formula& f, CountMethod method, const CountOptions& options = {});

}  // namespace csplab
