#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "csplab/formula.hpp"
#include "csplab/rng.hpp"

namespace csplab {

enum class PlantMode { kRandom, kFixed, kUnplanted };
enum class Scheme { kBinomial, kUniform };

struct ModelSpec {
  Family family = Family::kSat;
  std::size_t n = 0;
  int k = 3;
  double alpha = 0.0;
  PredicatePtr predicate;  // gold only
  PlantMode plant_mode = PlantMode::kRandom;
  std::optional<Assignment> fixed_plant;  // used when plant_mode == kFixed
  Scheme scheme = Scheme::kBinomial;
};

/// Sizes of the candidate clause set C_k(n) for one family.
struct CandidateSpace {
  Family family;
  std::size_t n;
  int k;
  std::uint64_t edges;              // C(n, k) unordered edges
  std::uint64_t payloads_per_edge;  // clause variants per unordered edge
  std::uint64_t eligible_per_edge;  // variants satisfied by a fixed plant
  std::uint64_t total;              // N

  /// Satisfied-clause multiplicity of one (ordered, for gold) edge.
  std::uint64_t planted_multiplicity() const noexcept;
  std::uint64_t eligible_total() const noexcept { return edges * eligible_per_edge; }
};

CandidateSpace candidate_space(Family family, std::size_t n, int k);

std::uint64_t binomial(std::size_t n, std::size_t k);

/// Unordered edge of the given lexicographic rank among k-subsets of [0, n).
Edge unrank_combination(std::uint64_t rank, std::size_t n, int k);

/// Every candidate clause in enumeration order; restricted to those satisfied
/// by `plant` when given. Intended for small n (tests, exhaustive checks).
std::vector<Clause> enumerate_candidates(Family family, std::size_t n, int k,
                                         const PredicatePtr& predicate,
                                         const std::optional<Assignment>& plant);

/// Inclusion probability p = alpha n / N; throws kDensityOutOfRange if p > 1.
double inclusion_probability(const ModelSpec& spec);

/// Checks structural preconditions of a spec (arity, predicate, plant size).
void validate_spec(const ModelSpec& spec);

Formula sample_planted(const ModelSpec& spec, Seed seed);
Formula sample_planted_gold(const ModelSpec& spec, Seed seed);
Formula sample_unplanted(const ModelSpec& spec, Seed seed);
Formula sample_uniform(const ModelSpec& spec, Seed seed);

/// Dispatches on family, plant mode and scheme.
Formula sample(const ModelSpec& spec, Seed seed);

/// A sample drawn once at a maximal density and thinned to any lower density.
///
/// Every clause kept at the maximal density carries a uniform variate in
/// [0, p_max) (binomial) or an arrival position (uniform); the formula at
/// density a keeps exactly those whose variate falls below p(a). Formulas at
/// increasing densities are therefore nested.
class CoupledSample {
 public:
  CoupledSample(const ModelSpec& spec, double alpha_max, Seed seed);

  const ModelSpec& spec() const noexcept { return spec_; }
  double alpha_max() const noexcept { return alpha_max_; }
  const std::optional<Assignment>& planted() const noexcept { return planted_; }

  Formula at(double alpha) const;

  /// Clauses ordered by entry density, with the density at which each enters.
  struct Arrival {
    double alpha;
    std::size_t clause;
  };
  std::vector<Arrival> arrivals() const;
  /// Formula with the first `count` clauses of arrivals().
  Formula first(std::size_t count) const;

 private:
  double threshold_for(double alpha) const;
  Formula shell() const;

  ModelSpec spec_;
  double alpha_max_;
  std::optional<Assignment> planted_;
  std::vector<Clause> clauses_;   // enumeration order
  std::vector<double> variates_;  // parallel to clauses_
  double density_scale_;          // variate -> alpha
};

/// One formula per density; alphas must be strictly increasing.
std::vector<Formula> coupled_chain(const ModelSpec& spec, std::span<const double> alphas, Seed seed);

}  // namespace csplab
