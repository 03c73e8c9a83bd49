#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "csplab/predicate.hpp"
#include "csplab/rng.hpp"

namespace csplab {

bool is_balanced(const Predicate& chi);

/// chi(complement x) == 1 - chi(x) for every x.
bool is_antisymmetric(const Predicate& chi);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0, gcd(num, den) == 1

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Correlation of the output with the XOR of the input bits in `positions`
/// (one or two distinct positions, 0 = most significant):
///   2^-k * sum_x (-1)^(chi(x) xor x_S).
Rational correlation(const Predicate& chi, std::span<const int> positions);

/// True when every one-bit (and, if requested, two-bit) correlation vanishes.
bool uncorrelated_with_bits(const Predicate& chi, int max_order);

/// Probability measure on ell-bit tuples. Tuple t is the column
/// (u^(1)_i, ..., u^(ell)_i) read MSB-first, replica 1 most significant.
class TupleMeasure {
 public:
  TupleMeasure(int ell, std::vector<double> weights);

  static TupleMeasure uniform(int ell);
  static TupleMeasure point(int ell, std::uint32_t tuple);
  /// Uniform on the simplex (normalized exponentials).
  static TupleMeasure random(int ell, Engine& eng);

  int ell() const noexcept { return ell_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  int ell_;
  std::vector<double> weights_;
};

inline constexpr double kMeasureTolerance = 1e-12;

/// Gamma_ell for one predicate, compiled once and evaluated many times.
///
/// The defining sum runs over ell-tuples of k-bit inputs sharing one predicate
/// value; each term is the product over input positions of the weight of the
/// column tuple. Terms with the same multiset of columns are merged, so an
/// evaluation is a short sum of monomials in the 2^ell weights.
class GammaEvaluator {
 public:
  GammaEvaluator(const Predicate& chi, int ell);

  int ell() const noexcept { return ell_; }
  int arity() const noexcept { return k_; }
  std::size_t monomials() const noexcept { return coefficients_.size(); }

  /// Evaluates on raw weights (2^ell of them). Also accepts points slightly
  /// outside the simplex, which the curvature probes rely on.
  double operator()(std::span<const double> weights) const;
  double operator()(const TupleMeasure& nu) const;

 private:
  int k_;
  int ell_;
  std::vector<double> coefficients_;
  std::vector<std::uint8_t> columns_;  // k entries per monomial
};

double gamma_ell(const Predicate& chi, int ell, const TupleMeasure& nu);

/// Certificate that Gamma_ell is not convex along one segment:
/// lhs = Gamma(lambda a + (1 - lambda) b) exceeds rhs = lambda Gamma(a) + (1 - lambda) Gamma(b).
struct ConvexityWitness {
  int ell = 0;
  TupleMeasure nu_a;
  TupleMeasure nu_b;
  double lambda = 0.5;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

inline constexpr double kWitnessTolerance = 1e-9;

/// Evaluates lhs/rhs/margin for a candidate segment.
ConvexityWitness make_witness(const GammaEvaluator& gamma, TupleMeasure a, TupleMeasure b, double lambda);

/// Re-evaluates the witness and checks margin > tolerance.
bool verify_witness(const Predicate& chi, const ConvexityWitness& w,
                    double tolerance = kWitnessTolerance);

struct SearchBudget {
  std::size_t random_pairs = 20000;
  std::size_t hessian_points = 200;
};

/// Searches for a midpoint-convexity violation of Gamma_ell. An empty result
/// means the budget ran out; it says nothing about convexity.
std::optional<ConvexityWitness> falsify_convexity(const Predicate& chi, int ell,
                                                  const SearchBudget& budget, Seed seed);

/// All antisymmetric predicates on k <= 5 bits, in increasing order of their
/// values on the representatives with leading bit 0.
std::vector<Predicate> enumerate_antisymmetric(int k);

enum class HStatus { kViolated, kUnresolved };
std::string_view to_string(HStatus status);

struct SurvivorResult {
  Predicate predicate;
  HStatus status = HStatus::kUnresolved;
  std::optional<ConvexityWitness> witness;  // set when violated
};

struct ScanReport {
  int k = 0;
  int max_ell = 3;
  Seed seed = 0;
  SearchBudget budget;
  std::size_t candidates = 0;
  std::size_t balanced = 0;
  std::size_t no_one_bit_correlation = 0;
  std::size_t no_two_bit_correlation = 0;
  std::vector<SurvivorResult> survivors;  // enumeration order

  std::size_t unresolved() const noexcept;
};

/// Filters antisymmetric predicates by balance and low-order correlations and
/// tries to refute Hypothesis H for each survivor at ell = 2..max_ell.
ScanReport scan_predicates(int k, int max_ell, const SearchBudget& budget, Seed seed, int jobs = 1);

}  // namespace csplab
