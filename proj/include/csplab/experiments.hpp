#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "csplab/counting.hpp"
#include "csplab/predicate.hpp"
#include "csplab/sampler.hpp"

namespace csplab {

struct ExperimentOptions {
  int jobs = 1;
  CountOptions count;
  /// Counting route; nullopt picks GF(2) for xorsat and components otherwise.
  std::optional<CountMethod> method;
};

/// Sample i of every Monte-Carlo driver uses derive_seed(seed, {i}).
Seed sample_seed(Seed seed, std::size_t index);

/// Neumaier-compensated sum in the given order.
double compensated_sum(std::span<const double> values);

struct EstimateResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double variance = 0.0;  // unbiased sample variance of the per-sample values
  std::size_t samples = 0;
  Seed seed = 0;
  std::vector<double> values;  // (1/n) log2 Z per sample, in sample order
};

/// Mean of (1/n) log2 Z over independent planted samples.
EstimateResult estimate_psi(const ModelSpec& spec, std::size_t samples, Seed seed,
                            const ExperimentOptions& options = {});

struct QnEstimate {
  double proportion = 0.0;
  double lower = 0.0;  // Wilson 95% interval
  double upper = 0.0;
  std::size_t hits = 0;
  double alpha = 0.0;
  double phi = 0.0;
  std::size_t n = 0;
  std::size_t samples = 0;
};

struct Interval {
  double lower;
  double upper;
};
Interval wilson_interval(std::size_t hits, std::size_t samples, double z = 1.959963984540054);

/// Whether log2 z < n * phi.
bool below_exponent(const CountResult& count, std::size_t n, double phi);

/// Fraction of samples with Z < 2^(n phi). With `coupled_alpha_max`, every
/// sample is drawn once at that density and thinned, so estimates at several
/// alphas share their clause variates.
QnEstimate estimate_qn(const ModelSpec& spec, double phi, std::size_t samples, Seed seed,
                       const ExperimentOptions& options = {},
                       std::optional<double> coupled_alpha_max = std::nullopt);

/// Q_n over a sweep of densities on one coupled sample set.
std::vector<QnEstimate> qn_curve(const ModelSpec& spec, std::span<const double> alphas, double phi,
                                 std::size_t samples, Seed seed, const ExperimentOptions& options = {});

struct ThresholdEstimate {
  double alpha_hat = 0.0;
  double alpha_lo = 0.0;  // Q(alpha_lo) < 1/2
  double alpha_hi = 0.0;  // Q(alpha_hi) >= 1/2
  double q_lo = 0.0;
  double q_hi = 0.0;
  double tolerance = 0.0;
  double phi = 0.0;
  std::size_t n = 0;
  std::size_t samples = 0;
  std::size_t iterations = 0;
};

/// Bisection on alpha for the empirical Q_n = 1/2 crossing over a coupled
/// sample set drawn at alpha_max. A density where Q is exactly 1/2 counts as
/// crossed, so ties resolve toward the lower alpha.
ThresholdEstimate locate_threshold(const ModelSpec& spec, double phi, double tolerance,
                                   std::size_t samples, Seed seed, double alpha_max,
                                   const ExperimentOptions& options = {});

struct TransitionWindow {
  double lower_level = 0.1;
  double upper_level = 0.9;
  double alpha_lower = 0.0;  // Q first reaches lower_level
  double alpha_upper = 0.0;  // Q first exceeds upper_level
  double width = 0.0;
  std::vector<double> crossings;  // per-sample critical density, sorted; +inf if none
};

/// Per-sample critical densities (where Z first drops below 2^(n phi) along
/// the coupled chain) and the alpha-window where Q lies in [lower, upper].
TransitionWindow transition_window(const ModelSpec& spec, double phi, std::size_t samples, Seed seed,
                                   double alpha_max, double lower_level = 0.1, double upper_level = 0.9,
                                   const ExperimentOptions& options = {});

struct AzumaTrial {
  std::size_t edges = 0;
  double before = 0.0;  // L(G) in bits
  double after = 0.0;   // L(G + e)
  double increment = 0.0;
};

struct AzumaReport {
  std::vector<AzumaTrial> trials;
  double min_increment = 0.0;
  double max_increment = 0.0;
  std::vector<std::size_t> violations;  // trial indices outside [0, 1]
};

struct AzumaOptions {
  /// Each trial draws the edge count uniformly from [0, round(edges_per_var n)].
  double edges_per_var = 1.0;
  std::size_t exact_cap = 14;
  int jobs = 1;
};

inline constexpr double kAzumaSlack = 1e-12;

/// L(G) = E_X log2 Z(X, G), computed over all 2^n inputs.
double expected_log_preimages(std::size_t n, std::span<const Edge> edges, const Predicate& chi);

AzumaReport azuma_increment_check(std::size_t n, int k, const PredicatePtr& chi, std::size_t trials,
                                  Seed seed, const AzumaOptions& options = {});

struct VarianceSplit {
  double total = 0.0;
  double between = 0.0;  // variance over graphs of E_s[phi | G]
  double within = 0.0;   // mean over graphs of Var_s[phi | G]
  std::size_t graph_samples = 0;
  std::size_t plant_samples = 0;
  std::vector<std::vector<double>> phi;  // [graph][plant]
};

/// Empirical law-of-total-variance split of (1/n) log2 Z. Graph g keeps its
/// clause stream fixed while plant j varies; with vary_plant = false every
/// plant on a graph is the same, so the within-graph term vanishes.
VarianceSplit variance_split(const ModelSpec& spec, std::size_t graph_samples, std::size_t plant_samples,
                             Seed seed, const ExperimentOptions& options = {}, bool vary_plant = true);

}  // namespace csplab
