#include "csplab/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "csplab/error.hpp"
#include "csplab/parallel.hpp"

namespace csplab {

namespace {

CountResult count_for(const Formula& f, const ExperimentOptions& options) {
  if (options.method) return count_with(f, *options.method, options.count);
  return count_auto(f, options.count);
}

void require_planted(const ModelSpec& spec, const char* what) {
  if (spec.plant_mode == PlantMode::kUnplanted) {
    throw Error(ErrorKind::kUnsupportedFamily, std::string(what) + " is defined for planted models only");
  }
}

void require_phi(double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "phi must lie in [0, 1]");
  }
}

void require_samples(std::size_t samples) {
  if (samples == 0) throw Error(ErrorKind::kInvalidArgument, "sample count must be positive");
}

double mean_of(std::span<const double> values) {
  return compensated_sum(values) / static_cast<double>(values.size());
}

/// Population variance around `center`.
double spread(std::span<const double> values, double center) {
  std::vector<double> squares(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - center;
    squares[i] = d * d;
  }
  return compensated_sum(squares) / static_cast<double>(values.size());
}

double fraction(std::size_t hits, std::size_t samples) {
  return static_cast<double>(hits) / static_cast<double>(samples);
}

Edge random_ordered_edge(std::size_t n, int k, Engine& eng) {
  std::vector<Var> pool(n);
  std::iota(pool.begin(), pool.end(), Var{0});
  Edge e;
  for (int i = 0; i < k; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + uniform_below(eng, n - static_cast<std::size_t>(i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    e.vars.push_back(pool[static_cast<std::size_t>(i)]);
  }
  return e;
}

/// Output signature of every input x in [0, 2^n), packed into 64-bit words.
std::vector<std::uint64_t> output_signatures(std::size_t n, std::span<const Edge> edges, const Predicate& chi,
                                             std::size_t& words) {
  words = std::max<std::size_t>(1, (edges.size() + 63) / 64);
  const std::size_t inputs = std::size_t{1} << n;
  std::vector<std::uint64_t> sig(inputs * words, 0);
  for (std::size_t x = 0; x < inputs; ++x) {
    const Assignment a = Assignment::from_word(x, n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (chi(a.restrict_to(edges[i]))) sig[x * words + i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  return sig;
}

/// Groups inputs into classes of equal signature; returns class id per input.
std::vector<std::size_t> classes_of(const std::vector<std::uint64_t>& sig, std::size_t words,
                                    std::size_t& class_count) {
  const std::size_t inputs = sig.size() / words;
  std::vector<std::size_t> order(inputs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(sig.begin() + static_cast<std::ptrdiff_t>(a * words),
                                        sig.begin() + static_cast<std::ptrdiff_t>((a + 1) * words),
                                        sig.begin() + static_cast<std::ptrdiff_t>(b * words),
                                        sig.begin() + static_cast<std::ptrdiff_t>((b + 1) * words));
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::size_t> id(inputs, 0);
  class_count = 0;
  for (std::size_t i = 0; i < inputs; ++i) {
    if (i > 0 && less(order[i - 1], order[i])) ++class_count;
    id[order[i]] = class_count;
  }
  if (inputs > 0) ++class_count;
  return id;
}

double xlog2x(double c) { return c > 0.0 ? c * std::log2(c) : 0.0; }

}  // namespace

Seed sample_seed(Seed seed, std::size_t index) { return derive_seed(seed, {index}); }

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

EstimateResult estimate_psi(const ModelSpec& spec, std::size_t samples, Seed seed,
                            const ExperimentOptions& options) {
  require_planted(spec, "psi_n");
  require_samples(samples);
  validate_spec(spec);
  EstimateResult result;
  result.samples = samples;
  result.seed = seed;
  result.values.assign(samples, 0.0);
  parallel_for(samples, options.jobs, [&](std::size_t i) {
    const Formula f = sample(spec, sample_seed(seed, i));
    const CountResult c = count_for(f, options);
    if (c.z.is_zero()) throw Error(ErrorKind::kData, "planted sample with zero solutions");
    result.values[i] = c.log2_z / static_cast<double>(spec.n);
  });
  result.estimate = mean_of(result.values);
  if (samples > 1) {
    result.variance = spread(result.values, result.estimate) * static_cast<double>(samples) /
                      static_cast<double>(samples - 1);
    result.std_error = std::sqrt(result.variance / static_cast<double>(samples));
  }
  return result;
}

Interval wilson_interval(std::size_t hits, std::size_t samples, double z) {
  require_samples(samples);
  const double s = static_cast<double>(samples);
  const double p = fraction(hits, samples);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / s;
  const double center = (p + z2 / (2.0 * s)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / s + z2 / (4.0 * s * s)) / denom;
  return Interval{std::clamp(std::min(center - half, p), 0.0, 1.0),
                  std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

bool below_exponent(const CountResult& count, std::size_t n, double phi) {
  return count.log2_z < static_cast<double>(n) * phi;
}

QnEstimate estimate_qn(const ModelSpec& spec, double phi, std::size_t samples, Seed seed,
                       const ExperimentOptions& options, std::optional<double> coupled_alpha_max) {
  require_phi(phi);
  require_samples(samples);
  validate_spec(spec);
  std::vector<std::uint8_t> hit(samples, 0);
  parallel_for(samples, options.jobs, [&](std::size_t i) {
    const Formula f = coupled_alpha_max
                          ? CoupledSample(spec, *coupled_alpha_max, sample_seed(seed, i)).at(spec.alpha)
                          : sample(spec, sample_seed(seed, i));
    hit[i] = below_exponent(count_for(f, options), spec.n, phi) ? 1 : 0;
  });
  QnEstimate q;
  q.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  q.samples = samples;
  q.proportion = fraction(q.hits, samples);
  const Interval ci = wilson_interval(q.hits, samples);
  q.lower = ci.lower;
  q.upper = ci.upper;
  q.alpha = spec.alpha;
  q.phi = phi;
  q.n = spec.n;
  return q;
}

std::vector<QnEstimate> qn_curve(const ModelSpec& spec, std::span<const double> alphas, double phi,
                                 std::size_t samples, Seed seed, const ExperimentOptions& options) {
  require_phi(phi);
  require_samples(samples);
  if (alphas.empty()) return {};
  const double alpha_max = *std::max_element(alphas.begin(), alphas.end());
  std::vector<std::vector<std::uint8_t>> hit(alphas.size(), std::vector<std::uint8_t>(samples, 0));
  parallel_for(samples, options.jobs, [&](std::size_t i) {
    const CoupledSample coupled(spec, alpha_max, sample_seed(seed, i));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      hit[a][i] = below_exponent(count_for(coupled.at(alphas[a]), options), spec.n, phi) ? 1 : 0;
    }
  });
  std::vector<QnEstimate> out;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    QnEstimate q;
    q.hits = static_cast<std::size_t>(std::count(hit[a].begin(), hit[a].end(), 1));
    q.samples = samples;
    q.proportion = fraction(q.hits, samples);
    const Interval ci = wilson_interval(q.hits, samples);
    q.lower = ci.lower;
    q.upper = ci.upper;
    q.alpha = alphas[a];
    q.phi = phi;
    q.n = spec.n;
    out.push_back(q);
  }
  return out;
}

ThresholdEstimate locate_threshold(const ModelSpec& spec, double phi, double tolerance,
                                   std::size_t samples, Seed seed, double alpha_max,
                                   const ExperimentOptions& options) {
  require_phi(phi);
  require_samples(samples);
  if (!(tolerance > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tolerance must be positive");
  if (!(alpha_max > 0.0)) throw Error(ErrorKind::kInvalidArgument, "alpha_max must be positive");
  std::vector<std::optional<CoupledSample>> pool(samples);
  parallel_for(samples, options.jobs,
               [&](std::size_t i) { pool[i].emplace(spec, alpha_max, sample_seed(seed, i)); });

  auto q_at = [&](double alpha) {
    std::vector<std::uint8_t> hit(samples, 0);
    parallel_for(samples, options.jobs, [&](std::size_t i) {
      hit[i] = below_exponent(count_for(pool[i]->at(alpha), options), spec.n, phi) ? 1 : 0;
    });
    return fraction(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)), samples);
  };

  ThresholdEstimate t;
  t.tolerance = tolerance;
  t.phi = phi;
  t.n = spec.n;
  t.samples = samples;
  t.alpha_lo = 0.0;
  t.alpha_hi = alpha_max;
  t.q_lo = q_at(0.0);
  t.q_hi = q_at(alpha_max);
  if (!(t.q_lo < 0.5)) {
    throw Error(ErrorKind::kNoCrossing, "empirical Q is already >= 1/2 at alpha = 0");
  }
  if (!(t.q_hi > 0.5)) {
    throw Error(ErrorKind::kNoCrossing, "empirical Q does not exceed 1/2 at alpha_max = " +
                                            std::to_string(alpha_max));
  }
  while (t.alpha_hi - t.alpha_lo > tolerance) {
    const double mid = 0.5 * (t.alpha_lo + t.alpha_hi);
    const double q = q_at(mid);
    if (q < 0.5) {
      t.alpha_lo = mid;
      t.q_lo = q;
    } else {
      t.alpha_hi = mid;
      t.q_hi = q;
    }
    ++t.iterations;
  }
  t.alpha_hat = 0.5 * (t.alpha_lo + t.alpha_hi);
  return t;
}

TransitionWindow transition_window(const ModelSpec& spec, double phi, std::size_t samples, Seed seed,
                                   double alpha_max, double lower_level, double upper_level,
                                   const ExperimentOptions& options) {
  require_phi(phi);
  require_samples(samples);
  if (!(lower_level > 0.0 && lower_level < upper_level && upper_level < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "window levels must satisfy 0 < lower < upper < 1");
  }
  constexpr double kNever = std::numeric_limits<double>::infinity();
  TransitionWindow w;
  w.lower_level = lower_level;
  w.upper_level = upper_level;
  w.crossings.assign(samples, kNever);
  parallel_for(samples, options.jobs, [&](std::size_t i) {
    const CoupledSample coupled(spec, alpha_max, sample_seed(seed, i));
    const auto arrivals = coupled.arrivals();
    auto below = [&](std::size_t m) {
      return below_exponent(count_for(coupled.first(m), options), spec.n, phi);
    };
    if (arrivals.empty() || !below(arrivals.size())) return;
    std::size_t lo = 0;  // not below
    std::size_t hi = arrivals.size();
    if (below(0)) {
      w.crossings[i] = 0.0;
      return;
    }
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      (below(mid) ? hi : lo) = mid;
    }
    w.crossings[i] = arrivals[hi - 1].alpha;
  });
  std::sort(w.crossings.begin(), w.crossings.end());
  const double s = static_cast<double>(samples);
  const auto first_at_least =
      static_cast<std::size_t>(std::max(1.0, std::ceil(lower_level * s - 1e-9))) - 1;
  const auto first_above = std::min(samples - 1, static_cast<std::size_t>(std::floor(upper_level * s + 1e-9)));
  w.alpha_lower = w.crossings[first_at_least];
  w.alpha_upper = w.crossings[first_above];
  if (!std::isfinite(w.alpha_upper)) {
    throw Error(ErrorKind::kNoCrossing, "too few samples cross below 2^(n phi) by alpha_max");
  }
  w.width = w.alpha_upper - w.alpha_lower;
  return w;
}

double expected_log_preimages(std::size_t n, std::span<const Edge> edges, const Predicate& chi) {
  std::size_t words = 0;
  const auto sig = output_signatures(n, edges, chi, words);
  std::size_t classes = 0;
  const auto id = classes_of(sig, words, classes);
  std::vector<double> size(classes, 0.0);
  for (std::size_t c : id) size[c] += 1.0;
  std::vector<double> terms(classes);
  for (std::size_t c = 0; c < classes; ++c) terms[c] = xlog2x(size[c]);
  return compensated_sum(terms) / static_cast<double>(std::size_t{1} << n);
}

AzumaReport azuma_increment_check(std::size_t n, int k, const PredicatePtr& chi, std::size_t trials,
                                  Seed seed, const AzumaOptions& options) {
  if (!chi || chi->arity() != k) throw Error(ErrorKind::kInvalidArgument, "predicate arity must equal k");
  if (n < static_cast<std::size_t>(k)) throw Error(ErrorKind::kInvalidArgument, "n must be at least k");
  if (n > options.exact_cap) {
    throw Error(ErrorKind::kResourceLimit, "n = " + std::to_string(n) + " exceeds the exact-expectation cap of " +
                                               std::to_string(options.exact_cap));
  }
  const auto max_edges = static_cast<std::size_t>(std::llround(options.edges_per_var * static_cast<double>(n)));
  AzumaReport report;
  report.trials.resize(trials);
  parallel_for(trials, options.jobs, [&](std::size_t t) {
    Engine eng = make_engine(sample_seed(seed, t));
    const std::size_t m = static_cast<std::size_t>(uniform_below(eng, max_edges + 1));
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < m; ++i) edges.push_back(random_ordered_edge(n, k, eng));
    const Edge extra = random_ordered_edge(n, k, eng);

    std::size_t words = 0;
    const auto sig = output_signatures(n, edges, *chi, words);
    std::size_t classes = 0;
    const auto id = classes_of(sig, words, classes);
    std::vector<double> zero(classes, 0.0), one(classes, 0.0);
    for (std::size_t x = 0; x < id.size(); ++x) {
      const bool bit = (*chi)(Assignment::from_word(x, n).restrict_to(extra));
      (bit ? one : zero)[id[x]] += 1.0;
    }
    std::vector<double> before(classes), after(classes), split(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      const double whole = zero[c] + one[c];
      before[c] = xlog2x(whole);
      after[c] = xlog2x(zero[c]) + xlog2x(one[c]);
      split[c] = (zero[c] > 0.0 && one[c] > 0.0) ? before[c] - after[c] : 0.0;
    }
    const double inputs = static_cast<double>(std::size_t{1} << n);
    AzumaTrial& trial = report.trials[t];
    trial.edges = m;
    trial.before = compensated_sum(before) / inputs;
    trial.after = compensated_sum(after) / inputs;
    trial.increment = compensated_sum(split) / inputs;
  });
  report.min_increment = std::numeric_limits<double>::infinity();
  report.max_increment = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const double inc = report.trials[t].increment;
    report.min_increment = std::min(report.min_increment, inc);
    report.max_increment = std::max(report.max_increment, inc);
    if (inc < -kAzumaSlack || inc > 1.0 + kAzumaSlack) report.violations.push_back(t);
  }
  if (trials == 0) report.min_increment = report.max_increment = 0.0;
  return report;
}

VarianceSplit variance_split(const ModelSpec& spec, std::size_t graph_samples, std::size_t plant_samples,
                             Seed seed, const ExperimentOptions& options, bool vary_plant) {
  require_planted(spec, "variance split");
  if (spec.family == Family::kGold) {
    throw Error(ErrorKind::kUnsupportedFamily, "variance split covers sat, naesat and xorsat");
  }
  if (plant_samples < 2) throw Error(ErrorKind::kInvalidArgument, "plant_samples must be at least 2");
  require_samples(graph_samples);
  validate_spec(spec);
  VarianceSplit out;
  out.graph_samples = graph_samples;
  out.plant_samples = plant_samples;
  out.phi.assign(graph_samples, std::vector<double>(plant_samples, 0.0));
  parallel_for(graph_samples * plant_samples, options.jobs, [&](std::size_t idx) {
    const std::size_t g = idx / plant_samples;
    const std::size_t j = vary_plant ? idx % plant_samples : 0;
    Engine plant_eng = make_engine(derive_seed(seed, {g, j, kPlantStream}));
    ModelSpec fixed = spec;
    fixed.plant_mode = PlantMode::kFixed;
    Assignment v0(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) v0.set(i, coin(plant_eng));
    fixed.fixed_plant = std::move(v0);
    const CountResult c = count_for(sample(fixed, sample_seed(seed, g)), options);
    out.phi[g][idx % plant_samples] = c.log2_z / static_cast<double>(spec.n);
  });
  std::vector<double> all;
  std::vector<double> graph_means(graph_samples);
  std::vector<double> graph_spreads(graph_samples);
  for (std::size_t g = 0; g < graph_samples; ++g) {
    all.insert(all.end(), out.phi[g].begin(), out.phi[g].end());
    graph_means[g] = mean_of(out.phi[g]);
    graph_spreads[g] = spread(out.phi[g], graph_means[g]);
  }
  const double grand = mean_of(all);
  out.total = spread(all, grand);
  out.between = spread(graph_means, grand);
  out.within = mean_of(graph_spreads);
  return out;
}

}  // namespace csplab
