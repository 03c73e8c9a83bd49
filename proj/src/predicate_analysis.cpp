#include "csplab/predicate_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "csplab/error.hpp"
#include "csplab/parallel.hpp"

namespace csplab {

bool is_balanced(const Predicate& chi) { return 2 * chi.ones() == chi.size(); }

bool is_antisymmetric(const Predicate& chi) {
  const std::uint32_t mask = full_mask(chi.arity());
  for (std::uint32_t x = 0; x < chi.size(); ++x) {
    if (chi(x) == chi(~x & mask)) return false;
  }
  return true;
}

Rational correlation(const Predicate& chi, std::span<const int> positions) {
  if (positions.empty() || positions.size() > 2) {
    throw Error(ErrorKind::kInvalidArgument, "correlation takes one or two input positions");
  }
  const int k = chi.arity();
  std::uint32_t selector = 0;
  for (int p : positions) {
    if (p < 0 || p >= k) throw Error(ErrorKind::kInvalidArgument, "input position out of range");
    selector |= 1U << (k - 1 - p);
  }
  if (std::popcount(selector) != static_cast<int>(positions.size())) {
    throw Error(ErrorKind::kInvalidArgument, "correlation positions must be distinct");
  }
  std::int64_t sum = 0;
  for (std::uint32_t x = 0; x < chi.size(); ++x) {
    const int exponent = (chi(x) ? 1 : 0) ^ (std::popcount(x & selector) & 1);
    sum += exponent ? -1 : 1;
  }
  std::int64_t den = static_cast<std::int64_t>(chi.size());
  const std::int64_t g = std::gcd(sum, den);
  return Rational{sum / g, den / g};
}

bool uncorrelated_with_bits(const Predicate& chi, int max_order) {
  const int k = chi.arity();
  for (int i = 0; i < k; ++i) {
    const int single[] = {i};
    if (correlation(chi, single).num != 0) return false;
    if (max_order < 2) continue;
    for (int j = i + 1; j < k; ++j) {
      const int pair[] = {i, j};
      if (correlation(chi, pair).num != 0) return false;
    }
  }
  return true;
}

TupleMeasure::TupleMeasure(int ell, std::vector<double> weights) : ell_(ell), weights_(std::move(weights)) {
  if (ell < 1 || ell > 8) throw Error(ErrorKind::kInvalidArgument, "ell must be in [1, 8]");
  if (weights_.size() != (std::size_t{1} << ell)) {
    throw Error(ErrorKind::kInvalidArgument, "tuple measure needs 2^ell weights");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "tuple measure weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > kMeasureTolerance) {
    throw Error(ErrorKind::kInvalidArgument, "tuple measure weights must sum to 1");
  }
}

TupleMeasure TupleMeasure::uniform(int ell) {
  const std::size_t size = std::size_t{1} << ell;
  return TupleMeasure(ell, std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

TupleMeasure TupleMeasure::point(int ell, std::uint32_t tuple) {
  std::vector<double> w(std::size_t{1} << ell, 0.0);
  w.at(tuple) = 1.0;
  return TupleMeasure(ell, std::move(w));
}

TupleMeasure TupleMeasure::random(int ell, Engine& eng) {
  std::vector<double> w(std::size_t{1} << ell);
  double total = 0.0;
  for (double& x : w) {
    x = exponential(eng);
    total += x;
  }
  for (double& x : w) x /= total;
  return TupleMeasure(ell, std::move(w));
}

GammaEvaluator::GammaEvaluator(const Predicate& chi, int ell) : k_(chi.arity()), ell_(ell) {
  if (ell < 1 || ell > 8) throw Error(ErrorKind::kInvalidArgument, "ell must be in [1, 8]");
  if (static_cast<long>(k_) * ell > 26) {
    throw Error(ErrorKind::kResourceLimit, "k * ell above 26 makes Gamma enumeration too large");
  }
  std::map<std::vector<std::uint8_t>, std::uint64_t> merged;
  std::vector<std::uint32_t> level_sets[2];
  for (std::uint32_t x = 0; x < chi.size(); ++x) level_sets[chi(x) ? 1 : 0].push_back(x);

  std::vector<std::uint8_t> columns(static_cast<std::size_t>(k_));
  for (const auto& level : level_sets) {
    if (level.empty()) continue;
    std::vector<std::size_t> pick(static_cast<std::size_t>(ell), 0);
    while (true) {
      for (int i = 0; i < k_; ++i) {
        std::uint8_t column = 0;
        for (int r = 0; r < ell; ++r) {
          column = static_cast<std::uint8_t>((column << 1) |
                                             (pattern_bit(level[pick[static_cast<std::size_t>(r)]], k_, i) ? 1 : 0));
        }
        columns[static_cast<std::size_t>(i)] = column;
      }
      std::vector<std::uint8_t> key = columns;
      std::sort(key.begin(), key.end());
      ++merged[key];
      std::size_t r = 0;
      while (r < pick.size() && ++pick[r] == level.size()) pick[r++] = 0;
      if (r == pick.size()) break;
    }
  }
  coefficients_.reserve(merged.size());
  columns_.reserve(merged.size() * static_cast<std::size_t>(k_));
  for (const auto& [key, count] : merged) {
    coefficients_.push_back(0.5 * static_cast<double>(count));
    columns_.insert(columns_.end(), key.begin(), key.end());
  }
}

double GammaEvaluator::operator()(std::span<const double> weights) const {
  if (weights.size() != (std::size_t{1} << ell_)) {
    throw Error(ErrorKind::kInvalidArgument, "measure dimension does not match ell");
  }
  double total = 0.0;
  const std::uint8_t* col = columns_.data();
  for (double c : coefficients_) {
    double term = c;
    for (int i = 0; i < k_; ++i) term *= weights[*col++];
    total += term;
  }
  return total;
}

double GammaEvaluator::operator()(const TupleMeasure& nu) const {
  if (nu.ell() != ell_) throw Error(ErrorKind::kInvalidArgument, "measure ell does not match evaluator");
  return (*this)(nu.weights());
}

double gamma_ell(const Predicate& chi, int ell, const TupleMeasure& nu) {
  if (nu.ell() != ell) throw Error(ErrorKind::kInvalidArgument, "measure ell does not match ell");
  return GammaEvaluator(chi, ell)(nu);
}

ConvexityWitness make_witness(const GammaEvaluator& gamma, TupleMeasure a, TupleMeasure b, double lambda) {
  std::vector<double> mix(a.weights().size());
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix[i] = lambda * a.weights()[i] + (1.0 - lambda) * b.weights()[i];
  }
  const double lhs = gamma(mix);
  const double rhs = lambda * gamma(a) + (1.0 - lambda) * gamma(b);
  return ConvexityWitness{gamma.ell(), std::move(a), std::move(b), lambda, lhs, rhs, lhs - rhs};
}

bool verify_witness(const Predicate& chi, const ConvexityWitness& w, double tolerance) {
  if (!(w.lambda > 0.0 && w.lambda < 1.0)) return false;
  const GammaEvaluator gamma(chi, w.ell);
  const ConvexityWitness again = make_witness(gamma, w.nu_a, w.nu_b, w.lambda);
  return again.margin > tolerance && std::abs(again.lhs - w.lhs) <= 1e-10 &&
         std::abs(again.rhs - w.rhs) <= 1e-10;
}

namespace {

/// Clamps round-off negatives and renormalizes onto the simplex.
TupleMeasure to_measure(int ell, std::vector<double> w) {
  double total = 0.0;
  for (double& x : w) {
    x = std::max(x, 0.0);
    total += x;
  }
  for (double& x : w) x /= total;
  return TupleMeasure(ell, std::move(w));
}

/// Orthonormal basis of the zero-sum hyperplane in R^d (Helmert vectors).
std::vector<std::vector<double>> tangent_basis(std::size_t d) {
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 1; j < d; ++j) {
    std::vector<double> q(d, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(j * (j + 1)));
    for (std::size_t i = 0; i < j; ++i) q[i] = scale;
    q[j] = -static_cast<double>(j) * scale;
    basis.push_back(std::move(q));
  }
  return basis;
}

std::optional<ConvexityWitness> search_random_pairs(const GammaEvaluator& gamma, std::size_t pairs,
                                                    Engine& eng) {
  static constexpr double kRefineBand = 1e-4;
  static constexpr double kLambdas[] = {0.25, 0.75, 0.1, 0.9};
  for (std::size_t t = 0; t < pairs; ++t) {
    TupleMeasure a = TupleMeasure::random(gamma.ell(), eng);
    TupleMeasure b = TupleMeasure::random(gamma.ell(), eng);
    ConvexityWitness w = make_witness(gamma, a, b, 0.5);
    if (w.margin > kWitnessTolerance) return w;
    if (w.margin > -kRefineBand) {
      for (double lambda : kLambdas) {
        ConvexityWitness refined = make_witness(gamma, a, b, lambda);
        if (refined.margin > kWitnessTolerance) return refined;
      }
    }
  }
  return std::nullopt;
}

std::optional<ConvexityWitness> search_hessian(const GammaEvaluator& gamma, std::size_t points,
                                               Engine& eng) {
  static constexpr double kStep = 1e-4;
  const int ell = gamma.ell();
  const std::size_t d = std::size_t{1} << ell;
  const auto basis = tangent_basis(d);
  const std::size_t m = basis.size();
  std::vector<double> probe(d);
  auto eval_at = [&](const std::vector<double>& base, double s, std::size_t i, double t, std::size_t j) {
    for (std::size_t c = 0; c < d; ++c) probe[c] = base[c] + s * basis[i][c] + t * basis[j][c];
    return gamma(probe);
  };

  for (std::size_t p = 0; p < points; ++p) {
    const TupleMeasure nu = TupleMeasure::random(ell, eng);
    const std::vector<double> base(nu.weights().begin(), nu.weights().end());
    const double center = gamma(base);
    Eigen::MatrixXd hessian(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const double plus = eval_at(base, kStep, i, 0.0, i);
      const double minus = eval_at(base, -kStep, i, 0.0, i);
      hessian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
          (plus - 2.0 * center + minus) / (kStep * kStep);
      for (std::size_t j = i + 1; j < m; ++j) {
        const double pp = eval_at(base, kStep, i, kStep, j);
        const double pm = eval_at(base, kStep, i, -kStep, j);
        const double mp = eval_at(base, -kStep, i, kStep, j);
        const double mm = eval_at(base, -kStep, i, -kStep, j);
        const double value = (pp - pm - mp + mm) / (4.0 * kStep * kStep);
        hessian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
        hessian(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
    if (solver.info() != Eigen::Success || solver.eigenvalues()(0) >= 0.0) continue;
    const Eigen::VectorXd coords = solver.eigenvectors().col(0);
    std::vector<double> direction(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t c = 0; c < d; ++c) direction[c] += coords(static_cast<Eigen::Index>(i)) * basis[i][c];
    }
    double reach = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < d; ++c) {
      if (std::abs(direction[c]) > 1e-15) reach = std::min(reach, base[c] / std::abs(direction[c]));
    }
    if (!std::isfinite(reach) || reach <= 0.0) continue;
    for (double t = reach; t > reach * 1e-3; t *= 0.5) {
      std::vector<double> a(d), b(d);
      for (std::size_t c = 0; c < d; ++c) {
        a[c] = base[c] + t * direction[c];
        b[c] = base[c] - t * direction[c];
      }
      ConvexityWitness w = make_witness(gamma, to_measure(ell, a), to_measure(ell, b), 0.5);
      if (w.margin > kWitnessTolerance) return w;
    }
  }
  return std::nullopt;
}

std::uint64_t table_key(const Predicate& chi) {
  std::uint64_t key = static_cast<std::uint64_t>(chi.arity()) << 58;
  for (std::size_t i = 0; i < chi.size() && i < 58; ++i) {
    if (chi(static_cast<std::uint32_t>(i))) key |= std::uint64_t{1} << i;
  }
  return key;
}

}  // namespace

std::optional<ConvexityWitness> falsify_convexity(const Predicate& chi, int ell,
                                                  const SearchBudget& budget, Seed seed) {
  const GammaEvaluator gamma(chi, ell);
  Engine eng = make_engine(derive_seed(seed, {table_key(chi), static_cast<std::uint64_t>(ell)}));
  if (auto w = search_random_pairs(gamma, budget.random_pairs, eng)) return w;
  return search_hessian(gamma, budget.hessian_points, eng);
}

std::vector<Predicate> enumerate_antisymmetric(int k) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "k must be positive");
  if (k > 5) {
    throw Error(ErrorKind::kResourceLimit, "antisymmetric enumeration is limited to k <= 5");
  }
  const std::uint32_t half = 1U << (k - 1);
  const std::uint32_t mask = full_mask(k);
  const std::uint64_t count = std::uint64_t{1} << half;
  std::vector<Predicate> out;
  out.reserve(count);
  for (std::uint64_t choice = 0; choice < count; ++choice) {
    std::vector<std::uint8_t> table(std::size_t{1} << k);
    for (std::uint32_t x = 0; x < half; ++x) {
      const std::uint8_t value = (choice >> x) & 1U;
      table[x] = value;
      table[~x & mask] = value ^ 1U;
    }
    out.emplace_back(k, std::move(table));
  }
  return out;
}

std::string_view to_string(HStatus status) {
  return status == HStatus::kViolated ? "VIOLATED" : "UNRESOLVED";
}

std::size_t ScanReport::unresolved() const noexcept {
  return static_cast<std::size_t>(std::count_if(survivors.begin(), survivors.end(), [](const SurvivorResult& s) {
    return s.status == HStatus::kUnresolved;
  }));
}

ScanReport scan_predicates(int k, int max_ell, const SearchBudget& budget, Seed seed, int jobs) {
  if (max_ell < 1 || max_ell > 8) throw Error(ErrorKind::kInvalidArgument, "lmax must be in [1, 8]");
  const std::vector<Predicate> candidates = enumerate_antisymmetric(k);
  ScanReport report;
  report.k = k;
  report.max_ell = max_ell;
  report.seed = seed;
  report.budget = budget;
  report.candidates = candidates.size();
  std::vector<const Predicate*> filtered;
  for (const Predicate& chi : candidates) {
    if (!is_balanced(chi)) continue;
    ++report.balanced;
    if (!uncorrelated_with_bits(chi, 1)) continue;
    ++report.no_one_bit_correlation;
    if (k >= 2 && !uncorrelated_with_bits(chi, 2)) continue;
    ++report.no_two_bit_correlation;
    filtered.push_back(&chi);
  }
  std::vector<std::optional<SurvivorResult>> slots(filtered.size());
  parallel_for(filtered.size(), jobs, [&](std::size_t i) {
    SurvivorResult result{*filtered[i], HStatus::kUnresolved, std::nullopt};
    for (int ell = 2; ell <= max_ell; ++ell) {
      if (auto w = falsify_convexity(*filtered[i], ell, budget, seed)) {
        result.status = HStatus::kViolated;
        result.witness = std::move(w);
        break;
      }
    }
    slots[i] = std::move(result);
  });
  report.survivors.reserve(slots.size());
  for (auto& s : slots) report.survivors.push_back(std::move(*s));
  return report;
}

}  // namespace csplab
