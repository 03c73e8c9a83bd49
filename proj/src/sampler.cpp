#include "csplab/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

#include "csplab/error.hpp"

namespace csplab {

namespace {

constexpr std::uint64_t kCountLimit = std::uint64_t{1} << 62;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  if (product > kCountLimit) {
    throw Error(ErrorKind::kResourceLimit, "candidate clause count exceeds 2^62");
  }
  return static_cast<std::uint64_t>(product);
}

std::uint64_t factorial(int k) {
  std::uint64_t f = 1;
  for (int i = 2; i <= k; ++i) f = checked_mul(f, static_cast<std::uint64_t>(i));
  return f;
}

/// The `index`-th permutation (lexicographic) of the sorted edge.
Edge nth_ordering(const Edge& sorted, std::uint64_t index) {
  std::vector<Var> pool = sorted.vars;
  Edge out;
  out.vars.reserve(pool.size());
  std::uint64_t block = factorial(static_cast<int>(pool.size()));
  while (!pool.empty()) {
    block /= pool.size();
    const std::size_t pick = static_cast<std::size_t>(index / block);
    index %= block;
    out.vars.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

/// Maps candidate ranks onto clauses for one (family, n, k, plant) setting.
class CandidateDecoder {
 public:
  CandidateDecoder(const ModelSpec& spec, const std::optional<Assignment>& plant)
      : space_(candidate_space(spec.family, spec.n, spec.k)),
        predicate_(spec.predicate),
        plant_(plant) {}

  std::uint64_t size() const noexcept {
    return plant_ ? space_.eligible_total() : space_.total;
  }

  Clause decode(std::uint64_t rank) const {
    const std::uint64_t per_edge = plant_ ? space_.eligible_per_edge : space_.payloads_per_edge;
    Edge edge = unrank_combination(rank / per_edge, space_.n, space_.k);
    const std::uint64_t j = rank % per_edge;
    const int k = space_.k;
    switch (space_.family) {
      case Family::kSat: {
        std::uint32_t pattern = static_cast<std::uint32_t>(j);
        if (plant_) {
          const std::uint32_t y = plant_->restrict_to(edge);
          if (pattern >= y) ++pattern;
        }
        return Clause{std::move(edge), SatForbidden{pattern}};
      }
      case Family::kNaeSat: {
        std::uint32_t pattern = static_cast<std::uint32_t>(j);
        if (plant_) {
          const std::uint32_t y = NaeForbidden::canonical(plant_->restrict_to(edge), k).pattern;
          if (pattern >= y) ++pattern;
        }
        return Clause{std::move(edge), NaeForbidden{pattern}};
      }
      case Family::kXorSat: {
        bool bit = j != 0;
        if (plant_) bit = (std::popcount(plant_->restrict_to(edge)) & 1) != 0;
        return Clause{std::move(edge), XorTarget{bit}};
      }
      case Family::kGold: {
        Edge ordered = nth_ordering(edge, j);
        const bool bit = (*predicate_)(plant_->restrict_to(ordered));
        return Clause{std::move(ordered), GoldTarget{predicate_, bit}};
      }
    }
    throw Error(ErrorKind::kUnsupportedFamily, "unknown family");
  }

 private:
  CandidateSpace space_;
  PredicatePtr predicate_;
  const std::optional<Assignment>& plant_;
};

std::optional<Assignment> draw_plant(const ModelSpec& spec, Seed seed) {
  switch (spec.plant_mode) {
    case PlantMode::kUnplanted: return std::nullopt;
    case PlantMode::kFixed: return spec.fixed_plant;
    case PlantMode::kRandom: {
      Engine eng = make_engine(derive_seed(seed, {kPlantStream}));
      Assignment v0(spec.n);
      for (std::size_t i = 0; i < spec.n; ++i) v0.set(i, coin(eng));
      return v0;
    }
  }
  return std::nullopt;
}

std::uint64_t uniform_clause_count(const ModelSpec& spec) {
  const double target = spec.alpha * static_cast<double>(spec.n);
  const double nearest = std::round(target);
  if (std::abs(target - nearest) < 1e-9) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::floor(target));
}

Model model_for(const ModelSpec& spec) {
  if (spec.plant_mode == PlantMode::kUnplanted) return Model::kUnplanted;
  return spec.scheme == Scheme::kUniform ? Model::kUniform : Model::kBinomial;
}

}  // namespace

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > kCountLimit) {
      throw Error(ErrorKind::kResourceLimit, "binomial coefficient exceeds 2^62");
    }
  }
  return static_cast<std::uint64_t>(result);
}

Edge unrank_combination(std::uint64_t rank, std::size_t n, int k) {
  Edge edge;
  edge.vars.reserve(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (int slot = 0; slot < k; ++slot) {
    const std::size_t remaining = static_cast<std::size_t>(k - slot - 1);
    for (std::size_t v = next; v < n; ++v) {
      const std::uint64_t block = binomial(n - v - 1, remaining);
      if (rank < block) {
        edge.vars.push_back(static_cast<Var>(v));
        next = v + 1;
        break;
      }
      rank -= block;
    }
  }
  if (edge.size() != k) throw Error(ErrorKind::kInvalidArgument, "combination rank out of range");
  return edge;
}

std::uint64_t CandidateSpace::planted_multiplicity() const noexcept {
  return family == Family::kGold ? 1 : eligible_per_edge;
}

CandidateSpace candidate_space(Family family, std::size_t n, int k) {
  if (k < 1 || k > kMaxArity) throw Error(ErrorKind::kInvalidArgument, "k must be in [1, 16]");
  CandidateSpace space{family, n, k, binomial(n, static_cast<std::size_t>(k)), 0, 0, 0};
  const std::uint64_t cube = std::uint64_t{1} << k;
  switch (family) {
    case Family::kSat:
      space.payloads_per_edge = cube;
      space.eligible_per_edge = cube - 1;
      break;
    case Family::kNaeSat:
      space.payloads_per_edge = cube / 2;
      space.eligible_per_edge = cube / 2 - 1;
      break;
    case Family::kXorSat:
      space.payloads_per_edge = 2;
      space.eligible_per_edge = 1;
      break;
    case Family::kGold:
      space.payloads_per_edge = factorial(k);
      space.eligible_per_edge = space.payloads_per_edge;
      break;
  }
  space.total = checked_mul(space.edges, space.payloads_per_edge);
  return space;
}

void validate_spec(const ModelSpec& spec) {
  if (spec.k < 1 || spec.k > kMaxArity) {
    throw Error(ErrorKind::kInvalidArgument, "k must be in [1, 16]");
  }
  if (spec.n < static_cast<std::size_t>(spec.k)) {
    throw Error(ErrorKind::kInvalidArgument, "n must be at least k");
  }
  if (!std::isfinite(spec.alpha) || spec.alpha < 0.0) {
    throw Error(ErrorKind::kDensityOutOfRange, "alpha must be a finite non-negative number");
  }
  if (spec.family == Family::kGold) {
    if (!spec.predicate) throw Error(ErrorKind::kInvalidArgument, "gold family requires a predicate");
    if (spec.predicate->arity() != spec.k) {
      throw Error(ErrorKind::kInvalidArgument, "predicate arity must equal k");
    }
    if (spec.plant_mode == PlantMode::kUnplanted) {
      throw Error(ErrorKind::kUnsupportedFamily, "the gold model is defined only with a plant");
    }
  }
  if (spec.plant_mode == PlantMode::kFixed) {
    if (!spec.fixed_plant) throw Error(ErrorKind::kInvalidArgument, "fixed plant mode without a plant");
    if (spec.fixed_plant->size() != spec.n) {
      throw Error(ErrorKind::kDimension, "fixed plant length differs from n");
    }
  }
}

double inclusion_probability(const ModelSpec& spec) {
  validate_spec(spec);
  const CandidateSpace space = candidate_space(spec.family, spec.n, spec.k);
  const double p = spec.alpha * static_cast<double>(spec.n) / static_cast<double>(space.total);
  if (p > 1.0 + 1e-12) {
    throw Error(ErrorKind::kDensityOutOfRange,
                "alpha = " + std::to_string(spec.alpha) + " exceeds N/n = " +
                    std::to_string(static_cast<double>(space.total) / static_cast<double>(spec.n)));
  }
  return std::min(p, 1.0);
}

std::vector<Clause> enumerate_candidates(Family family, std::size_t n, int k,
                                         const PredicatePtr& predicate,
                                         const std::optional<Assignment>& plant) {
  ModelSpec spec;
  spec.family = family;
  spec.n = n;
  spec.k = k;
  spec.predicate = predicate;
  if (family == Family::kGold && !plant) {
    throw Error(ErrorKind::kUnsupportedFamily, "gold candidates are enumerated against a plant");
  }
  CandidateDecoder decoder(spec, plant);
  std::vector<Clause> out;
  out.reserve(decoder.size());
  for (std::uint64_t r = 0; r < decoder.size(); ++r) out.push_back(decoder.decode(r));
  return out;
}

CoupledSample::CoupledSample(const ModelSpec& spec, double alpha_max, Seed seed)
    : spec_(spec), alpha_max_(alpha_max) {
  spec_.alpha = alpha_max;
  validate_spec(spec_);
  planted_ = draw_plant(spec_, seed);
  CandidateDecoder decoder(spec_, planted_);
  Engine eng = make_engine(derive_seed(seed, {kClauseStream}));
  const std::uint64_t population = decoder.size();

  if (spec_.scheme == Scheme::kUniform) {
    const std::uint64_t m = uniform_clause_count(spec_);
    if (m > population) {
      throw Error(ErrorKind::kDensityOutOfRange,
                  "alpha n = " + std::to_string(m) + " exceeds the " + std::to_string(population) +
                      " eligible clauses");
    }
    // Floyd's algorithm, then a shuffle to fix the arrival order.
    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::uint64_t> ranks;
    ranks.reserve(m);
    for (std::uint64_t j = population - m; j < population; ++j) {
      const std::uint64_t t = uniform_below(eng, j + 1);
      const std::uint64_t pick = chosen.contains(t) ? j : t;
      chosen.insert(pick);
      ranks.push_back(pick);
    }
    for (std::size_t i = ranks.size(); i > 1; --i) {
      std::swap(ranks[i - 1], ranks[uniform_below(eng, i)]);
    }
    std::vector<std::size_t> order(ranks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
    for (std::size_t idx : order) {
      clauses_.push_back(decoder.decode(ranks[idx]));
      variates_.push_back(static_cast<double>(idx));
    }
    density_scale_ = 1.0 / static_cast<double>(spec_.n);
    return;
  }
  const double p = inclusion_probability(spec_);
  const CandidateSpace space = candidate_space(spec_.family, spec_.n, spec_.k);
  density_scale_ = static_cast<double>(space.total) / static_cast<double>(spec_.n);
  if (p <= 0.0) return;
  // Geometric skipping over candidate ranks; each kept candidate receives a
  // variate uniform on [0, p), which is its conditional law given u < p.
  const double log_q = std::log1p(-p);
  std::uint64_t next = 0;
  while (next < population) {
    if (p < 1.0) {
      const double gap = std::floor(std::log(uniform01_open_low(eng)) / log_q);
      if (gap >= static_cast<double>(population - next)) break;
      next += static_cast<std::uint64_t>(gap);
    }
    clauses_.push_back(decoder.decode(next));
    variates_.push_back(p * uniform01(eng));
    ++next;
  }
}

double CoupledSample::threshold_for(double alpha) const {
  if (spec_.scheme == Scheme::kUniform) {
    ModelSpec s = spec_;
    s.alpha = alpha;
    return static_cast<double>(uniform_clause_count(s));
  }
  return alpha / density_scale_;
}

Formula CoupledSample::shell() const {
  Formula f;
  f.n = spec_.n;
  f.k = spec_.k;
  f.family = spec_.family;
  f.model = model_for(spec_);
  f.planted = planted_;
  return f;
}

Formula CoupledSample::at(double alpha) const {
  if (!(alpha >= 0.0) || alpha > alpha_max_) {
    throw Error(ErrorKind::kDensityOutOfRange, "alpha outside [0, alpha_max] of the coupled sample");
  }
  Formula f = shell();
  const bool all = alpha >= alpha_max_;
  const double cut = threshold_for(alpha);
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (all || variates_[i] < cut) f.clauses.push_back(clauses_[i]);
  }
  return f;
}

std::vector<CoupledSample::Arrival> CoupledSample::arrivals() const {
  std::vector<Arrival> out;
  out.reserve(clauses_.size());
  const bool uniform = spec_.scheme == Scheme::kUniform;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const double alpha = uniform ? (variates_[i] + 1.0) * density_scale_ : variates_[i] * density_scale_;
    out.push_back(Arrival{alpha, i});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Arrival& a, const Arrival& b) { return a.alpha < b.alpha; });
  return out;
}

Formula CoupledSample::first(std::size_t count) const {
  const auto order = arrivals();
  count = std::min(count, order.size());
  std::vector<std::size_t> keep;
  keep.reserve(count);
  for (std::size_t i = 0; i < count; ++i) keep.push_back(order[i].clause);
  std::sort(keep.begin(), keep.end());
  Formula f = shell();
  for (std::size_t idx : keep) f.clauses.push_back(clauses_[idx]);
  return f;
}

std::vector<Formula> coupled_chain(const ModelSpec& spec, std::span<const double> alphas, Seed seed) {
  if (alphas.empty()) throw Error(ErrorKind::kInvalidArgument, "coupled chain needs at least one alpha");
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] > alphas[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument, "alphas must be strictly increasing");
    }
  }
  CoupledSample sample(spec, alphas.back(), seed);
  std::vector<Formula> chain;
  chain.reserve(alphas.size());
  for (double a : alphas) chain.push_back(sample.at(a));
  return chain;
}

Formula sample_planted(const ModelSpec& spec, Seed seed) {
  if (spec.family == Family::kGold) return sample_planted_gold(spec, seed);
  if (spec.plant_mode == PlantMode::kUnplanted) {
    throw Error(ErrorKind::kInvalidArgument, "sample_planted requires a random or fixed plant");
  }
  ModelSpec s = spec;
  s.scheme = Scheme::kBinomial;
  return CoupledSample(s, s.alpha, seed).at(s.alpha);
}

Formula sample_planted_gold(const ModelSpec& spec, Seed seed) {
  if (spec.family != Family::kGold) {
    throw Error(ErrorKind::kUnsupportedFamily, "sample_planted_gold requires the gold family");
  }
  ModelSpec s = spec;
  s.scheme = Scheme::kBinomial;
  return CoupledSample(s, s.alpha, seed).at(s.alpha);
}

Formula sample_unplanted(const ModelSpec& spec, Seed seed) {
  ModelSpec s = spec;
  s.plant_mode = PlantMode::kUnplanted;
  s.scheme = Scheme::kBinomial;
  return CoupledSample(s, s.alpha, seed).at(s.alpha);
}

Formula sample_uniform(const ModelSpec& spec, Seed seed) {
  ModelSpec s = spec;
  s.scheme = Scheme::kUniform;
  return CoupledSample(s, s.alpha, seed).at(s.alpha);
}

Formula sample(const ModelSpec& spec, Seed seed) {
  return CoupledSample(spec, spec.alpha, seed).at(spec.alpha);
}

}  // namespace csplab
