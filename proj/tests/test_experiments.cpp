#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "csplab/error.hpp"
#include "csplab/experiments.hpp"
#include "support.hpp"

using namespace csplab;

namespace {

ModelSpec sat3(std::size_t n, double alpha, Family family = Family::kSat) {
  ModelSpec s;
  s.family = family;
  s.n = n;
  s.k = 3;
  s.alpha = alpha;
  if (family == Family::kGold) s.predicate = std::make_shared<const Predicate>(Predicate::parity(3));
  return s;
}

/// L(G) by direct evaluation of E_X log2 Z(X, G) over all inputs.
double reference_log_preimages(std::size_t n, const std::vector<Edge>& edges, const Predicate& chi) {
  std::map<std::vector<bool>, double> classes;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    std::vector<bool> out;
    for (const Edge& e : edges) {
      std::uint32_t input = 0;
      for (Var v : e.vars) input = (input << 1) | static_cast<std::uint32_t>(oracle::bit_of(x, v));
      out.push_back(chi(input));
    }
    classes[out] += 1.0;
  }
  double total = 0.0;
  for (const auto& [key, size] : classes) total += size * std::log2(size);
  return total / std::ldexp(1.0, static_cast<int>(n));
}

}  // namespace

TEST_CASE("compensated sum") {
  std::vector<double> v = {1e100, 1.0, -1e100};
  CHECK(compensated_sum(v) == 1.0);
  std::vector<double> tenth(10, 0.1);
  CHECK(compensated_sum(tenth) == 1.0);
}

TEST_CASE("wilson interval") {
  const Interval a = wilson_interval(0, 200);
  CHECK(a.lower == 0.0);
  CHECK(a.upper == doctest::Approx(0.018845).epsilon(1e-4));
  const Interval b = wilson_interval(100, 200);
  CHECK(b.lower == doctest::Approx(0.4313608596).epsilon(1e-9));
  CHECK(b.upper == doctest::Approx(0.5686391404).epsilon(1e-9));
  for (std::size_t h = 0; h <= 37; ++h) {
    const Interval c = wilson_interval(h, 37);
    const double p = static_cast<double>(h) / 37.0;
    CHECK(c.lower <= p);
    CHECK(p <= c.upper);
    CHECK(c.lower >= 0.0);
    CHECK(c.upper <= 1.0);
  }
}

TEST_CASE("psi at alpha = 0") {
  for (int family = 0; family < 4; ++family) {
    const EstimateResult e = estimate_psi(sat3(10, 0.0, static_cast<Family>(family)), 20, 1);
    CHECK(e.estimate == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.variance == 0.0);
  }
}

TEST_CASE("psi estimator arithmetic") {
  const ModelSpec s = sat3(12, 1.5);
  const EstimateResult e = estimate_psi(s, 30, 9);
  REQUIRE(e.values.size() == 30);
  double mean = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    const Formula f = sample(s, sample_seed(9, i));
    const double value = std::log2(static_cast<double>(oracle::count(f))) / 12.0;
    CHECK(e.values[i] == doctest::Approx(value).epsilon(1e-12));
    mean += value;
  }
  mean /= 30;
  CHECK(e.estimate == doctest::Approx(mean).epsilon(1e-12));
  double ss = 0.0;
  for (double v : e.values) ss += (v - mean) * (v - mean);
  CHECK(e.variance == doctest::Approx(ss / 29).epsilon(1e-9));
  CHECK(e.std_error == doctest::Approx(std::sqrt(ss / 29 / 30)).epsilon(1e-9));
}

TEST_CASE("psi rejects unplanted specs") {
  ModelSpec s = sat3(10, 1.0);
  s.plant_mode = PlantMode::kUnplanted;
  try {
    estimate_psi(s, 5, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnsupportedFamily);
  }
}

TEST_CASE("XORSAT psi by two counting routes") {
  const ModelSpec s = sat3(50, 0.4, Family::kXorSat);
  ExperimentOptions gf2;
  gf2.method = CountMethod::kGf2;
  ExperimentOptions components;
  components.method = CountMethod::kComponents;
  const EstimateResult a = estimate_psi(s, 30, 4, gf2);
  const EstimateResult b = estimate_psi(s, 30, 4, components);
  CHECK(a.values == b.values);
  CHECK(a.estimate == b.estimate);
}

TEST_CASE("psi is non-increasing along coupled densities per seed") {
  const std::vector<double> alphas = {0.5, 1.0, 2.0};
  for (Seed seed = 0; seed < 30; ++seed) {
    const auto chain = coupled_chain(sat3(16, 0.0), alphas, seed);
    double last = 2.0;
    for (const Formula& f : chain) {
      const double psi = count_auto(f).log2_z / 16.0;
      CHECK(psi <= last);
      last = psi;
    }
  }
}

TEST_CASE("Q_n properties") {
  CHECK(estimate_qn(sat3(10, 0.0), 0.5, 50, 1).proportion == 0.0);
  SUBCASE("monotone in phi on a fixed sample set") {
    double last = 0.0;
    for (double phi = 0.0; phi <= 1.0; phi += 0.05) {
      const QnEstimate q = estimate_qn(sat3(12, 2.0), phi, 100, 3);
      CHECK(q.proportion >= last);
      CHECK(q.lower <= q.proportion);
      CHECK(q.proportion <= q.upper);
      last = q.proportion;
    }
  }
  SUBCASE("monotone in alpha under coupling") {
    const std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
    const auto curve = qn_curve(sat3(12, 0.0), alphas, 0.5, 100, 2);
    REQUIRE(curve.size() == alphas.size());
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].hits >= curve[i - 1].hits);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      ModelSpec s = sat3(12, alphas[i]);
      CHECK(estimate_qn(s, 0.5, 100, 2, {}, 4.0).hits == curve[i].hits);
    }
  }
  SUBCASE("phi range") {
    for (double phi : {-0.1, 1.5}) {
      try {
        estimate_qn(sat3(10, 1.0), phi, 10, 1);
        FAIL("expected an error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kInvalidArgument);
      }
    }
  }
}

TEST_CASE("threshold bisection") {
  const ModelSpec s = sat3(12, 0.0);
  const ThresholdEstimate t = locate_threshold(s, 0.5, 0.02, 100, 7, 8.0);
  CHECK(t.alpha_hi - t.alpha_lo <= 0.02);
  CHECK(t.alpha_lo <= t.alpha_hat);
  CHECK(t.alpha_hat <= t.alpha_hi);
  CHECK(t.q_lo < 0.5);
  CHECK(t.q_hi >= 0.5);
  // Re-evaluate Q at the bracket ends on the same coupled set.
  const auto curve = qn_curve(s, std::vector<double>{t.alpha_lo, t.alpha_hi, 8.0}, 0.5, 100, 7);
  CHECK(curve[0].proportion == t.q_lo);
  CHECK(curve[1].proportion == t.q_hi);

  try {
    locate_threshold(s, 0.5, 0.02, 50, 7, 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNoCrossing);
  }
  try {
    // Planted Z >= 1 is never below 2^0, so Q stays at 0.
    locate_threshold(s, 0.0, 0.02, 50, 7, 4.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNoCrossing);
  }
}

TEST_CASE("transition window") {
  const ModelSpec s = sat3(12, 0.0);
  const TransitionWindow w = transition_window(s, 0.5, 100, 7, 8.0);
  CHECK(w.alpha_lower <= w.alpha_upper);
  CHECK(w.width == w.alpha_upper - w.alpha_lower);
  CHECK(std::is_sorted(w.crossings.begin(), w.crossings.end()));
  // Empirical Q read off the crossings matches a direct coupled evaluation.
  for (double alpha : {1.0, 2.5, 4.0}) {
    const auto hits = static_cast<std::size_t>(
        std::count_if(w.crossings.begin(), w.crossings.end(), [&](double c) { return c < alpha; }));
    CHECK(estimate_qn(sat3(12, alpha), 0.5, 100, 7, {}, 8.0).hits == hits);
  }
}

TEST_CASE("Azuma increments") {
  SUBCASE("reference L(G)") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 10; ++t) {
      const Predicate chi = oracle::random_predicate(3, rng);
      std::vector<Edge> edges;
      for (int i = 0; i < 6; ++i) {
        auto p = oracle::random_permutation(8, rng);
        edges.push_back(Edge{{p[0], p[1], p[2]}});
      }
      CHECK(expected_log_preimages(8, edges, chi) ==
            doctest::Approx(reference_log_preimages(8, edges, chi)).epsilon(1e-12));
    }
  }
  SUBCASE("no edges, balanced predicate, n = k") {
    const auto chi = std::make_shared<const Predicate>(Predicate::parity(3));
    CHECK(expected_log_preimages(3, {}, *chi) == 3.0);
    const std::vector<Edge> one = {Edge{{2, 0, 1}}};
    CHECK(expected_log_preimages(3, one, *chi) == 2.0);
    AzumaOptions o;
    o.edges_per_var = 0.0;
    const AzumaReport r = azuma_increment_check(3, 3, chi, 10, 1, o);
    for (const auto& t : r.trials) {
      CHECK(t.edges == 0);
      CHECK(t.before == 3.0);
      CHECK(t.after == 2.0);
      CHECK(t.increment == 1.0);
    }
  }
  SUBCASE("increments lie in [0, 1] and match the two L values") {
    const auto chi = std::make_shared<const Predicate>(Predicate::parity(3));
    const AzumaReport r = azuma_increment_check(10, 3, chi, 100, 5);
    CHECK(r.violations.empty());
    CHECK(r.min_increment >= 0.0);
    CHECK(r.max_increment <= 1.0);
    for (const auto& t : r.trials) CHECK(t.increment == doctest::Approx(t.before - t.after).epsilon(1e-9));
  }
  SUBCASE("cap") {
    const auto chi = std::make_shared<const Predicate>(Predicate::parity(3));
    try {
      azuma_increment_check(15, 3, chi, 1, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kResourceLimit);
    }
  }
}

TEST_CASE("variance split") {
  const ModelSpec s = sat3(12, 1.0);
  SUBCASE("law of total variance") {
    const VarianceSplit v = variance_split(s, 20, 5, 3);
    CHECK(std::abs(v.total - (v.between + v.within)) <= 1e-10);
    CHECK(v.within > 0.0);
    CHECK(v.phi.size() == 20);
    // Reference moments.
    std::vector<double> all;
    for (const auto& row : v.phi) all.insert(all.end(), row.begin(), row.end());
    double mean = 0.0;
    for (double x : all) mean += x;
    mean /= static_cast<double>(all.size());
    double total = 0.0;
    for (double x : all) total += (x - mean) * (x - mean);
    CHECK(v.total == doctest::Approx(total / static_cast<double>(all.size())).epsilon(1e-9));
  }
  SUBCASE("identical plants give zero within-graph variance") {
    const VarianceSplit v = variance_split(s, 10, 4, 3, {}, false);
    CHECK(v.within == 0.0);
    CHECK(std::abs(v.total - v.between) <= 1e-10);
  }
  SUBCASE("plants share the skeleton of their graph") {
    // Same clause stream: with all plants equal to a fixed v0 the sample is
    // the FIXED_PLANT draw for that graph seed.
    const VarianceSplit v = variance_split(s, 3, 2, 11, {}, false);
    CHECK(v.phi[0][0] == v.phi[0][1]);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(variance_split(s, 5, 1, 1), Error);
    ModelSpec g = sat3(10, 1.0, Family::kGold);
    CHECK_THROWS_AS(variance_split(g, 5, 2, 1), Error);
  }
}

TEST_CASE("results do not depend on the worker count") {
  ExperimentOptions one;
  ExperimentOptions four;
  four.jobs = 4;
  const ModelSpec s = sat3(14, 1.5);
  CHECK(estimate_psi(s, 40, 2, one).values == estimate_psi(s, 40, 2, four).values);
  CHECK(estimate_qn(s, 0.6, 40, 2, one).hits == estimate_qn(s, 0.6, 40, 2, four).hits);
  CHECK(transition_window(s, 0.5, 40, 2, 8.0, 0.1, 0.9, one).crossings ==
        transition_window(s, 0.5, 40, 2, 8.0, 0.1, 0.9, four).crossings);
  const VarianceSplit a = variance_split(s, 6, 3, 2, one);
  const VarianceSplit b = variance_split(s, 6, 3, 2, four);
  CHECK(a.phi == b.phi);
  CHECK(a.total == b.total);
}
