#pragma once

// Independent reference implementations used as test oracles. None of them
// calls into the library's evaluation or counting code.

#include <cstdint>
#include <random>
#include <vector>

#include "csplab/formula.hpp"
#include "csplab/predicate.hpp"
#include "csplab/sampler.hpp"

namespace oracle {

inline int bit_of(std::uint64_t word, std::size_t var) { return static_cast<int>((word >> var) & 1U); }

/// Clause truth value computed straight from the definitions, reading the
/// edge values of assignment `word` (variable v is bit v).
inline bool clause_holds(const csplab::Clause& c, std::uint64_t word) {
  const std::size_t k = c.edge.vars.size();
  std::vector<int> y(k);
  for (std::size_t i = 0; i < k; ++i) y[i] = bit_of(word, c.edge.vars[i]);
  auto matches = [&](std::uint32_t pattern, bool complement) {
    for (std::size_t i = 0; i < k; ++i) {
      int p = static_cast<int>((pattern >> (k - 1 - i)) & 1U);
      if (complement) p ^= 1;
      if (p != y[i]) return false;
    }
    return true;
  };
  if (const auto* s = std::get_if<csplab::SatForbidden>(&c.semantics)) return !matches(s->pattern, false);
  if (const auto* s = std::get_if<csplab::NaeForbidden>(&c.semantics)) {
    return !matches(s->pattern, false) && !matches(s->pattern, true);
  }
  if (const auto* s = std::get_if<csplab::XorTarget>(&c.semantics)) {
    int parity = 0;
    for (int b : y) parity ^= b;
    return parity == (s->bit ? 1 : 0);
  }
  const auto& g = std::get<csplab::GoldTarget>(c.semantics);
  std::uint32_t input = 0;
  for (int b : y) input = (input << 1) | static_cast<std::uint32_t>(b);
  return (*g.predicate)(input) == g.bit;
}

/// Z(F) by plain enumeration of all 2^n assignments.
inline std::uint64_t count(const csplab::Formula& f) {
  std::uint64_t z = 0;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << f.n); ++w) {
    bool ok = true;
    for (const auto& c : f.clauses) {
      if (!clause_holds(c, w)) {
        ok = false;
        break;
      }
    }
    z += ok ? 1 : 0;
  }
  return z;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Gamma_ell by the defining sum over ell-tuples of k-bit strings.
inline double gamma(const csplab::Predicate& chi, int ell, const std::vector<double>& nu) {
  const int k = chi.arity();
  const std::uint64_t strings = std::uint64_t{1} << k;
  std::uint64_t tuples = 1;
  for (int r = 0; r < ell; ++r) tuples *= strings;
  double total = 0.0;
  std::vector<std::uint32_t> u(static_cast<std::size_t>(ell));
  for (std::uint64_t t = 0; t < tuples; ++t) {
    std::uint64_t rest = t;
    for (int r = 0; r < ell; ++r) {
      u[static_cast<std::size_t>(r)] = static_cast<std::uint32_t>(rest % strings);
      rest /= strings;
    }
    bool equal = true;
    for (int r = 1; r < ell; ++r) equal = equal && chi(u[static_cast<std::size_t>(r)]) == chi(u[0]);
    if (!equal) continue;
    double product = 1.0;
    for (int i = 0; i < k; ++i) {
      std::uint32_t column = 0;
      for (int r = 0; r < ell; ++r) {
        column = (column << 1) | ((u[static_cast<std::size_t>(r)] >> (k - 1 - i)) & 1U);
      }
      product *= nu[column];
    }
    total += product;
  }
  return 0.5 * total;
}

/// 2^k times the correlation of chi with the XOR of `positions`.
inline std::int64_t correlation_sum(const csplab::Predicate& chi, const std::vector<int>& positions) {
  const int k = chi.arity();
  std::int64_t sum = 0;
  for (std::uint32_t x = 0; x < (1U << k); ++x) {
    int e = chi(x) ? 1 : 0;
    for (int p : positions) e ^= static_cast<int>((x >> (k - 1 - p)) & 1U);
    sum += e ? -1 : 1;
  }
  return sum;
}

inline csplab::Predicate random_predicate(int k, std::mt19937_64& rng) {
  std::vector<std::uint8_t> table(std::size_t{1} << k);
  for (auto& b : table) b = static_cast<std::uint8_t>(rng() & 1U);
  return csplab::Predicate(k, std::move(table));
}

inline csplab::Predicate random_balanced_predicate(int k, std::mt19937_64& rng) {
  std::vector<std::uint8_t> table(std::size_t{1} << k, 0);
  std::fill(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(table.size() / 2), 1);
  std::shuffle(table.begin(), table.end(), rng);
  return csplab::Predicate(k, std::move(table));
}

inline std::vector<double> random_simplex(std::size_t size, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(size);
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng));
  for (auto& x : w) x /= s;
  return w;
}

inline std::vector<csplab::Var> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<csplab::Var> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<csplab::Var>(i);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Random spec for family index 0..3 (sat, naesat, xorsat, gold).
inline csplab::ModelSpec random_spec(int family, std::size_t n, double alpha, std::mt19937_64& rng) {
  csplab::ModelSpec spec;
  spec.family = static_cast<csplab::Family>(family);
  spec.n = n;
  spec.k = 3;
  spec.alpha = alpha;
  if (spec.family == csplab::Family::kGold) {
    spec.predicate = std::make_shared<const csplab::Predicate>(random_balanced_predicate(3, rng));
  }
  return spec;
}

}  // namespace oracle
