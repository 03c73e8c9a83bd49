#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csplab {

/// Truth table of a Boolean function on k bits.
///
/// Inputs are indexed by their binary encoding with the first edge variable as
/// the most significant bit, so table()[i] is the value on the k-bit string
/// spelled by i. The hex form is the table read as an integer whose bit i is
/// table()[i]; the 3-bit parity function is therefore 0x96.
class Predicate {
 public:
  Predicate(int k, std::vector<std::uint8_t> table);

  static Predicate from_hex(int k, std::string_view hex);
  static Predicate parity(int k);
  static Predicate constant(int k, bool value);
  static Predicate conjunction(int k);
  /// Returns the value of input bit `position` (0 = most significant).
  static Predicate dictator(int k, int position);

  int arity() const noexcept { return k_; }
  std::size_t size() const noexcept { return table_.size(); }
  bool operator()(std::uint32_t input) const { return table_[input] != 0; }
  std::span<const std::uint8_t> table() const noexcept { return table_; }

  std::size_t ones() const noexcept;
  std::string to_hex() const;

  friend bool operator==(const Predicate&, const Predicate&) = default;

 private:
  int k_;
  std::vector<std::uint8_t> table_;
};

using PredicatePtr = std::shared_ptr<const Predicate>;

inline constexpr int kMaxArity = 16;

/// Bit of `pattern` at edge position i under the MSB-first convention.
constexpr bool pattern_bit(std::uint32_t pattern, int k, int i) noexcept {
  return ((pattern >> (k - 1 - i)) & 1U) != 0;
}

constexpr std::uint32_t full_mask(int k) noexcept {
  return k >= 32 ? 0xffffffffU : ((1U << k) - 1U);
}

}  // namespace csplab
