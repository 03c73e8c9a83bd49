#include "csplab/predicate.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>

#include "csplab/error.hpp"

namespace csplab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidClause: return "invalid-clause";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kUnsupportedFamily: return "unsupported-family";
    case ErrorKind::kInvalidPermutation: return "invalid-permutation";
    case ErrorKind::kDensityOutOfRange: return "density-out-of-range";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kResourceLimit: return "resource-limit";
    case ErrorKind::kNoCrossing: return "no-crossing";
    case ErrorKind::kData: return "data";
  }
  return "unknown";
}

Predicate::Predicate(int k, std::vector<std::uint8_t> table) : k_(k), table_(std::move(table)) {
  if (k < 1 || k > kMaxArity) {
    throw Error(ErrorKind::kInvalidArgument, "predicate arity must be in [1, 16]");
  }
  if (table_.size() != (std::size_t{1} << k)) {
    throw Error(ErrorKind::kInvalidArgument, "predicate table length must be 2^k");
  }
  for (auto& v : table_) v = v ? 1 : 0;
}

Predicate Predicate::from_hex(int k, std::string_view hex) {
  if (k < 1 || k > kMaxArity) {
    throw Error(ErrorKind::kInvalidArgument, "predicate arity must be in [1, 16]");
  }
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty()) throw Error(ErrorKind::kInvalidArgument, "empty predicate hex string");
  const std::size_t size = std::size_t{1} << k;
  std::vector<std::uint8_t> table(size, 0);
  std::size_t bit = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(*it)));
    int digit = 0;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      throw Error(ErrorKind::kInvalidArgument, "bad hex digit in predicate: " + std::string(hex));
    }
    for (int j = 0; j < 4; ++j, ++bit) {
      const bool set = (digit >> j) & 1;
      if (bit < size) {
        table[bit] = set ? 1 : 0;
      } else if (set) {
        throw Error(ErrorKind::kInvalidArgument,
                    "predicate hex " + std::string(hex) + " has bits beyond 2^k");
      }
    }
  }
  return Predicate(k, std::move(table));
}

Predicate Predicate::parity(int k) {
  std::vector<std::uint8_t> table(std::size_t{1} << k);
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = std::popcount(i) & 1;
  return Predicate(k, std::move(table));
}

Predicate Predicate::constant(int k, bool value) {
  return Predicate(k, std::vector<std::uint8_t>(std::size_t{1} << k, value ? 1 : 0));
}

Predicate Predicate::conjunction(int k) {
  std::vector<std::uint8_t> table(std::size_t{1} << k, 0);
  table.back() = 1;
  return Predicate(k, std::move(table));
}

Predicate Predicate::dictator(int k, int position) {
  std::vector<std::uint8_t> table(std::size_t{1} << k);
  for (std::size_t i = 0; i < table.size(); ++i) {
    table[i] = pattern_bit(static_cast<std::uint32_t>(i), k, position);
  }
  return Predicate(k, std::move(table));
}

std::size_t Predicate::ones() const noexcept {
  return static_cast<std::size_t>(std::count(table_.begin(), table_.end(), 1));
}

std::string Predicate::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = std::max<std::size_t>(1, (table_.size() + 3) / 4);
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    int value = 0;
    for (int j = 0; j < 4; ++j) {
      const std::size_t bit = d * 4 + static_cast<std::size_t>(j);
      if (bit < table_.size() && table_[bit]) value |= 1 << j;
    }
    out[digits - 1 - d] = kDigits[value];
  }
  return "0x" + out;
}

}  // namespace csplab
