#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csplab {

enum class ErrorKind {
  kInvalidClause,
  kDimension,
  kUnsupportedFamily,
  kInvalidPermutation,
  kDensityOutOfRange,
  kInvalidArgument,
  kResourceLimit,
  kNoCrossing,
  kData,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace csplab
