#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hjive {

enum class ErrorKind {
  InvalidInput,
  RankDeficient,
  DegenerateAggregation,
  ThetaTooSmall,
  BoundaryPoint,
  DegenerateInput,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) raise(ErrorKind::InvalidInput, message);
}

}  // namespace hjive
