#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace attn {

enum class ErrorCode {
  EmptySample,
  ZeroMean,
  FractionOutOfRange,
  NegativeValue,
  DegenerateSeries,
  TooShort,
  BadBase,
  NonFiniteResult,
  BadStep,
  TooFewUsers,
  DegenerateData,
  LengthMismatch,
  EmptyInput,
  ParseError,
  BadAction,
  TimestampBeforeOrigin,
  BadConfig,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
/// Parse failures also record the 1-based input line (0 when not tied to a line).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  /// The message without the code and line prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::size_t line_;
};

}  // namespace attn
