#include "attn/error.hpp"

namespace attn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BadBase: return "BadBase";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::BadStep: return "BadStep";
    case ErrorCode::TooFewUsers: return "TooFewUsers";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadAction: return "BadAction";
    case ErrorCode::TimestampBeforeOrigin: return "TimestampBeforeOrigin";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

static std::string decorate(ErrorCode code, const std::string& message, std::size_t line) {
  std::string out(to_string(code));
  if (line > 0) out += " at line " + std::to_string(line);
  if (!message.empty()) out += ": " + message;
  return out;
}

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(decorate(code, message, line)), code_(code), message_(message), line_(line) {}

}  // namespace attn
