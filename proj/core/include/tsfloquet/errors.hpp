#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsfloquet {

enum class ErrorCode {
  PointNotInScale,
  WindowEdge,
  NonFiniteValue,
  ReversedBounds,
  QuadratureFailure,
  OutOfDomain,
  IterationCapExceeded,
  RegressivityViolation,
  OmegaOutOfStrip,
  IntegrationFailure,
  SingularMatrix,
  ClusteringAmbiguous,
  DegenerateMultiplier,
  RootFindFailure,
  ResonantSystem,
  EmptyHorizon,
  SyntaxError,
  UnknownFunction,
  DomainError,
  UnboundVariable,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for everything the library throws. The code identifies the
/// failure kind; the message carries context (module, time point, operation).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Parse failures from the expression language carry the offending offset.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected, const std::string& source)
      : Error(ErrorCode::SyntaxError, "at position " + std::to_string(position) + ": expected " +
                                          expected + " in \"" + source + "\""),
        position_(position),
        expected_(std::move(expected)) {}

  [[nodiscard]] std::size_t position() const noexcept { return position_; }
  [[nodiscard]] const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace tsfloquet
