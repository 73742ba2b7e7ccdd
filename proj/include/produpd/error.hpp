#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace produpd {

enum class ErrorCode {
  ParseError,
  PositivityViolation,
  EmptyDomain,
  DuplicateWorld,
  UnknownWorldInRelation,
  UnknownWorldInValuation,
  EmptyEventSet,
  DuplicateEvent,
  UnknownEventInRelation,
  MissingPrecondition,
  PreconditionNotBaseMso,
  WorldOutOfModel,
  NominalOutsideProductContext,
  BudgetExceeded,
  UnknownEvent,
  InputNotSentenceFragment,
  NotABisimulation,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. The code is stable and is what
/// the CLI maps to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t line = 1;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected = {});

  const SourceSpan& span() const noexcept { return span_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
};

}  // namespace produpd
