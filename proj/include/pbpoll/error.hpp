#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pbpoll {

enum class Errc {
  // allocation validation
  BadLength,
  SumMismatch,
  OutOfRange,
  OffGrid,
  AllZero,
  TooFewPositive,
  ZeroEntry,
  NotZeroSum,
  // utility models
  LeontiefZeroIdeal,
  UnsupportedKind,
  // generators
  Unsatisfiable,
  GenerationExhausted,
  InvalidOptions,
  FallbackExhausted,
  // analysis
  EmptyResponseSet,
  IncompleteSet,
  MalformedRanking,
  IncompleteMatrix,
  IncompleteTriple,
  MissingBaseline,
  UnsupportedFormat,
  // service
  InvalidConfig,
  UnknownPoll,
  UnknownSession,
  ParticipantBlocked,
  PollClosed,
  ValidationFailed,
  ScreenedOut,
  SessionBlocked,
  SessionNotActive,
  WrongQuestion,
  MalformedAnswer,
  Unauthorized,
  // plumbing
  ParseError,
  IoError,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pbpoll
