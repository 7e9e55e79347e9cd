#include "pbpoll/error.hpp"

namespace pbpoll {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::BadLength: return "BadLength";
    case Errc::SumMismatch: return "SumMismatch";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::OffGrid: return "OffGrid";
    case Errc::AllZero: return "AllZero";
    case Errc::TooFewPositive: return "TooFewPositive";
    case Errc::ZeroEntry: return "ZeroEntry";
    case Errc::NotZeroSum: return "NotZeroSum";
    case Errc::LeontiefZeroIdeal: return "LeontiefZeroIdeal";
    case Errc::UnsupportedKind: return "UnsupportedKind";
    case Errc::Unsatisfiable: return "Unsatisfiable";
    case Errc::GenerationExhausted: return "GenerationExhausted";
    case Errc::InvalidOptions: return "InvalidOptions";
    case Errc::FallbackExhausted: return "FallbackExhausted";
    case Errc::EmptyResponseSet: return "EmptyResponseSet";
    case Errc::IncompleteSet: return "IncompleteSet";
    case Errc::MalformedRanking: return "MalformedRanking";
    case Errc::IncompleteMatrix: return "IncompleteMatrix";
    case Errc::IncompleteTriple: return "IncompleteTriple";
    case Errc::MissingBaseline: return "MissingBaseline";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownPoll: return "UnknownPoll";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::ParticipantBlocked: return "ParticipantBlocked";
    case Errc::PollClosed: return "PollClosed";
    case Errc::ValidationFailed: return "ValidationFailed";
    case Errc::ScreenedOut: return "ScreenedOut";
    case Errc::SessionBlocked: return "SessionBlocked";
    case Errc::SessionNotActive: return "SessionNotActive";
    case Errc::WrongQuestion: return "WrongQuestion";
    case Errc::MalformedAnswer: return "MalformedAnswer";
    case Errc::Unauthorized: return "Unauthorized";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pbpoll
