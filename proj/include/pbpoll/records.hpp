#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbpoll/question.hpp"

namespace pbpoll {

/// One answer to one question, from a live participant or a synthetic agent.
struct ResponseRecord {
  std::string participant_id;
  std::string session_id;
  std::string question_id;
  std::string battery_kind;
  QuestionKind question_kind = QuestionKind::Pairwise;
  Provenance provenance;
  bool is_alertness = false;
  /// In display positions.
  Answer answer;
  /// Mapped back through provenance.permutation.
  Answer generator_relative_answer;
  bool tie_broken = false;
  /// When the answer arrived and when the question was first served.
  std::int64_t timestamp_ms = 0;
  std::int64_t received_at_ms = 0;

  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

/// Builds a record for `question` from a display-position answer. Throws
/// Error(MalformedAnswer) when the answer shape does not fit the question.
ResponseRecord make_record(const Question& question, const std::string& battery_kind,
                           const std::string& participant_id, const std::string& session_id,
                           const Answer& displayed_answer);

/// Checks the answer shape against the question kind: a single in-range index
/// for pairwise and biennial questions, a permutation for rankings.
void check_answer_shape(const Question& question, const Answer& answer);

/// True when an alertness record's generator-relative choice is not the ideal.
bool failed_alertness(const ResponseRecord& record);

}  // namespace pbpoll
