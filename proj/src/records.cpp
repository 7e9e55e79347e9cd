#include "pbpoll/records.hpp"

#include <algorithm>

#include "pbpoll/error.hpp"

namespace pbpoll {

void check_answer_shape(const Question& question, const Answer& answer) {
  const int n = static_cast<int>(question.options.size());
  if (question.kind == QuestionKind::Ranking) {
    const auto* ranking = std::get_if<std::vector<int>>(&answer);
    if (!ranking) throw Error(Errc::MalformedAnswer, "ranking questions need a full ranking");
    std::vector<int> sorted = *ranking;
    std::sort(sorted.begin(), sorted.end());
    if (static_cast<int>(sorted.size()) != n) {
      throw Error(Errc::MalformedAnswer, "ranking must list every option exactly once");
    }
    for (int i = 0; i < n; ++i) {
      if (sorted[static_cast<std::size_t>(i)] != i) {
        throw Error(Errc::MalformedAnswer, "ranking must list every option exactly once");
      }
    }
    return;
  }
  const int* choice = std::get_if<int>(&answer);
  if (!choice) throw Error(Errc::MalformedAnswer, "this question takes a single choice");
  if (*choice < 0 || *choice >= n) throw Error(Errc::MalformedAnswer, "choice out of range");
}

ResponseRecord make_record(const Question& question, const std::string& battery_kind,
                           const std::string& participant_id, const std::string& session_id,
                           const Answer& displayed_answer) {
  check_answer_shape(question, displayed_answer);
  ResponseRecord r;
  r.participant_id = participant_id;
  r.session_id = session_id;
  r.question_id = question.id;
  r.battery_kind = battery_kind;
  r.question_kind = question.kind;
  r.provenance = question.provenance;
  r.is_alertness = question.is_alertness;
  r.answer = displayed_answer;
  r.generator_relative_answer = question.to_generator_relative(displayed_answer);
  return r;
}

bool failed_alertness(const ResponseRecord& record) {
  if (!record.is_alertness || !record.provenance.ideal_option) return false;
  const int* choice = std::get_if<int>(&record.generator_relative_answer);
  return !choice || *choice != *record.provenance.ideal_option;
}

}  // namespace pbpoll
