#include "pbpoll/question.hpp"

#include <algorithm>

#include "pbpoll/error.hpp"

namespace pbpoll {

std::string_view question_kind_name(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::Pairwise: return "pairwise";
    case QuestionKind::Ranking: return "ranking";
    case QuestionKind::Biennial: return "biennial";
  }
  return "unknown";
}

QuestionKind parse_question_kind(std::string_view name) {
  if (name == "pairwise") return QuestionKind::Pairwise;
  if (name == "ranking") return QuestionKind::Ranking;
  if (name == "biennial") return QuestionKind::Biennial;
  throw Error(Errc::ParseError, "unknown question kind '" + std::string(name) + "'");
}

int Question::generator_index(int displayed) const {
  const auto& perm = provenance.permutation;
  if (perm.empty()) return displayed;
  return perm.at(static_cast<std::size_t>(displayed));
}

int Question::displayed_index(int generator) const {
  const auto& perm = provenance.permutation;
  if (perm.empty()) return generator;
  const auto it = std::find(perm.begin(), perm.end(), generator);
  if (it == perm.end()) throw Error(Errc::MalformedAnswer, "option index out of range");
  return static_cast<int>(it - perm.begin());
}

std::vector<Option> Question::generator_options() const {
  std::vector<Option> out(options.size());
  for (std::size_t i = 0; i < options.size(); ++i) {
    out[static_cast<std::size_t>(generator_index(static_cast<int>(i)))] = options[i];
  }
  return out;
}

namespace {

template <typename F>
Answer map_answer(const Answer& answer, std::size_t n, F&& f) {
  if (const int* choice = std::get_if<int>(&answer)) {
    if (*choice < 0 || static_cast<std::size_t>(*choice) >= n) {
      throw Error(Errc::MalformedAnswer, "choice out of range");
    }
    return f(*choice);
  }
  const auto& ranking = std::get<std::vector<int>>(answer);
  std::vector<int> out;
  out.reserve(ranking.size());
  for (int r : ranking) {
    if (r < 0 || static_cast<std::size_t>(r) >= n) throw Error(Errc::MalformedAnswer, "rank out of range");
    out.push_back(f(r));
  }
  return out;
}

}  // namespace

Answer Question::to_generator_relative(const Answer& displayed) const {
  return map_answer(displayed, options.size(), [this](int i) { return generator_index(i); });
}

Answer Question::to_displayed(const Answer& generator_relative) const {
  return map_answer(generator_relative, options.size(), [this](int i) { return displayed_index(i); });
}

bool question_well_formed(const Question& q) {
  const std::size_t expected = q.kind == QuestionKind::Ranking ? kIssues : 2;
  if (q.options.size() != expected) return false;
  for (const auto& opt : q.options) {
    const bool is_pair = std::holds_alternative<YearPair>(opt);
    if (is_pair != (q.kind == QuestionKind::Biennial)) return false;
  }
  if (!q.is_alertness) {
    for (std::size_t i = 0; i < q.options.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (q.options[i] == q.options[j]) return false;
      }
    }
  }
  if (!q.provenance.permutation.empty()) {
    auto perm = q.provenance.permutation;
    std::sort(perm.begin(), perm.end());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] != static_cast<int>(i)) return false;
    }
    if (perm.size() != q.options.size()) return false;
  }
  return true;
}

}  // namespace pbpoll
