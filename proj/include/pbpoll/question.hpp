#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pbpoll/domain.hpp"

namespace pbpoll {

enum class QuestionKind { Pairwise, Ranking, Biennial };

std::string_view question_kind_name(QuestionKind kind);
QuestionKind parse_question_kind(std::string_view name);

struct YearPair {
  BudgetAllocation year1;
  BudgetAllocation year2;

  friend bool operator==(const YearPair&, const YearPair&) = default;
};

using Option = std::variant<BudgetAllocation, YearPair>;

/// Where a question came from. Only the fields a generator sets are present.
struct Provenance {
  std::string generator;
  std::optional<Amount> lambda;
  std::optional<Amount> magnitude;
  std::optional<int> set_index;
  std::optional<int> rotation;
  std::optional<int> sign;
  std::optional<int> sub_poll;
  std::optional<int> category;
  std::optional<int> level;
  std::optional<bool> fallback;
  std::optional<std::string> pair;
  std::optional<std::string> role;
  std::optional<std::string> direction;
  std::optional<std::string> model_a;
  std::optional<std::string> model_b;
  /// Alertness checks: the generator index of the option holding the ideal.
  std::optional<int> ideal_option;
  /// Displayed position i shows generator option permutation[i]. Empty means
  /// the identity.
  std::vector<int> permutation;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// A single choice (pairwise, biennial) or a best-first ranking of option
/// indices.
using Answer = std::variant<int, std::vector<int>>;

struct Question {
  std::string id;
  QuestionKind kind = QuestionKind::Pairwise;
  std::vector<Option> options;
  Provenance provenance;
  bool is_alertness = false;

  int generator_index(int displayed) const;
  int displayed_index(int generator) const;
  /// Options in generator order, regardless of display shuffling.
  std::vector<Option> generator_options() const;

  /// Maps an answer given in display positions to generator positions.
  Answer to_generator_relative(const Answer& displayed) const;
  Answer to_displayed(const Answer& generator_relative) const;

  friend bool operator==(const Question&, const Question&) = default;
};

struct QuestionBattery {
  std::string battery_kind;
  std::uint64_t seed = 0;
  BudgetAllocation ideal;
  std::vector<Question> questions;

  friend bool operator==(const QuestionBattery&, const QuestionBattery&) = default;
};

/// Every contained allocation is valid by construction; this checks the
/// per-question invariants (option count per kind, distinct options unless the
/// question is an alertness check).
bool question_well_formed(const Question& q);

}  // namespace pbpoll
