#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pbpoll/battery.hpp"
#include "pbpoll/error.hpp"
#include "pbpoll/json_io.hpp"
#include "pbpoll/records.hpp"

namespace pbpoll {

struct AgentSpec {
  IdealBudget ideal;
  UtilityModel model = UtilityModel::l1();
  /// Probability of answering uniformly at random.
  double noise_rate = 0.0;
  /// Biennial options score w1 * U(year1) + w2 * U(year2).
  std::array<double, 2> year_weights{1.0, 1.0};
};

/// Throws Error(InvalidConfig) unless 0 <= noise <= 1 and the year weights are
/// non-negative with a positive sum.
void validate_agent(const AgentSpec& agent);

struct AgentChoice {
  Answer generator_relative;
  bool tie_broken = false;
  bool noisy = false;
};

/// Chooses in generator order, so the result does not depend on how the
/// options were shuffled for display. One bernoulli draw decides noise before
/// anything else is drawn.
AgentChoice choose(const AgentSpec& agent, const Question& question, Rng& rng);

/// choose() mapped to display positions and wrapped in a record.
ResponseRecord answer(const AgentSpec& agent, const Question& question,
                      const std::string& battery_kind, Rng& rng);

struct AgentFailure {
  std::string participant_id;
  Errc code;
  std::string message;
};

struct CohortResult {
  std::vector<ResponseRecord> records;
  std::vector<AgentFailure> failures;
};

/// Agent i takes a battery seeded derive_seed(seed, 2i) and answers with an
/// engine seeded derive_seed(seed, 2i + 1). An agent stops after failing an
/// alertness check or after balancing on a triangle screening question, as a
/// live session would. Per-agent errors are collected, not thrown.
CohortResult run_cohort(const std::vector<AgentSpec>& agents, const BatteryConfig& plan,
                        std::uint64_t seed);

/// True when the answer to this record ends a live session early.
bool ends_session(const ResponseRecord& record);

/// n agents sharing one model, each with an ideal drawn uniformly from the
/// grid points that pass the eligibility filters (two positive entries, all
/// positive when required).
std::vector<AgentSpec> random_cohort(int n, const UtilityModel& model, double noise_rate,
                                     std::array<double, 2> year_weights,
                                     bool require_all_positive, std::uint64_t seed);

/// {"seed": .., "battery": {config}, "agents": [...], "random": {...}}.
/// Each agent entry has ideal, model, optional noise, year_weights and
/// participant_id; "random" has n, model, noise and year_weights.
struct CohortSpec {
  std::uint64_t seed = 0;
  bool has_seed = false;
  BatteryConfig battery;
  std::vector<AgentSpec> agents;
};

CohortSpec cohort_spec_from_json(const Json& j);
Json agent_to_json(const AgentSpec& agent);

}  // namespace pbpoll
