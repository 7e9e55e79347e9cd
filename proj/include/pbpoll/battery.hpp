#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbpoll/generators.hpp"
#include "pbpoll/utility_models.hpp"

namespace pbpoll {

enum class BatteryKind {
  ModelDisagreement,
  SinglePeaked,
  SinglePeakedRounded,
  PeakLinear,
  ProjectSymmetry,
  SignSymmetry,
  CyclicAsymmetry,
  ConcentratedVsDistributed,
  Biennial,
  TriangleSplit,
};

std::string_view battery_kind_name(BatteryKind kind);
/// Throws Error(InvalidConfig) for unknown names.
BatteryKind parse_battery_kind(std::string_view name);
const std::vector<BatteryKind>& all_battery_kinds();

/// Number of sets (or questions) when the config leaves k unset.
int default_k(BatteryKind kind);

struct BatteryConfig {
  BatteryKind kind = BatteryKind::SinglePeaked;
  std::optional<int> k;
  // model disagreement
  UtilityModel model_a = UtilityModel::l1();
  UtilityModel model_b = UtilityModel::l2();
  // convex combinations
  std::vector<Amount> lambdas = default_convex_lambdas();
  bool avoid_degenerate = false;
  // triangle split
  SplitRule split_rule = SplitRule::AnchorLast;
  // concentrated vs distributed
  FallbackVectors fallback = FallbackVectors::defaults();
  // post-processing
  bool alertness = false;
  bool shuffle = false;

  int effective_k() const { return k.value_or(default_k(kind)); }
};

/// True when ideals with a zero entry cannot take this battery.
bool requires_all_positive(const BatteryConfig& config);

/// Throws Error(InvalidConfig) when the config cannot drive its generator.
void validate_config(const BatteryConfig& config);

/// Runs the generator for config.kind, then the optional alertness insertion
/// and option shuffle. Generator, alertness and shuffle draw from separate
/// streams derived from `seed`.
QuestionBattery generate_battery(const BatteryConfig& config, const BudgetAllocation& ideal,
                                 std::uint64_t seed);

}  // namespace pbpoll
