#include "pbpoll/battery.hpp"

#include <array>

#include "pbpoll/error.hpp"

namespace pbpoll {

namespace {

constexpr std::array<std::pair<BatteryKind, std::string_view>, 10> kNames{{
    {BatteryKind::ModelDisagreement, "model_disagreement"},
    {BatteryKind::SinglePeaked, "single_peaked"},
    {BatteryKind::SinglePeakedRounded, "single_peaked_rounded"},
    {BatteryKind::PeakLinear, "peak_linear"},
    {BatteryKind::ProjectSymmetry, "project_symmetry"},
    {BatteryKind::SignSymmetry, "sign_symmetry"},
    {BatteryKind::CyclicAsymmetry, "cyclic_asymmetry"},
    {BatteryKind::ConcentratedVsDistributed, "concentrated_vs_distributed"},
    {BatteryKind::Biennial, "biennial"},
    {BatteryKind::TriangleSplit, "triangle_split"},
}};

}  // namespace

std::string_view battery_kind_name(BatteryKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

BatteryKind parse_battery_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw Error(Errc::InvalidConfig, "unknown battery kind '" + std::string(name) + "'");
}

const std::vector<BatteryKind>& all_battery_kinds() {
  static const std::vector<BatteryKind> kinds = [] {
    std::vector<BatteryKind> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return kinds;
}

int default_k(BatteryKind kind) {
  switch (kind) {
    case BatteryKind::ModelDisagreement: return 10;
    case BatteryKind::ProjectSymmetry: return 4;
    case BatteryKind::SignSymmetry: return 6;
    case BatteryKind::Biennial: return 4;
    case BatteryKind::TriangleSplit: return 2;
    default: return 0;
  }
}

bool requires_all_positive(const BatteryConfig& config) {
  switch (config.kind) {
    case BatteryKind::ConcentratedVsDistributed:
    case BatteryKind::ProjectSymmetry:
    case BatteryKind::TriangleSplit:
    case BatteryKind::CyclicAsymmetry:
      return true;
    case BatteryKind::ModelDisagreement:
      return config.model_a.kind() == ModelKind::Leontief ||
             config.model_b.kind() == ModelKind::Leontief;
    default:
      return false;
  }
}

void validate_config(const BatteryConfig& config) {
  if (config.k && *config.k < 1) throw Error(Errc::InvalidConfig, "k must be at least 1");
  if (config.k && *config.k > 1000) throw Error(Errc::InvalidConfig, "k is unreasonably large");
  switch (config.kind) {
    case BatteryKind::ModelDisagreement:
      if (config.model_a == config.model_b) {
        throw Error(Errc::InvalidConfig, "model disagreement needs two different models");
      }
      break;
    case BatteryKind::SinglePeaked:
    case BatteryKind::SinglePeakedRounded:
      if (config.lambdas.empty()) throw Error(Errc::InvalidConfig, "no lambda values");
      for (const auto& l : config.lambdas) {
        if (!(l > 0 && l < 1)) throw Error(Errc::InvalidConfig, "lambda must lie strictly between 0 and 1");
      }
      break;
    case BatteryKind::TriangleSplit:
      if (config.effective_k() > 50) throw Error(Errc::InvalidConfig, "too many split vectors");
      break;
    default:
      break;
  }
}

QuestionBattery generate_battery(const BatteryConfig& config, const BudgetAllocation& ideal,
                                 std::uint64_t seed) {
  validate_config(config);
  const std::uint64_t gen_seed = derive_seed(seed, 0);
  const int k = config.effective_k();

  QuestionBattery battery;
  switch (config.kind) {
    case BatteryKind::ModelDisagreement:
      battery = gen_model_disagreement(ideal, config.model_a, config.model_b, k, gen_seed);
      break;
    case BatteryKind::SinglePeaked:
    case BatteryKind::SinglePeakedRounded: {
      ConvexOptions options;
      options.lambdas = config.lambdas;
      options.round_grid5 = config.kind == BatteryKind::SinglePeakedRounded;
      options.avoid_degenerate = config.avoid_degenerate;
      battery = gen_convex_combinations(ideal, options, gen_seed);
      break;
    }
    case BatteryKind::PeakLinear: battery = gen_peak_linear(ideal); break;
    case BatteryKind::ProjectSymmetry: battery = gen_project_symmetry(ideal, k, gen_seed); break;
    case BatteryKind::SignSymmetry: battery = gen_sign_symmetry(ideal, k, gen_seed); break;
    case BatteryKind::CyclicAsymmetry: battery = gen_cyclic_asymmetry_ranking(ideal); break;
    case BatteryKind::ConcentratedVsDistributed:
      battery = gen_concentrated_vs_distributed(ideal, config.fallback);
      break;
    case BatteryKind::Biennial: battery = gen_biennial(ideal, k, gen_seed); break;
    case BatteryKind::TriangleSplit:
      battery = gen_triangle_split(ideal, k, gen_seed, config.split_rule);
      break;
  }
  battery.battery_kind = std::string(battery_kind_name(config.kind));
  battery.seed = seed;
  if (config.alertness) battery = insert_alertness_checks(std::move(battery), derive_seed(seed, 1));
  if (config.shuffle) battery = shuffle_option_order(std::move(battery), derive_seed(seed, 2));
  return battery;
}

}  // namespace pbpoll
