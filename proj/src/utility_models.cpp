#include "pbpoll/utility_models.hpp"

#include <cmath>

#include "pbpoll/error.hpp"

namespace pbpoll {

namespace {

void check_params(const ModelParams& params) {
  for (std::size_t j = 0; j < kIssues; ++j) {
    if (!std::isfinite(params.gain_weights[j]) || !std::isfinite(params.loss_weights[j])) {
      throw Error(Errc::InvalidConfig, "model weights must be finite");
    }
  }
  if (!(params.gain_exponent > 0) || !(params.loss_exponent > 0) ||
      !std::isfinite(params.gain_exponent) || !std::isfinite(params.loss_exponent)) {
    throw Error(Errc::InvalidConfig, "model exponents must be finite and positive");
  }
}

Amount abs(const Amount& a) { return a < 0 ? -a : a; }

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::L1: return "l1";
    case ModelKind::L2: return "l2";
    case ModelKind::Leontief: return "leontief";
    case ModelKind::WeightedAsymmetric: return "weighted";
    case ModelKind::MonotoneAsymmetric: return "monotone";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "l1" || name == "L1") return ModelKind::L1;
  if (name == "l2" || name == "L2") return ModelKind::L2;
  if (name == "leontief" || name == "Leontief") return ModelKind::Leontief;
  if (name == "weighted" || name == "weighted_asymmetric") return ModelKind::WeightedAsymmetric;
  if (name == "monotone" || name == "monotone_asymmetric") return ModelKind::MonotoneAsymmetric;
  throw Error(Errc::InvalidConfig, "unknown utility model '" + std::string(name) + "'");
}

UtilityModel UtilityModel::weighted_asymmetric(std::array<double, kIssues> gain_weights,
                                               std::array<double, kIssues> loss_weights) {
  ModelParams params{gain_weights, loss_weights, 1.0, 1.0};
  check_params(params);
  return UtilityModel(ModelKind::WeightedAsymmetric, params);
}

UtilityModel UtilityModel::monotone_asymmetric(std::array<double, kIssues> gain_weights,
                                               std::array<double, kIssues> loss_weights,
                                               double gain_exponent, double loss_exponent) {
  ModelParams params{gain_weights, loss_weights, gain_exponent, loss_exponent};
  check_params(params);
  return UtilityModel(ModelKind::MonotoneAsymmetric, params);
}

UtilityModel UtilityModel::make(ModelKind kind, const ModelParams& params) {
  switch (kind) {
    case ModelKind::L1: return l1();
    case ModelKind::L2: return l2();
    case ModelKind::Leontief: return leontief();
    case ModelKind::WeightedAsymmetric:
      return weighted_asymmetric(params.gain_weights, params.loss_weights);
    case ModelKind::MonotoneAsymmetric:
      return monotone_asymmetric(params.gain_weights, params.loss_weights, params.gain_exponent,
                                 params.loss_exponent);
  }
  throw Error(Errc::UnsupportedKind, "unknown model kind");
}

bool evaluable_at(const UtilityModel& model, const BudgetAllocation& p) {
  return model.kind() != ModelKind::Leontief || p.all_positive();
}

double evaluate(const UtilityModel& model, const BudgetAllocation& p, const BudgetAllocation& q) {
  // The distance models are summed exactly before the single conversion to
  // double, so equal utilities compare equal and order is preserved.
  switch (model.kind()) {
    case ModelKind::L1: {
      Amount sum(0);
      for (std::size_t j = 0; j < kIssues; ++j) sum += abs(p[j] - q[j]);
      return -to_double(sum);
    }
    case ModelKind::L2: {
      Amount sum(0);
      for (std::size_t j = 0; j < kIssues; ++j) sum += (p[j] - q[j]) * (p[j] - q[j]);
      return -to_double(sum);
    }
    case ModelKind::Leontief: {
      if (!p.all_positive()) {
        throw Error(Errc::LeontiefZeroIdeal, "Leontief utility needs every ideal entry positive");
      }
      Amount best = q[0] / p[0];
      for (std::size_t j = 1; j < kIssues; ++j) best = std::min(best, q[j] / p[j]);
      return to_double(best);
    }
    case ModelKind::WeightedAsymmetric: {
      const auto& w = model.params();
      double u = 0.0;
      for (std::size_t j = 0; j < kIssues; ++j) {
        const double diff = to_double(q[j] - p[j]);
        u += w.gain_weights[j] * std::max(0.0, diff) + w.loss_weights[j] * std::max(0.0, -diff);
      }
      return u;
    }
    case ModelKind::MonotoneAsymmetric: {
      const auto& w = model.params();
      double u = 0.0;
      for (std::size_t j = 0; j < kIssues; ++j) {
        const double diff = to_double(q[j] - p[j]);
        u += w.gain_weights[j] * std::pow(std::max(0.0, diff), w.gain_exponent) -
             w.loss_weights[j] * std::pow(std::max(0.0, -diff), w.loss_exponent);
      }
      return u;
    }
  }
  throw Error(Errc::UnsupportedKind, "unknown model kind");
}

Preference prefer(const UtilityModel& model, const BudgetAllocation& p, const BudgetAllocation& q1,
                  const BudgetAllocation& q2) {
  const double u1 = evaluate(model, p, q1);
  const double u2 = evaluate(model, p, q2);
  if (u1 > u2) return Preference::First;
  if (u1 < u2) return Preference::Second;
  return Preference::Tie;
}

double distance_variant(const UtilityModel& model, const BudgetAllocation& p,
                        const BudgetAllocation& q) {
  switch (model.kind()) {
    case ModelKind::L1: return -evaluate(model, p, q);
    case ModelKind::L2: return std::sqrt(-evaluate(model, p, q));
    default:
      throw Error(Errc::UnsupportedKind,
                  "distance is defined for l1 and l2 only, not " + std::string(model.name()));
  }
}

}  // namespace pbpoll
