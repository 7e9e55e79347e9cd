#pragma once

#include <array>
#include <string>
#include <string_view>

#include "pbpoll/domain.hpp"

namespace pbpoll {

enum class ModelKind { L1, L2, Leontief, WeightedAsymmetric, MonotoneAsymmetric };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Weights and exponents for the asymmetric models. Gain terms apply to
/// max(0, q_j - p_j), loss terms to max(0, p_j - q_j).
struct ModelParams {
  std::array<double, kIssues> gain_weights{};
  std::array<double, kIssues> loss_weights{};
  double gain_exponent = 1.0;
  double loss_exponent = 1.0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

class UtilityModel {
 public:
  static UtilityModel l1() { return UtilityModel(ModelKind::L1, {}); }
  static UtilityModel l2() { return UtilityModel(ModelKind::L2, {}); }
  static UtilityModel leontief() { return UtilityModel(ModelKind::Leontief, {}); }

  /// sum_j [a_j * max(0, q_j - p_j) + b_j * max(0, p_j - q_j)].
  /// Weights are free-signed; negative weights make deviations a penalty.
  static UtilityModel weighted_asymmetric(std::array<double, kIssues> gain_weights,
                                          std::array<double, kIssues> loss_weights);

  /// sum_j [a_j * max(0, q_j - p_j)^r - b_j * max(0, p_j - q_j)^s].
  /// Setting b = a gives the single-weight form.
  static UtilityModel monotone_asymmetric(std::array<double, kIssues> gain_weights,
                                          std::array<double, kIssues> loss_weights,
                                          double gain_exponent, double loss_exponent);

  /// Builds a model of `kind`; params are ignored for the parameterless kinds.
  static UtilityModel make(ModelKind kind, const ModelParams& params);

  ModelKind kind() const { return kind_; }
  const ModelParams& params() const { return params_; }
  std::string_view name() const { return model_kind_name(kind_); }

  friend bool operator==(const UtilityModel&, const UtilityModel&) = default;

 private:
  UtilityModel(ModelKind kind, ModelParams params) : kind_(kind), params_(params) {}

  ModelKind kind_;
  ModelParams params_;
};

enum class Preference { First, Second, Tie };

/// U(p, q): larger is better. For l2 this is the negated squared norm,
/// which orders budgets the same way as the norm itself.
double evaluate(const UtilityModel& model, const BudgetAllocation& p, const BudgetAllocation& q);

Preference prefer(const UtilityModel& model, const BudgetAllocation& p, const BudgetAllocation& q1,
                  const BudgetAllocation& q2);

/// Non-negative metric value for the distance models: the l1 sum, or the
/// Euclidean norm for l2. Throws Error(UnsupportedKind) for other kinds.
double distance_variant(const UtilityModel& model, const BudgetAllocation& p,
                        const BudgetAllocation& q);

/// True when evaluate(p, .) is defined (Leontief needs every p_j > 0).
bool evaluable_at(const UtilityModel& model, const BudgetAllocation& p);

}  // namespace pbpoll
