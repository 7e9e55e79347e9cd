#include <cmath>

#include "checks.hpp"
#include "pbpoll/random.hpp"
#include "support.hpp"

using namespace testing;

namespace {

// Straight from the definitions, in doubles, for comparison.
double oracle(ModelKind kind, const ModelParams& m, const BudgetAllocation& p, const BudgetAllocation& q) {
  double l1 = 0, l2 = 0, leo = 1e300, wa = 0, ma = 0;
  for (std::size_t j = 0; j < kIssues; ++j) {
    const double pj = to_double(p[j]), qj = to_double(q[j]);
    const double gain = std::max(0.0, qj - pj), loss = std::max(0.0, pj - qj);
    l1 += std::fabs(qj - pj);
    l2 += (qj - pj) * (qj - pj);
    if (pj > 0) leo = std::min(leo, qj / pj);
    wa += m.gain_weights[j] * gain + m.loss_weights[j] * loss;
    ma += m.gain_weights[j] * std::pow(gain, m.gain_exponent) - m.loss_weights[j] * std::pow(loss, m.loss_exponent);
  }
  switch (kind) {
    case ModelKind::L1: return -l1;
    case ModelKind::L2: return -l2;
    case ModelKind::Leontief: return leo;
    case ModelKind::WeightedAsymmetric: return wa;
    case ModelKind::MonotoneAsymmetric: return ma;
  }
  return 0;
}

}  // namespace

TEST_CASE("distance models") {
  const auto p = alloc(50, 30, 20);
  CHECK(evaluate(UtilityModel::l1(), p, alloc(41, 30, 29)) == doctest::Approx(-18));
  CHECK(distance_variant(UtilityModel::l1(), p, alloc(43, 40, 17)) == doctest::Approx(20));
  CHECK(distance_variant(UtilityModel::l1(), p, alloc(43, 26, 31)) == doctest::Approx(22));
  CHECK(distance_variant(UtilityModel::l1(), alloc(30, 20, 50), alloc(20, 15, 65)) == doctest::Approx(30));
  CHECK(prefer(UtilityModel::l1(), p, alloc(41, 30, 29), alloc(43, 40, 17)) == Preference::First);
  CHECK(prefer(UtilityModel::l2(), p, alloc(41, 30, 29), alloc(43, 40, 17)) == Preference::Second);
  CHECK(prefer(UtilityModel::leontief(), p, alloc(41, 30, 29), alloc(43, 26, 31)) == Preference::Second);
  CHECK(prefer(UtilityModel::l1(), p, alloc(40, 40, 20), alloc(60, 20, 20)) == Preference::Tie);
  CHECK_ERRC(distance_variant(UtilityModel::leontief(), p, p), Errc::UnsupportedKind);
}

TEST_CASE("leontief needs a positive ideal") {
  CHECK_ERRC(evaluate(UtilityModel::leontief(), alloc(50, 50, 0), alloc(40, 40, 20)), Errc::LeontiefZeroIdeal);
  CHECK_FALSE(evaluable_at(UtilityModel::leontief(), alloc(50, 50, 0)));
  CHECK(evaluable_at(UtilityModel::l1(), alloc(50, 50, 0)));
}

TEST_CASE("asymmetric models") {
  const auto wa = UtilityModel::weighted_asymmetric({-1, -1, -1}, {-5, -1, -1});
  const auto p = alloc(30, 30, 40);
  // Losing 4 on issue 1 costs 20, gaining 2 + 2 elsewhere costs 4.
  CHECK(evaluate(wa, p, alloc(26, 32, 42)) == doctest::Approx(-24));
  const auto ma = UtilityModel::monotone_asymmetric({1, 1, 1}, {2, 2, 2}, 1.0, 2.0);
  CHECK(evaluate(ma, p, alloc(26, 32, 42)) == doctest::Approx(4 - 2 * 16));
  CHECK_ERRC(UtilityModel::monotone_asymmetric({1, 1, 1}, {1, 1, 1}, 0.0, 1.0), Errc::InvalidConfig);
  CHECK_ERRC(UtilityModel::weighted_asymmetric({NAN, 1, 1}, {1, 1, 1}), Errc::InvalidConfig);
  CHECK(parse_model_kind("leontief") == ModelKind::Leontief);
  CHECK_ERRC(parse_model_kind("l7"), Errc::InvalidConfig);
}

TEST_CASE("evaluate matches the definitions on random pairs") {
  Rng rng(21);
  const auto& grid = AllocationSampler::grid5();
  ModelParams m;
  m.gain_weights = {0.7, -1.2, 2.0};
  m.loss_weights = {1.5, 0.3, -0.4};
  m.gain_exponent = 1.3;
  m.loss_exponent = 0.8;
  for (int i = 0; i < 2000; ++i) {
    const auto p = grid.sample(rng);
    const auto q = grid.sample(rng);
    for (auto kind : {ModelKind::L1, ModelKind::L2, ModelKind::Leontief, ModelKind::WeightedAsymmetric,
                      ModelKind::MonotoneAsymmetric}) {
      const auto model = UtilityModel::make(kind, m);
      if (!evaluable_at(model, p)) continue;
      CHECK(evaluate(model, p, q) == doctest::Approx(oracle(kind, m, p, q)));
    }
    // The ideal is the best budget for the distance models.
    CHECK(evaluate(UtilityModel::l1(), p, p) >= evaluate(UtilityModel::l1(), p, q));
    CHECK(evaluate(UtilityModel::l2(), p, p) >= evaluate(UtilityModel::l2(), p, q));
  }
}
