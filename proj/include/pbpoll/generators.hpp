#pragma once

// Question-battery generators. Each one is a pure function of the ideal
// budget, its parameters and a seed; rerunning with the same inputs yields an
// identical battery.

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pbpoll/domain.hpp"
#include "pbpoll/question.hpp"
#include "pbpoll/random.hpp"
#include "pbpoll/utility_models.hpp"

namespace pbpoll {

/// Attempts per question before a rejection sampler gives up.
inline constexpr int kRejectionCap = 10000;

struct RandomAllocationConfig {
  std::int64_t grid = kGrid;
  Amount min_entry{0};
  bool require_all_positive = false;
};

/// Uniform sampling over the finite set of grid points of the simplex that
/// satisfy a config. The support is enumerated up front, so sampling under an
/// extra acceptance test is done by filtering the support, which has the same
/// law as rejection sampling from the unfiltered set.
class AllocationSampler {
 public:
  /// Throws Error(Unsatisfiable) when no grid point satisfies the config.
  explicit AllocationSampler(const RandomAllocationConfig& config);

  /// The default 5-point grid, enumerated once.
  static const AllocationSampler& grid5();

  template <typename Pred>
  AllocationSampler filtered(Pred&& keep) const {
    std::vector<BudgetAllocation> kept;
    for (const auto& a : support_) {
      if (keep(a)) kept.push_back(a);
    }
    return AllocationSampler(std::move(kept));
  }

  const std::vector<BudgetAllocation>& support() const { return support_; }
  bool empty() const { return support_.empty(); }
  const BudgetAllocation& sample(Rng& rng) const;

 private:
  explicit AllocationSampler(std::vector<BudgetAllocation> support)
      : support_(std::move(support)) {}

  std::vector<BudgetAllocation> support_;
};

BudgetAllocation sample_random_allocation(const RandomAllocationConfig& config, Rng& rng);

// -- model disagreement ------------------------------------------------------

/// k pairs (q1, q2) where model_a strictly prefers q1 and model_b strictly
/// prefers q2.
QuestionBattery gen_model_disagreement(const BudgetAllocation& p, const UtilityModel& model_a,
                                       const UtilityModel& model_b, int k, std::uint64_t seed);

// -- convex combinations -----------------------------------------------------

/// 0.1, 0.2, ..., 0.9 with 0.5 listed twice (ten questions).
std::vector<Amount> default_convex_lambdas();

struct ConvexOptions {
  std::vector<Amount> lambdas = default_convex_lambdas();
  bool round_grid5 = false;
  /// Resample q when rounding collapses c onto the ideal itself.
  bool avoid_degenerate = false;
};

/// lambda * p + (1 - lambda) * q, exact.
BudgetAllocation convex_combination(const BudgetAllocation& p, const BudgetAllocation& q,
                                    const Amount& lambda);

/// Rounds the first m-1 entries to integers (ties to even), sets the last to
/// the remainder, rounds every entry to a multiple of 5 and repairs the sum on
/// the largest entry.
BudgetAllocation round_convex_to_grid(const BudgetAllocation& c);

/// The pairwise question (q, c_lambda).
Question convex_question(const BudgetAllocation& p, const BudgetAllocation& q,
                         const Amount& lambda, bool round_grid5);

QuestionBattery gen_convex_combinations(const BudgetAllocation& p, const ConvexOptions& options,
                                        std::uint64_t seed);

// -- peak linear -------------------------------------------------------------

/// v1 = [10,10,80], v2 = [10,80,10], v3 = [80,10,10].
std::array<BudgetAllocation, kIssues> extreme_allocations();
std::vector<Amount> peak_linear_lambdas();

QuestionBattery gen_peak_linear(const BudgetAllocation& p);

// -- symmetry ----------------------------------------------------------------

/// The base pair plus its m-1 rotated-deviation variants, or nullopt when a
/// rotation leaves the simplex or the pair is degenerate.
std::optional<std::vector<Question>> project_symmetry_set(const BudgetAllocation& p,
                                                          const BudgetAllocation& q1,
                                                          const BudgetAllocation& q2,
                                                          int set_index);

QuestionBattery gen_project_symmetry(const BudgetAllocation& p, int k, std::uint64_t seed);

/// (q1, q2) and (p - d1, p - d2), or nullopt when a negated option is invalid
/// or the pair is degenerate.
std::optional<std::vector<Question>> sign_symmetry_set(const BudgetAllocation& p,
                                                       const BudgetAllocation& q1,
                                                       const BudgetAllocation& q2,
                                                       int set_index);

QuestionBattery gen_sign_symmetry(const BudgetAllocation& p, int k, std::uint64_t seed);

// -- cyclic asymmetry (ranking) ----------------------------------------------

/// max(1, round(lambda * min(p))).
std::int64_t cyclic_magnitude(const BudgetAllocation& p, const Amount& lambda);
std::int64_t cyclic_magnitude(const Vec& p, const Amount& lambda);

/// The m shifted vectors p + shift_j(base) on an unvalidated vector. The
/// shifts sum to zero, so the sum of p is preserved whatever it is.
std::array<Vec, kIssues> cyclic_shift_vectors(const Vec& p, const Amount& lambda,
                                              bool positive_direction);

/// Ranking question over p + shift_j(base) for j = 0..m-1, where base is
/// ((m-1)X, -X, -X) for "pd" and its negation for "nd". Throws
/// Error(InvalidOptions) when a shifted option leaves [0, 100].
Question cyclic_question(const BudgetAllocation& p, const Amount& lambda, bool positive_direction);

/// Four ranking questions: pd at 0.2 and 0.4, then nd at 0.2 and 0.4.
QuestionBattery gen_cyclic_asymmetry_ranking(const BudgetAllocation& p);

// -- concentrated vs distributed ---------------------------------------------

/// Fixed difference-vector pairs used when the primary construction leaves
/// the simplex. Each pair is written for category 0 and rotated to the target
/// category.
struct FallbackVectors {
  std::array<std::pair<DeviationVector, DeviationVector>, 4> levels;

  /// Level k: d1 = (-2k, k, k), d2 = (2k, -k, -k).
  static FallbackVectors defaults();
};

/// max(1, round(min(p) / 10)).
std::int64_t concentrated_base_magnitude(const BudgetAllocation& p);

/// Category-major, 4 magnitude levels per category. Option A is the
/// concentrated loss p + d1, option B the concentrated gain p - d1. Throws
/// Error(ZeroEntry) for ideals with a zero entry and Error(FallbackExhausted)
/// when neither construction is valid.
QuestionBattery gen_concentrated_vs_distributed(
    const BudgetAllocation& p, const FallbackVectors& fallback = FallbackVectors::defaults());

// -- biennial ----------------------------------------------------------------

/// Sub-poll 1, 2 and 3 questions for one random budget r. Generator option 0
/// is always the option containing the exact ideal. Returns nullopt when r is
/// the ideal or 2p - r leaves the simplex.
std::optional<std::vector<Question>> biennial_round(const BudgetAllocation& p,
                                                    const BudgetAllocation& r, int round_index);

QuestionBattery gen_biennial(const BudgetAllocation& p, int k, std::uint64_t seed);

// -- triangle split ------------------------------------------------------------

/// How a change q = [x1, x2, x3] is split into q1 + q2.
///  AnchorLast:  q1 = [x1, 0, -x1], q2 = [0, x2, -x2]
///  AnchorFirst: q1 = [-x2, x2, 0], q2 = [-x3, 0, x3]
enum class SplitRule { AnchorLast, AnchorFirst };

std::pair<DeviationVector, DeviationVector> split_change(const DeviationVector& q, SplitRule rule);

/// (p, p + s*q) vs (p + s*q1, p + s*q2) for sign s. Option 0 is the
/// concentrated change.
std::optional<Question> triangle_question(const BudgetAllocation& p, const DeviationVector& q,
                                          SplitRule rule, int sign);

/// Two screening questions (sub-poll 2 and 3 style) followed by 6k
/// comparisons: k base changes, 3 coordinate rotations each, both signs.
QuestionBattery gen_triangle_split(const BudgetAllocation& p, int k, std::uint64_t seed,
                                   SplitRule rule = SplitRule::AnchorLast);

// -- post-processing -----------------------------------------------------------

/// Inserts two alertness checks (the ideal against a random allocation) at
/// index 0 and in the middle of the original sequence.
QuestionBattery insert_alertness_checks(QuestionBattery battery, std::uint64_t seed);

/// Permutes option order per question and records the permutation.
QuestionBattery shuffle_option_order(QuestionBattery battery, std::uint64_t seed);

}  // namespace pbpoll
