#pragma once

// Consistency statistics over response records. Everything here reads the
// generator-relative answers, so shuffling option order at generation time
// never changes a result. Participants are reported in id order.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbpoll/records.hpp"
#include "pbpoll/report.hpp"

namespace pbpoll {

struct AnalysisOptions {
  /// Drop answers where the agent broke an exact tie (and any set, ranking
  /// group or matrix containing one).
  bool exclude_tie_broken = false;
  /// Drop every answer of a participant who failed an alertness check.
  bool exclude_failed_alertness = true;
  /// Symmetry sets score the share of members agreeing with the first member
  /// instead of all-or-nothing.
  bool partial_credit = false;
};

struct ParticipantRate {
  std::string participant_id;
  std::int64_t hits = 0;
  std::int64_t total = 0;

  Amount rate() const { return total == 0 ? Amount(0) : Amount(hits, total); }
  friend bool operator==(const ParticipantRate&, const ParticipantRate&) = default;
};

/// Maps a record to the generator-relative option that counts as consistent,
/// or nullopt when the record is not part of the measurement.
using ConsistencyPredicate = std::function<std::optional<int>(const ResponseRecord&)>;

/// Predicate selecting records of one generator and scoring `option`.
ConsistencyPredicate prefers_option(std::string generator, int option);

/// Per participant: consistent answers over answered questions. Alertness
/// checks never count. Throws Error(EmptyResponseSet) when nothing applies.
std::vector<ParticipantRate> pairwise_consistency(const std::vector<ResponseRecord>& records,
                                                  const ConsistencyPredicate& predicate,
                                                  const AnalysisOptions& options = {});

// -- thresholds ----------------------------------------------------------------

std::vector<Amount> default_thresholds();

/// Participants whose rate is at or above each threshold.
std::vector<std::int64_t> threshold_counts(const std::vector<Amount>& rates,
                                           const std::vector<Amount>& thresholds);

struct ThresholdRow {
  std::string label;
  std::vector<std::int64_t> counts;
  friend bool operator==(const ThresholdRow&, const ThresholdRow&) = default;
};

/// Two directions plus their total. Row 0 is "A over B" using the given
/// rates, row 1 "B over A" using the complementary rates, row 2 the sum.
struct ThresholdSummary {
  std::vector<Amount> thresholds;
  std::int64_t participants = 0;
  std::vector<ThresholdRow> rows;
  friend bool operator==(const ThresholdSummary&, const ThresholdSummary&) = default;
};

ThresholdSummary threshold_summary(const std::vector<ParticipantRate>& a_rates,
                                   const std::string& a_name, const std::string& b_name,
                                   const std::vector<Amount>& thresholds = default_thresholds());

/// Comparison | over 60% | ... | 100% | Participants, with the participant
/// count on the total row.
Table threshold_table(const ThresholdSummary& summary, const std::string& title);

/// One row per labelled rate list: label, a count cell per threshold, and
/// the participant count. Used for single-direction summaries such as the
/// symmetry rates.
Table rate_threshold_table(const std::string& title, const std::string& first_header,
                           const std::vector<std::pair<std::string, std::vector<ParticipantRate>>>& rows,
                           const std::vector<Amount>& thresholds = default_thresholds());

// -- convex combinations ---------------------------------------------------------

struct LambdaRow {
  Amount lambda;
  std::int64_t consistent = 0;
  std::int64_t pairs = 0;
  friend bool operator==(const LambdaRow&, const LambdaRow&) = default;
};

/// Single-peaked batteries (rounded or not): choosing the blend c_lambda is
/// consistent. Rows are sorted by lambda; repeated lambdas pool their pairs.
std::vector<LambdaRow> consistency_by_lambda(const std::vector<ResponseRecord>& records,
                                             const AnalysisOptions& options = {});

/// lambda | Average Consistency (%) | Total Pairs, two decimals.
Table lambda_table(const std::vector<LambdaRow>& rows);

// -- peak linear -----------------------------------------------------------------

struct Tally {
  std::int64_t hits = 0;
  std::int64_t total = 0;
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct PeakLinearSummary {
  std::vector<Amount> lambdas;
  std::vector<std::string> pairs;
  /// cells[lambda][pair]
  std::vector<std::vector<Tally>> cells;
  std::vector<ParticipantRate> participants;
  friend bool operator==(const PeakLinearSummary&, const PeakLinearSummary&) = default;
};

/// A blend answer is consistent when it matches the participant's answer on
/// the extreme pair with the same labels. Throws Error(MissingBaseline) when
/// a blend answer has no extreme-pair answer to compare against.
PeakLinearSummary peak_linear_consistency(const std::vector<ResponseRecord>& records,
                                          const AnalysisOptions& options = {});

/// Percentile (lambda) | A vs. B | A vs. C | B vs. C | Average Consistency,
/// cells like "70% (93/132)", plus an "All percentiles" row.
Table peak_linear_table(const PeakLinearSummary& summary);

// -- symmetry --------------------------------------------------------------------

enum class SymmetryMode { Project, Sign };

/// Per participant: consistent sets over sets. A set is consistent when every
/// member got the same generator-relative choice. Throws Error(IncompleteSet)
/// when a set is missing members.
std::vector<ParticipantRate> symmetry_consistency(const std::vector<ResponseRecord>& records,
                                                  SymmetryMode mode,
                                                  const AnalysisOptions& options = {});

// -- cyclic asymmetry ranking ----------------------------------------------------------

struct RankingConsistency {
  std::string participant_id;
  /// Of the relations A vs B, B vs C, C vs A: how many hold the same way in
  /// every ranking question.
  int constant_relations = 0;
  friend bool operator==(const RankingConsistency&, const RankingConsistency&) = default;
};

struct RankingSummary {
  std::vector<RankingConsistency> participants;
  /// Participants with at least 1, at least 2, and all 3 constant relations.
  std::array<std::int64_t, 3> buckets{};
  friend bool operator==(const RankingSummary&, const RankingSummary&) = default;
};

/// Throws Error(MalformedRanking) for answers that are not permutations.
RankingSummary ranking_consistency(const std::vector<ResponseRecord>& records,
                                   const AnalysisOptions& options = {});

/// Counts and percentages (one decimal, truncated).
Table ranking_table(const RankingSummary& summary);

// -- preference matrices ---------------------------------------------------------

enum class MatrixCell { Missing, Concentrated, Distributed };
enum class MatrixClass { FullyConsistent, OneCellTolerant, Monotone, Other };

std::string_view matrix_class_name(MatrixClass c);

inline constexpr std::size_t kLevels = 4;
using MatrixCells = std::array<std::array<MatrixCell, kLevels>, kIssues>;

/// Precedence FullyConsistent > OneCellTolerant > Monotone > Other. Throws
/// Error(IncompleteMatrix) when a cell is missing.
MatrixClass classify_matrix(const MatrixCells& cells);

/// Every row changes direction at most once.
bool rows_monotone(const MatrixCells& cells);

struct PreferenceMatrix {
  std::string participant_id;
  MatrixCells cells{};
  MatrixClass classification = MatrixClass::Other;
  bool monotone = false;
  friend bool operator==(const PreferenceMatrix&, const PreferenceMatrix&) = default;
};

/// Option A (concentrated loss) is a Concentrated cell, option B a
/// Distributed one.
std::vector<PreferenceMatrix> preference_matrices(const std::vector<ResponseRecord>& records,
                                                  const AnalysisOptions& options = {});

Table matrix_class_table(const std::vector<PreferenceMatrix>& matrices);
/// Share of participants choosing the concentrated decrease per cell.
Table matrix_heatmap_table(const std::vector<PreferenceMatrix>& matrices);

// -- transitivity ----------------------------------------------------------------

struct PollWinner {
  std::string model_a;
  std::string model_b;
  /// nullopt when the poll was tied.
  std::optional<std::string> winner;
};

/// Flags the cyclic pattern over the three pairwise model polls. Throws
/// Error(IncompleteTriple) unless there are exactly three untied polls that
/// cover three models pairwise.
bool transitivity_cycle_detect(const std::vector<PollWinner>& polls);

struct TransitivityResult {
  std::string participant_id;
  bool cycle = false;
  friend bool operator==(const TransitivityResult&, const TransitivityResult&) = default;
};

/// Majority winners per model pair from disagreement records; participants
/// without a complete, untied triple are skipped.
std::vector<TransitivityResult> transitivity_from_records(const std::vector<ResponseRecord>& records,
                                                          const AnalysisOptions& options = {});

// -- biennial --------------------------------------------------------------------

struct BiennialBucket {
  /// Share of the sub-poll's questions answered the majority way.
  Amount level;
  std::int64_t users = 0;
  std::int64_t ideal_answers = 0;
  std::int64_t answers = 0;
  friend bool operator==(const BiennialBucket&, const BiennialBucket&) = default;
};

struct SubPollSummary {
  int sub_poll = 0;
  std::vector<BiennialBucket> buckets;
  std::int64_t users = 0;
  std::int64_t ideal_answers = 0;
  std::int64_t answers = 0;
  friend bool operator==(const SubPollSummary&, const SubPollSummary&) = default;
};

struct BiennialSummary {
  std::array<SubPollSummary, 3> sub_polls;
  friend bool operator==(const BiennialSummary&, const BiennialSummary&) = default;
};

BiennialSummary biennial_consistency(const std::vector<ResponseRecord>& records,
                                     const AnalysisOptions& options = {});

/// One table per sub-poll and the cumulative table.
std::vector<Table> biennial_tables(const BiennialSummary& summary);

// -- triangle split --------------------------------------------------------------

struct TriangleSummary {
  std::int64_t participants = 0;
  std::int64_t screened_out = 0;
  std::int64_t concentrated = 0;
  std::int64_t split = 0;
  friend bool operator==(const TriangleSummary&, const TriangleSummary&) = default;
};

TriangleSummary triangle_summary(const std::vector<ResponseRecord>& records,
                                 const AnalysisOptions& options = {});
Table triangle_table(const TriangleSummary& summary);

// -- everything ------------------------------------------------------------------

/// Runs every analysis that applies to the battery kinds present. Throws
/// Error(EmptyResponseSet) when there is nothing to analyze.
Report analyze_all(const std::vector<ResponseRecord>& records, const AnalysisOptions& options = {});

}  // namespace pbpoll
