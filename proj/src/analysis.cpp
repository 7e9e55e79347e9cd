#include "pbpoll/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pbpoll/error.hpp"

namespace pbpoll {

namespace {

using Records = std::vector<ResponseRecord>;

/// Participant plus session, so one participant taking the same battery
/// twice is analyzed as two units.
using UnitKey = std::pair<std::string, std::string>;

UnitKey unit_of(const ResponseRecord& r) { return {r.participant_id, r.session_id}; }

std::set<std::string> failed_participants(const Records& records) {
  std::set<std::string> out;
  for (const auto& r : records) {
    if (failed_alertness(r)) out.insert(r.participant_id);
  }
  return out;
}

/// Non-alertness records of `generator` from participants that pass the
/// exclusion filter.
std::vector<const ResponseRecord*> select(const Records& records, std::string_view generator,
                                          const AnalysisOptions& options) {
  std::set<std::string> failed;
  if (options.exclude_failed_alertness) failed = failed_participants(records);
  std::vector<const ResponseRecord*> out;
  for (const auto& r : records) {
    if (r.is_alertness || r.provenance.generator != generator) continue;
    if (failed.count(r.participant_id)) continue;
    out.push_back(&r);
  }
  return out;
}

int choice_of(const ResponseRecord& r) {
  const int* c = std::get_if<int>(&r.generator_relative_answer);
  if (!c) throw Error(Errc::MalformedAnswer, "record " + r.question_id + " holds a ranking, not a choice");
  return *c;
}

std::string display_model(const std::string& name) {
  if (name == "l1") return "L1";
  if (name == "l2") return "L2";
  if (name == "leontief") return "Leontief";
  if (name == "weighted") return "Weighted";
  if (name == "monotone") return "Monotone";
  return name;
}

std::string threshold_label(const Amount& t) {
  const std::string pct = format_percent(t.numerator(), t.denominator(), 1, Rounding::HalfUp, true);
  return t == Amount(1) ? pct + "%" : "over " + pct + "%";
}

std::string level_label(const Amount& level) {
  return format_percent(level.numerator(), level.denominator(), 1, Rounding::HalfUp, true) + "%";
}

/// Rounded to one decimal, printed with two.
std::string biennial_share(std::int64_t num, std::int64_t den) {
  return format_percent(num, den, 1, Rounding::HalfUp) + "0%";
}

std::string tally_cell(const Tally& t) {
  return format_percent(t.hits, t.total, 0, Rounding::HalfUp) + "% (" + std::to_string(t.hits) +
         "/" + std::to_string(t.total) + ")";
}

std::vector<ParticipantRate> collect(std::map<std::string, ParticipantRate>& by_participant) {
  std::vector<ParticipantRate> out;
  for (auto& [id, rate] : by_participant) out.push_back(rate);
  return out;
}

}  // namespace

ConsistencyPredicate prefers_option(std::string generator, int option) {
  return [generator = std::move(generator), option](const ResponseRecord& r) -> std::optional<int> {
    if (r.provenance.generator != generator) return std::nullopt;
    return option;
  };
}

std::vector<ParticipantRate> pairwise_consistency(const Records& records,
                                                  const ConsistencyPredicate& predicate,
                                                  const AnalysisOptions& options) {
  std::set<std::string> failed;
  if (options.exclude_failed_alertness) failed = failed_participants(records);
  std::map<std::string, ParticipantRate> by_participant;
  for (const auto& r : records) {
    if (r.is_alertness || failed.count(r.participant_id)) continue;
    const auto expected = predicate(r);
    if (!expected) continue;
    if (options.exclude_tie_broken && r.tie_broken) continue;
    auto& rate = by_participant[r.participant_id];
    rate.participant_id = r.participant_id;
    ++rate.total;
    if (choice_of(r) == *expected) ++rate.hits;
  }
  if (by_participant.empty()) throw Error(Errc::EmptyResponseSet, "no responses to analyze");
  return collect(by_participant);
}

// ---------------------------------------------------------------------------

std::vector<Amount> default_thresholds() {
  return {Amount(3, 5), Amount(7, 10), Amount(4, 5), Amount(9, 10), Amount(1)};
}

std::vector<std::int64_t> threshold_counts(const std::vector<Amount>& rates,
                                           const std::vector<Amount>& thresholds) {
  std::vector<std::int64_t> out;
  for (const auto& t : thresholds) {
    out.push_back(std::count_if(rates.begin(), rates.end(), [&t](const Amount& r) { return r >= t; }));
  }
  return out;
}

ThresholdSummary threshold_summary(const std::vector<ParticipantRate>& a_rates,
                                   const std::string& a_name, const std::string& b_name,
                                   const std::vector<Amount>& thresholds) {
  std::vector<Amount> a, b;
  for (const auto& r : a_rates) {
    if (r.total == 0) continue;
    a.push_back(r.rate());
    b.push_back(Amount(1) - r.rate());
  }
  ThresholdSummary out;
  out.thresholds = thresholds;
  out.participants = static_cast<std::int64_t>(a.size());
  ThresholdRow ab{a_name + " over " + b_name, threshold_counts(a, thresholds)};
  ThresholdRow ba{b_name + " over " + a_name, threshold_counts(b, thresholds)};
  ThresholdRow total{"Total " + a_name + " vs " + b_name, {}};
  for (std::size_t i = 0; i < thresholds.size(); ++i) total.counts.push_back(ab.counts[i] + ba.counts[i]);
  out.rows = {ab, ba, total};
  return out;
}

Table threshold_table(const ThresholdSummary& summary, const std::string& title) {
  Table t;
  t.title = title;
  t.header.push_back("Comparison");
  for (const auto& th : summary.thresholds) t.header.push_back(threshold_label(th));
  t.header.push_back("Participants");
  for (std::size_t i = 0; i < summary.rows.size(); ++i) {
    const auto& row = summary.rows[i];
    std::vector<std::string> cells{row.label};
    for (auto c : row.counts) cells.push_back(count_cell(c, summary.participants));
    cells.push_back(i + 1 == summary.rows.size() ? std::to_string(summary.participants) : "");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

Table rate_threshold_table(const std::string& title, const std::string& first_header,
                           const std::vector<std::pair<std::string, std::vector<ParticipantRate>>>& rows,
                           const std::vector<Amount>& thresholds) {
  Table t;
  t.title = title;
  t.header.push_back(first_header);
  for (const auto& th : thresholds) t.header.push_back(threshold_label(th));
  t.header.push_back("Participants");
  for (const auto& [label, rates] : rows) {
    std::vector<Amount> values;
    for (const auto& r : rates) {
      if (r.total > 0) values.push_back(r.rate());
    }
    const auto n = static_cast<std::int64_t>(values.size());
    std::vector<std::string> cells{label};
    for (auto c : threshold_counts(values, thresholds)) cells.push_back(count_cell(c, n));
    cells.push_back(std::to_string(n));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

// ---------------------------------------------------------------------------

std::vector<LambdaRow> consistency_by_lambda(const Records& records, const AnalysisOptions& options) {
  std::map<Amount, LambdaRow> rows;
  for (const char* generator : {"single_peaked", "single_peaked_rounded"}) {
    for (const auto* r : select(records, generator, options)) {
      if (!r->provenance.lambda) continue;
      if (options.exclude_tie_broken && r->tie_broken) continue;
      auto& row = rows[*r->provenance.lambda];
      row.lambda = *r->provenance.lambda;
      ++row.pairs;
      if (choice_of(*r) == 1) ++row.consistent;
    }
  }
  std::vector<LambdaRow> out;
  for (auto& [l, row] : rows) out.push_back(row);
  return out;
}

Table lambda_table(const std::vector<LambdaRow>& rows) {
  Table t;
  t.title = "Consistency by λ";
  t.header = {"λ", "Average Consistency (%)", "Total Pairs"};
  for (const auto& r : rows) {
    t.rows.push_back({format_amount(r.lambda), format_percent(r.consistent, r.pairs, 2, Rounding::HalfUp),
                      std::to_string(r.pairs)});
  }
  return t;
}

// ---------------------------------------------------------------------------

PeakLinearSummary peak_linear_consistency(const Records& records, const AnalysisOptions& options) {
  struct Unit {
    std::map<std::string, const ResponseRecord*> extremes;
    std::vector<const ResponseRecord*> blends;
  };
  std::map<UnitKey, Unit> units;
  std::set<Amount> lambdas;
  std::set<std::string> pairs;
  for (const auto* r : select(records, "peak_linear", options)) {
    if (!r->provenance.pair) continue;
    auto& unit = units[unit_of(*r)];
    pairs.insert(*r->provenance.pair);
    if (r->provenance.role == std::optional<std::string>("extreme")) {
      unit.extremes[*r->provenance.pair] = r;
    } else if (r->provenance.lambda) {
      unit.blends.push_back(r);
      lambdas.insert(*r->provenance.lambda);
    }
  }

  PeakLinearSummary out;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  out.pairs.assign(pairs.begin(), pairs.end());
  out.cells.assign(out.lambdas.size(), std::vector<Tally>(out.pairs.size()));
  auto index_of = [](const auto& v, const auto& x) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
  };

  std::map<std::string, ParticipantRate> by_participant;
  for (const auto& [key, unit] : units) {
    for (const auto* blend : unit.blends) {
      const auto base = unit.extremes.find(*blend->provenance.pair);
      if (base == unit.extremes.end()) {
        throw Error(Errc::MissingBaseline, "participant " + key.first + " has no answer for extreme pair " +
                                               *blend->provenance.pair);
      }
      if (options.exclude_tie_broken && (blend->tie_broken || base->second->tie_broken)) continue;
      const bool consistent = choice_of(*blend) == choice_of(*base->second);
      Tally& cell = out.cells[index_of(out.lambdas, *blend->provenance.lambda)]
                             [index_of(out.pairs, *blend->provenance.pair)];
      ++cell.total;
      auto& rate = by_participant[key.first];
      rate.participant_id = key.first;
      ++rate.total;
      if (consistent) {
        ++cell.hits;
        ++rate.hits;
      }
    }
  }
  out.participants = collect(by_participant);
  return out;
}

Table peak_linear_table(const PeakLinearSummary& summary) {
  Table t;
  t.title = "Peak-linear consistency";
  t.header.push_back("Percentile (λ)");
  for (const auto& pair : summary.pairs) {
    std::string label = pair;
    if (const auto dash = label.find('-'); dash != std::string::npos) label.replace(dash, 1, " vs. ");
    t.header.push_back(label);
  }
  t.header.push_back("Average Consistency");

  std::vector<Tally> column_totals(summary.pairs.size());
  Tally grand;
  for (std::size_t i = 0; i < summary.lambdas.size(); ++i) {
    const Amount& l = summary.lambdas[i];
    std::vector<std::string> row{format_amount(l * 100) + "% (λ=" + format_amount(l) + ")"};
    Tally row_total;
    for (std::size_t j = 0; j < summary.pairs.size(); ++j) {
      const Tally& cell = summary.cells[i][j];
      row.push_back(tally_cell(cell));
      row_total.hits += cell.hits;
      row_total.total += cell.total;
      column_totals[j].hits += cell.hits;
      column_totals[j].total += cell.total;
    }
    row.push_back(tally_cell(row_total));
    grand.hits += row_total.hits;
    grand.total += row_total.total;
    t.rows.push_back(std::move(row));
  }
  std::vector<std::string> last{"All percentiles"};
  for (const auto& c : column_totals) last.push_back(tally_cell(c));
  last.push_back(tally_cell(grand));
  t.rows.push_back(std::move(last));
  return t;
}

// ---------------------------------------------------------------------------

std::vector<ParticipantRate> symmetry_consistency(const Records& records, SymmetryMode mode,
                                                  const AnalysisOptions& options) {
  const bool project = mode == SymmetryMode::Project;
  const std::size_t expected = project ? kIssues : 2;
  std::map<UnitKey, std::map<int, std::vector<const ResponseRecord*>>> units;
  for (const auto* r : select(records, project ? "project_symmetry" : "sign_symmetry", options)) {
    if (!r->provenance.set_index) continue;
    units[unit_of(*r)][*r->provenance.set_index].push_back(r);
  }

  std::map<std::string, ParticipantRate> by_participant;
  for (const auto& [key, sets] : units) {
    for (const auto& [index, members] : sets) {
      if (members.size() != expected) {
        throw Error(Errc::IncompleteSet, "participant " + key.first + " answered " +
                                             std::to_string(members.size()) + " of " +
                                             std::to_string(expected) + " questions in set " +
                                             std::to_string(index));
      }
      if (options.exclude_tie_broken &&
          std::any_of(members.begin(), members.end(), [](const auto* m) { return m->tie_broken; })) {
        continue;
      }
      auto& rate = by_participant[key.first];
      rate.participant_id = key.first;
      const int first = choice_of(*members.front());
      const auto agreeing = std::count_if(members.begin() + 1, members.end(),
                                          [first](const auto* m) { return choice_of(*m) == first; });
      if (options.partial_credit) {
        rate.total += static_cast<std::int64_t>(members.size() - 1);
        rate.hits += agreeing;
      } else {
        ++rate.total;
        if (agreeing + 1 == static_cast<std::int64_t>(members.size())) ++rate.hits;
      }
    }
  }
  return collect(by_participant);
}

// ---------------------------------------------------------------------------

RankingSummary ranking_consistency(const Records& records, const AnalysisOptions& options) {
  std::map<UnitKey, std::vector<const ResponseRecord*>> units;
  for (const auto* r : select(records, "cyclic_asymmetry", options)) units[unit_of(*r)].push_back(r);

  static constexpr std::array<std::pair<int, int>, 3> kRelations{{{0, 1}, {1, 2}, {2, 0}}};
  RankingSummary out;
  for (const auto& [key, rankings] : units) {
    if (options.exclude_tie_broken &&
        std::any_of(rankings.begin(), rankings.end(), [](const auto* r) { return r->tie_broken; })) {
      continue;
    }
    std::vector<std::array<bool, 3>> relations;
    for (const auto* r : rankings) {
      const auto* ranking = std::get_if<std::vector<int>>(&r->generator_relative_answer);
      if (!ranking || ranking->size() != kIssues) {
        throw Error(Errc::MalformedRanking, "record " + r->question_id + " is not a full ranking");
      }
      std::array<int, kIssues> position{-1, -1, -1};
      for (std::size_t i = 0; i < kIssues; ++i) {
        const int option = (*ranking)[i];
        if (option < 0 || option >= static_cast<int>(kIssues) || position[static_cast<std::size_t>(option)] != -1) {
          throw Error(Errc::MalformedRanking, "record " + r->question_id + " is not a permutation");
        }
        position[static_cast<std::size_t>(option)] = static_cast<int>(i);
      }
      std::array<bool, 3> rel{};
      for (std::size_t k = 0; k < kRelations.size(); ++k) {
        rel[k] = position[static_cast<std::size_t>(kRelations[k].first)] <
                 position[static_cast<std::size_t>(kRelations[k].second)];
      }
      relations.push_back(rel);
    }
    RankingConsistency c{key.first, 0};
    for (std::size_t k = 0; k < kRelations.size(); ++k) {
      const bool constant = std::all_of(relations.begin(), relations.end(),
                                        [&](const auto& rel) { return rel[k] == relations.front()[k]; });
      if (constant) ++c.constant_relations;
    }
    for (int b = 0; b < 3; ++b) {
      if (c.constant_relations >= b + 1) ++out.buckets[static_cast<std::size_t>(b)];
    }
    out.participants.push_back(std::move(c));
  }
  return out;
}

Table ranking_table(const RankingSummary& summary) {
  const auto n = static_cast<std::int64_t>(summary.participants.size());
  Table t;
  t.title = "Ranking consistency";
  t.header = {"", "over 1/3", "over 2/3", "3/3 consistent"};
  std::vector<std::string> counts{"Number of Participants"};
  std::vector<std::string> shares{"Percentage"};
  for (auto b : summary.buckets) {
    counts.push_back(std::to_string(b));
    shares.push_back(format_percent(b, n, 1, Rounding::Truncate) + "%");
  }
  t.rows = {counts, shares};
  return t;
}

// ---------------------------------------------------------------------------

std::string_view matrix_class_name(MatrixClass c) {
  switch (c) {
    case MatrixClass::FullyConsistent: return "FullyConsistent";
    case MatrixClass::OneCellTolerant: return "OneCellTolerant";
    case MatrixClass::Monotone: return "Monotone";
    case MatrixClass::Other: return "Other";
  }
  return "Other";
}

namespace {

void require_complete(const MatrixCells& cells) {
  for (const auto& row : cells) {
    for (auto c : row) {
      if (c == MatrixCell::Missing) throw Error(Errc::IncompleteMatrix, "preference matrix has a missing cell");
    }
  }
}

}  // namespace

bool rows_monotone(const MatrixCells& cells) {
  require_complete(cells);
  for (const auto& row : cells) {
    int changes = 0;
    for (std::size_t i = 1; i < row.size(); ++i) changes += row[i] != row[i - 1];
    if (changes > 1) return false;
  }
  return true;
}

MatrixClass classify_matrix(const MatrixCells& cells) {
  require_complete(cells);
  int deviant_rows = 0;
  bool split_row = false;
  for (const auto& row : cells) {
    const auto concentrated = std::count(row.begin(), row.end(), MatrixCell::Concentrated);
    const auto minority = std::min<std::int64_t>(concentrated, static_cast<std::int64_t>(row.size()) - concentrated);
    if (minority == 1) ++deviant_rows;
    if (minority > 1) split_row = true;
  }
  if (deviant_rows == 0 && !split_row) return MatrixClass::FullyConsistent;
  if (deviant_rows == 1 && !split_row) return MatrixClass::OneCellTolerant;
  if (rows_monotone(cells)) return MatrixClass::Monotone;
  return MatrixClass::Other;
}

std::vector<PreferenceMatrix> preference_matrices(const Records& records, const AnalysisOptions& options) {
  std::map<UnitKey, std::vector<const ResponseRecord*>> units;
  for (const auto* r : select(records, "concentrated_vs_distributed", options)) {
    units[unit_of(*r)].push_back(r);
  }
  std::vector<PreferenceMatrix> out;
  for (const auto& [key, answers] : units) {
    if (options.exclude_tie_broken &&
        std::any_of(answers.begin(), answers.end(), [](const auto* r) { return r->tie_broken; })) {
      continue;
    }
    PreferenceMatrix m;
    m.participant_id = key.first;
    for (auto& row : m.cells) row.fill(MatrixCell::Missing);
    for (const auto* r : answers) {
      const auto& prov = r->provenance;
      if (!prov.category || !prov.level || *prov.category < 0 || *prov.category >= static_cast<int>(kIssues) ||
          *prov.level < 1 || *prov.level > static_cast<int>(kLevels)) {
        throw Error(Errc::IncompleteMatrix, "record " + r->question_id + " lacks a category or level");
      }
      m.cells[static_cast<std::size_t>(*prov.category)][static_cast<std::size_t>(*prov.level - 1)] =
          choice_of(*r) == 0 ? MatrixCell::Concentrated : MatrixCell::Distributed;
    }
    m.classification = classify_matrix(m.cells);
    m.monotone = rows_monotone(m.cells);
    out.push_back(std::move(m));
  }
  return out;
}

Table matrix_class_table(const std::vector<PreferenceMatrix>& matrices) {
  const auto n = static_cast<std::int64_t>(matrices.size());
  Table t;
  t.title = "Preference matrix classes";
  t.header = {"Class", "Participants", "Share"};
  for (auto c : {MatrixClass::FullyConsistent, MatrixClass::OneCellTolerant, MatrixClass::Monotone,
                 MatrixClass::Other}) {
    const auto count = std::count_if(matrices.begin(), matrices.end(),
                                     [c](const auto& m) { return m.classification == c; });
    t.rows.push_back({std::string(matrix_class_name(c)), std::to_string(count),
                      format_percent(count, n, 1, Rounding::HalfUp, true) + "%"});
  }
  const auto monotone = std::count_if(matrices.begin(), matrices.end(), [](const auto& m) { return m.monotone; });
  t.rows.push_back({"At most one change per row", std::to_string(monotone),
                    format_percent(monotone, n, 1, Rounding::HalfUp, true) + "%"});
  return t;
}

Table matrix_heatmap_table(const std::vector<PreferenceMatrix>& matrices) {
  const auto n = static_cast<std::int64_t>(matrices.size());
  Table t;
  t.title = "Concentrated decrease share by issue and level";
  t.header = {"Issue"};
  for (std::size_t l = 1; l <= kLevels; ++l) t.header.push_back("Level " + std::to_string(l));
  for (std::size_t i = 0; i < kIssues; ++i) {
    std::vector<std::string> row{"Issue " + std::to_string(i + 1)};
    for (std::size_t l = 0; l < kLevels; ++l) {
      const auto count = std::count_if(matrices.begin(), matrices.end(), [&](const auto& m) {
        return m.cells[i][l] == MatrixCell::Concentrated;
      });
      row.push_back(format_percent(count, n, 1, Rounding::HalfUp, true) + "%");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------

bool transitivity_cycle_detect(const std::vector<PollWinner>& polls) {
  if (polls.size() != 3) throw Error(Errc::IncompleteTriple, "need exactly three model polls");
  std::set<std::string> models;
  std::set<std::pair<std::string, std::string>> pairs;
  std::map<std::string, int> wins;
  for (const auto& p : polls) {
    if (!p.winner) throw Error(Errc::IncompleteTriple, "poll " + p.model_a + " vs " + p.model_b + " is tied");
    if (*p.winner != p.model_a && *p.winner != p.model_b) {
      throw Error(Errc::IncompleteTriple, "winner " + *p.winner + " is not in its poll");
    }
    models.insert(p.model_a);
    models.insert(p.model_b);
    pairs.insert(std::minmax(p.model_a, p.model_b));
    ++wins[*p.winner];
  }
  if (models.size() != 3 || pairs.size() != 3) {
    throw Error(Errc::IncompleteTriple, "polls must compare three models pairwise");
  }
  // A cycle is the only pattern where every model wins exactly once.
  return std::all_of(models.begin(), models.end(), [&wins](const auto& m) { return wins[m] == 1; });
}

std::vector<TransitivityResult> transitivity_from_records(const Records& records,
                                                          const AnalysisOptions& options) {
  std::map<std::string, std::map<std::pair<std::string, std::string>, Tally>> by_participant;
  for (const auto* r : select(records, "model_disagreement", options)) {
    if (!r->provenance.model_a || !r->provenance.model_b) continue;
    if (options.exclude_tie_broken && r->tie_broken) continue;
    Tally& t = by_participant[r->participant_id][{*r->provenance.model_a, *r->provenance.model_b}];
    ++t.total;
    if (choice_of(*r) == 0) ++t.hits;
  }
  std::vector<TransitivityResult> out;
  for (const auto& [id, polls] : by_participant) {
    if (polls.size() != 3) continue;
    std::vector<PollWinner> winners;
    for (const auto& [pair, t] : polls) {
      PollWinner w{pair.first, pair.second, std::nullopt};
      if (2 * t.hits > t.total) w.winner = pair.first;
      else if (2 * t.hits < t.total) w.winner = pair.second;
      winners.push_back(std::move(w));
    }
    try {
      out.push_back({id, transitivity_cycle_detect(winners)});
    } catch (const Error& e) {
      if (e.code() != Errc::IncompleteTriple) throw;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

BiennialSummary biennial_consistency(const Records& records, const AnalysisOptions& options) {
  std::map<std::pair<UnitKey, int>, Tally> counts;
  for (const auto* r : select(records, "biennial", options)) {
    const auto& sp = r->provenance.sub_poll;
    if (!sp || *sp < 1 || *sp > 3) continue;
    if (options.exclude_tie_broken && r->tie_broken) continue;
    Tally& t = counts[{unit_of(*r), *sp}];
    ++t.total;
    if (choice_of(*r) == 0) ++t.hits;
  }
  BiennialSummary out;
  std::array<std::map<Amount, BiennialBucket>, 3> buckets;
  for (const auto& [key, t] : counts) {
    const int sp = key.second;
    const Amount level(std::max(t.hits, t.total - t.hits), t.total);
    auto& b = buckets[static_cast<std::size_t>(sp - 1)][level];
    b.level = level;
    ++b.users;
    b.ideal_answers += t.hits;
    b.answers += t.total;
  }
  for (int sp = 1; sp <= 3; ++sp) {
    auto& s = out.sub_polls[static_cast<std::size_t>(sp - 1)];
    s.sub_poll = sp;
    for (const auto& [level, b] : buckets[static_cast<std::size_t>(sp - 1)]) {
      s.buckets.push_back(b);
      s.users += b.users;
      s.ideal_answers += b.ideal_answers;
      s.answers += b.answers;
    }
  }
  return out;
}

std::vector<Table> biennial_tables(const BiennialSummary& summary) {
  static constexpr std::array<std::array<const char*, 2>, 3> kColumns{{
      {"Ideal Year 1", "Random"},
      {"Ideal Year 2", "Balanced Year 2"},
      {"Ideal Year 1", "Balanced Year 1"},
  }};
  std::vector<Table> out;
  std::set<Amount> levels;
  for (const auto& s : summary.sub_polls) {
    Table t;
    t.title = "Sub-poll " + std::to_string(s.sub_poll);
    const auto& cols = kColumns[static_cast<std::size_t>(s.sub_poll - 1)];
    t.header = {"Consistency level", "Number of users", cols[0], cols[1]};
    for (const auto& b : s.buckets) {
      levels.insert(b.level);
      t.rows.push_back({level_label(b.level), std::to_string(b.users), biennial_share(b.ideal_answers, b.answers),
                        biennial_share(b.answers - b.ideal_answers, b.answers)});
    }
    t.rows.push_back({"Total", std::to_string(s.users), biennial_share(s.ideal_answers, s.answers),
                      biennial_share(s.answers - s.ideal_answers, s.answers)});
    out.push_back(std::move(t));
  }

  Table cumulative;
  cumulative.title = "Biennial cumulative";
  cumulative.header.push_back("Sub-poll");
  for (const auto& l : levels) cumulative.header.push_back(threshold_label(l));
  cumulative.header.push_back("Participants");
  for (const auto& s : summary.sub_polls) {
    std::vector<std::string> row{"Sub-poll " + std::to_string(s.sub_poll)};
    for (const auto& l : levels) {
      std::int64_t at_or_above = 0;
      for (const auto& b : s.buckets) {
        if (b.level >= l) at_or_above += b.users;
      }
      row.push_back(format_percent(at_or_above, s.users, 2, Rounding::HalfUp) + "% (" +
                    std::to_string(at_or_above) + ")");
    }
    row.push_back(std::to_string(s.users));
    cumulative.rows.push_back(std::move(row));
  }
  out.push_back(std::move(cumulative));
  return out;
}

// ---------------------------------------------------------------------------

TriangleSummary triangle_summary(const Records& records, const AnalysisOptions& options) {
  std::map<UnitKey, std::vector<const ResponseRecord*>> units;
  for (const auto* r : select(records, "triangle_split", options)) units[unit_of(*r)].push_back(r);
  TriangleSummary out;
  for (const auto& [key, answers] : units) {
    ++out.participants;
    const bool balanced = std::any_of(answers.begin(), answers.end(), [](const auto* r) {
      return r->provenance.role == std::optional<std::string>("screening") && choice_of(*r) == 1;
    });
    if (balanced) {
      ++out.screened_out;
      continue;
    }
    for (const auto* r : answers) {
      if (r->provenance.role != std::optional<std::string>("experimental")) continue;
      if (options.exclude_tie_broken && r->tie_broken) continue;
      if (choice_of(*r) == 0) ++out.concentrated;
      else ++out.split;
    }
  }
  return out;
}

Table triangle_table(const TriangleSummary& s) {
  Table t;
  t.title = "Triangle split";
  t.header = {"Participants", "Screened out", "Concentrated change", "Split change"};
  const auto answers = s.concentrated + s.split;
  t.rows.push_back({std::to_string(s.participants), std::to_string(s.screened_out),
                    count_cell(s.concentrated, answers), count_cell(s.split, answers)});
  return t;
}

// ---------------------------------------------------------------------------

Report analyze_all(const Records& records, const AnalysisOptions& options) {
  std::set<std::string> generators;
  std::set<std::string> failed;
  if (options.exclude_failed_alertness) failed = failed_participants(records);
  for (const auto& r : records) {
    if (!r.is_alertness && !failed.count(r.participant_id)) generators.insert(r.provenance.generator);
  }
  if (generators.empty()) throw Error(Errc::EmptyResponseSet, "no responses to analyze");

  Report report;
  auto has = [&generators](const char* g) { return generators.count(g) > 0; };

  if (has("model_disagreement")) {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto* r : select(records, "model_disagreement", options)) {
      if (r->provenance.model_a && r->provenance.model_b) pairs.insert({*r->provenance.model_a, *r->provenance.model_b});
    }
    for (const auto& [a, b] : pairs) {
      const auto rates = pairwise_consistency(
          records,
          [a = a, b = b](const ResponseRecord& r) -> std::optional<int> {
            if (r.provenance.generator != "model_disagreement" || r.provenance.model_a != a ||
                r.provenance.model_b != b) {
              return std::nullopt;
            }
            return 0;
          },
          options);
      const std::string an = display_model(a), bn = display_model(b);
      report.tables.push_back(threshold_table(threshold_summary(rates, an, bn), an + " vs " + bn));
    }
    const auto cycles = transitivity_from_records(records, options);
    if (!cycles.empty()) {
      const auto n = static_cast<std::int64_t>(cycles.size());
      const auto cyclic = std::count_if(cycles.begin(), cycles.end(), [](const auto& c) { return c.cycle; });
      Table t;
      t.title = "Transitivity";
      t.header = {"Participants", "Non-transitive", "Transitivity rate"};
      t.rows.push_back({std::to_string(n), std::to_string(cyclic),
                        format_percent(n - cyclic, n, 1, Rounding::HalfUp, true) + "%"});
      report.tables.push_back(std::move(t));
    }
  }
  if (has("single_peaked") || has("single_peaked_rounded")) {
    report.tables.push_back(lambda_table(consistency_by_lambda(records, options)));
    std::vector<std::pair<std::string, std::vector<ParticipantRate>>> rows;
    for (const char* g : {"single_peaked", "single_peaked_rounded"}) {
      if (!has(g)) continue;
      auto pred = prefers_option(g, 1);
      auto rates = pairwise_consistency(
          records,
          [&pred, &options](const ResponseRecord& r) -> std::optional<int> {
            if (options.exclude_tie_broken && r.tie_broken) return std::nullopt;
            return pred(r);
          },
          options);
      rows.emplace_back(std::string(g) == "single_peaked" ? "Single-peaked" : "Single-peaked (rounded)",
                        std::move(rates));
    }
    report.tables.push_back(rate_threshold_table("Single-peaked agreement", "Battery", rows));
  }
  if (has("peak_linear")) report.tables.push_back(peak_linear_table(peak_linear_consistency(records, options)));
  if (has("project_symmetry") || has("sign_symmetry")) {
    std::vector<std::pair<std::string, std::vector<ParticipantRate>>> rows;
    if (has("project_symmetry")) rows.emplace_back("Project", symmetry_consistency(records, SymmetryMode::Project, options));
    if (has("sign_symmetry")) rows.emplace_back("Sign", symmetry_consistency(records, SymmetryMode::Sign, options));
    report.tables.push_back(rate_threshold_table("Symmetry", "Symmetry", rows));
  }
  if (has("cyclic_asymmetry")) report.tables.push_back(ranking_table(ranking_consistency(records, options)));
  if (has("concentrated_vs_distributed")) {
    const auto matrices = preference_matrices(records, options);
    report.tables.push_back(matrix_class_table(matrices));
    report.tables.push_back(matrix_heatmap_table(matrices));
  }
  if (has("biennial")) {
    for (auto& t : biennial_tables(biennial_consistency(records, options))) report.tables.push_back(std::move(t));
  }
  if (has("triangle_split")) report.tables.push_back(triangle_table(triangle_summary(records, options)));
  return report;
}

}  // namespace pbpoll
