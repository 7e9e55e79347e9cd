// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "pbpoll/http.hpp"
#include "pbpoll/random.hpp"
#include "support.hpp"

using namespace testing;

namespace {

struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (std::fabs(got - want) > tol) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want << " +-" << tol;
      failures.push_back(os.str());
    }
  }
  template <typename T>
  void equal(const T& got, const T& want, const std::string& what) {
    if (!(got == want)) failures.push_back(what);
  }
};

int failed = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    std::ostringstream os;
    os << "took " << secs << " s, budget " << budget_s << " s";
    c.failures.push_back(os.str());
  }
  const bool ok = c.failures.empty();
  if (!ok) ++failed;
  std::printf("%s  %s  (%.2f s)\n", ok ? "PASS" : "FAIL", name.c_str(), secs);
  for (const auto& f : c.failures) std::printf("      - %s\n", f.c_str());
  std::fflush(stdout);
}

BudgetAllocation as_alloc(const Option& o) { return std::get<BudgetAllocation>(o); }

Vec vec(std::int64_t a, std::int64_t b, std::int64_t c) { return {Amount(a), Amount(b), Amount(c)}; }

// -- 1. worked examples -----------------------------------------------------------

void utility_examples(Check& c) {
  const auto l1 = UtilityModel::l1();
  const auto l2 = UtilityModel::l2();
  const auto leo = UtilityModel::leontief();
  const auto p = alloc(30, 30, 40);
  c.near(distance_variant(l1, p, alloc(75, 5, 20)), 90, 1e-9, "l1 [75,5,20]");
  c.near(distance_variant(l1, p, alloc(30, 70, 0)), 80, 1e-9, "l1 [30,70,0]");
  c.near(distance_variant(l1, p, alloc(45, 50, 5)), 70, 1e-9, "l1 [45,50,5]");
  c.near(distance_variant(l1, p, alloc(10, 5, 85)), 90, 1e-9, "l1 [10,5,85]");
  c.near(distance_variant(l2, p, alloc(75, 5, 20)), 55.23, 0.01, "l2 [75,5,20]");
  c.near(distance_variant(l2, p, alloc(30, 70, 0)), 56.57, 0.01, "l2 [30,70,0]");
  c.near(distance_variant(l2, p, alloc(45, 50, 5)), 43.01, 0.01, "l2 [45,50,5]");
  c.near(distance_variant(l2, p, alloc(10, 5, 85)), 55.23, 0.01, "l2 [10,5,85]");
  c.near(evaluate(leo, p, alloc(45, 50, 5)), 0.125, 0.005, "leontief [45,50,5]");
  c.near(evaluate(leo, p, alloc(10, 5, 85)), 0.17, 0.005, "leontief [10,5,85]");

  const auto ideal = alloc(50, 30, 20);
  const std::array<BudgetAllocation, 3> qs{alloc(41, 30, 29), alloc(43, 40, 17), alloc(43, 26, 31)};
  const std::array<double, 3> dist{18, 20, 22};
  const std::array<double, 3> ratio{0.82, 0.85, 0.86};
  for (std::size_t i = 0; i < 3; ++i) {
    c.near(distance_variant(l1, ideal, qs[i]), dist[i], 1e-9, "intro l1 " + qs[i].to_string());
    c.near(evaluate(leo, ideal, qs[i]), ratio[i], 0.005, "intro leontief " + qs[i].to_string());
  }
}

void convex_examples(Check& c) {
  const auto p = alloc(30, 40, 30);
  struct Row {
    int tenth;
    BudgetAllocation q;
    std::vector<Amount> weighted;
  };
  const std::vector<Row> rows{
      {1, alloc(20, 60, 20), {21, 58, 21}},
      {2, alloc(25, 35, 40), {26, 36, 38}},
      {3, alloc(40, 20, 40), {37, 26, 37}},
      {4, alloc(10, 70, 20), {18, 58, 24}},
      {5, alloc(50, 30, 20), {40, 35, 25}},
      {5, alloc(60, 15, 25), {45, Amount(55, 2), Amount(55, 2)}},
      {6, alloc(35, 45, 20), {32, 42, 26}},
      {7, alloc(40, 50, 10), {33, 43, 24}},
      {8, alloc(20, 40, 40), {28, 40, 32}},
      {9, alloc(45, 25, 30), {Amount(63, 2), Amount(77, 2), 30}},
  };
  for (const auto& r : rows) {
    const Amount lambda(r.tenth, 10);
    const Question q = convex_question(p, r.q, lambda, false);
    c.equal(as_alloc(q.options[0]), r.q, "convex q at " + format_amount(lambda));
    c.equal(as_alloc(q.options[1]), BudgetAllocation::from(r.weighted),
            "convex row at " + format_amount(lambda) + " for " + r.q.to_string());
  }
  const Question rounded = convex_question(p, alloc(45, 25, 30), Amount(9, 10), true);
  c.equal(as_alloc(rounded.options[1]), alloc(30, 40, 30), "rounded c at 0.9");
}

void cyclic_example(Check& c) {
  const Vec p = vec(85, 15, 5);
  struct Row {
    Amount lambda;
    bool pd;
    std::array<Vec, 3> options;
  };
  const std::vector<Row> rows{
      {Amount(1, 5), true, {vec(87, 14, 4), vec(84, 17, 4), vec(84, 14, 7)}},
      {Amount(2, 5), true, {vec(89, 13, 3), vec(83, 19, 3), vec(83, 13, 9)}},
      {Amount(1, 5), false, {vec(83, 16, 6), vec(86, 13, 6), vec(86, 16, 3)}},
      {Amount(2, 5), false, {vec(81, 17, 7), vec(87, 11, 7), vec(87, 17, 1)}},
  };
  int n = 0;
  for (const auto& r : rows) {
    ++n;
    c.equal(cyclic_shift_vectors(p, r.lambda, r.pd), r.options, "cyclic question " + std::to_string(n));
  }
}

void concentrated_example(Check& c) {
  const auto battery = gen_concentrated_vs_distributed(alloc(60, 30, 10));
  bool found = false;
  for (const auto& q : battery.questions) {
    if (q.provenance.category != std::optional<int>(0) || q.provenance.level != std::optional<int>(2)) continue;
    found = true;
    c.equal(as_alloc(q.options[0]), alloc(56, 32, 12), "option A");
    c.equal(as_alloc(q.options[1]), alloc(64, 28, 8), "option B");
  }
  c.expect(found, "no question for the first category at level 2");
}

void rotation_examples(Check& c) {
  const auto p = alloc(30, 30, 40);
  const auto set = project_symmetry_set(p, alloc(50, 34, 16), alloc(20, 25, 55), 0);
  c.expect(set.has_value(), "project symmetry set rejected");
  if (set) {
    c.expect(set->size() == 3, "project symmetry set size");
    if (set->size() == 3) {
      c.equal(as_alloc((*set)[1].options[0]), alloc(6, 50, 44), "rotation 1 q1");
      c.equal(as_alloc((*set)[1].options[1]), alloc(45, 20, 35), "rotation 1 q2");
      c.equal(as_alloc((*set)[2].options[0]), alloc(34, 6, 60), "rotation 2 q1");
      c.equal(as_alloc((*set)[2].options[1]), alloc(25, 45, 30), "rotation 2 q2");
    }
  }
  const DeviationVector q(vec(-20, 10, 10));
  const auto [q1, q2] = split_change(q, SplitRule::AnchorFirst);
  c.equal(q1, DeviationVector(vec(-10, 10, 0)), "triangle q1");
  c.equal(q2, DeviationVector(vec(-10, 0, 10)), "triangle q2");
  const auto tq = triangle_question(p, q, SplitRule::AnchorFirst, 1);
  c.expect(tq.has_value(), "triangle question rejected");
  if (tq) {
    const auto& concentrated = std::get<YearPair>(tq->options[0]);
    const auto& split = std::get<YearPair>(tq->options[1]);
    c.equal(concentrated.year1, alloc(30, 30, 40), "concentrated year 1");
    c.equal(concentrated.year2, alloc(10, 40, 50), "concentrated year 2");
    c.equal(split.year1, alloc(20, 40, 40), "split year 1");
    c.equal(split.year2, alloc(20, 30, 50), "split year 2");
  }
}

// -- 2. generator properties --------------------------------------------------------

bool valid_alloc(const BudgetAllocation& a) {
  Amount sum(0);
  for (const auto& x : a.entries()) {
    if (x < Amount(0) || x > Amount(100)) return false;
    sum += x;
  }
  return sum == Amount(100);
}

bool all_valid(const Question& q) {
  for (const auto& o : q.options) {
    if (const auto* a = std::get_if<BudgetAllocation>(&o)) {
      if (!valid_alloc(*a)) return false;
    } else {
      const auto& y = std::get<YearPair>(o);
      if (!valid_alloc(y.year1) || !valid_alloc(y.year2)) return false;
    }
  }
  return true;
}

/// No valid concentrated pair exists for this ideal, category and level,
/// checked by brute force over both constructions.
bool no_concentrated_pair(const BudgetAllocation& p, int category, std::int64_t x) {
  auto ok = [&](std::int64_t mag) {
    Vec a{}, b{};
    for (std::size_t j = 0; j < kIssues; ++j) {
      const Amount d = static_cast<int>(j) == category ? Amount(-2 * mag) : Amount(mag);
      a[j] = p[j] + d;
      b[j] = p[j] - d;
      if (a[j] < Amount(0) || b[j] < Amount(0) || a[j] > Amount(100) || b[j] > Amount(100)) return false;
    }
    return true;
  };
  return !ok(x);
}

void generator_properties(Check& c) {
  constexpr int kIdeals = 10000;
  const auto& grid = AllocationSampler::grid5();
  const auto two_positive = grid.filtered([](const BudgetAllocation& a) { return a.positive_count() >= 2; });
  const auto all_positive = grid.filtered([](const BudgetAllocation& a) { return a.all_positive(); });
  std::map<std::string, std::int64_t> invalid, predicate, questions, refusals;

  const std::vector<std::pair<UtilityModel, UtilityModel>> model_pairs{
      {UtilityModel::l1(), UtilityModel::l2()},
      {UtilityModel::l1(), UtilityModel::leontief()},
      {UtilityModel::l2(), UtilityModel::leontief()}};

  for (int i = 0; i < kIdeals; ++i) {
    const std::uint64_t seed = derive_seed(0xACCE55, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    const BudgetAllocation p = two_positive.sample(rng);
    const BudgetAllocation pp = all_positive.sample(rng);

    auto count = [&](const std::string& name, const QuestionBattery& b) {
      for (const auto& q : b.questions) {
        ++questions[name];
        if (!all_valid(q) || !question_well_formed(q)) ++invalid[name];
      }
    };

    // Disagreement: the two models must strictly disagree on every pair.
    const auto& [ma, mb] = model_pairs[static_cast<std::size_t>(i) % model_pairs.size()];
    const BudgetAllocation& dp = (ma.kind() == ModelKind::Leontief || mb.kind() == ModelKind::Leontief) ? pp : p;
    try {
      const auto b = gen_model_disagreement(dp, ma, mb, 10, seed);
      count("model_disagreement", b);
      for (const auto& q : b.questions) {
        const auto q1 = as_alloc(q.options[0]);
        const auto q2 = as_alloc(q.options[1]);
        if (prefer(ma, dp, q1, q2) != Preference::First || prefer(mb, dp, q1, q2) != Preference::Second) {
          ++predicate["model_disagreement"];
        }
      }
    } catch (const Error& e) {
      if (e.code() != Errc::GenerationExhausted) throw;
      ++refusals["model_disagreement"];
    }

    ConvexOptions plain;
    count("single_peaked", gen_convex_combinations(p, plain, seed));
    ConvexOptions rounded;
    rounded.round_grid5 = true;
    count("single_peaked_rounded", gen_convex_combinations(p, rounded, seed));
    count("peak_linear", gen_peak_linear(p));
    try {
      count("project_symmetry", gen_project_symmetry(pp, 4, seed));
    } catch (const Error& e) {
      if (e.code() != Errc::GenerationExhausted) throw;
      ++refusals["project_symmetry"];
    }
    try {
      count("sign_symmetry", gen_sign_symmetry(p, 4, seed));
    } catch (const Error& e) {
      if (e.code() != Errc::GenerationExhausted) throw;
      ++refusals["sign_symmetry"];
    }
    count("cyclic_asymmetry", gen_cyclic_asymmetry_ranking(pp));

    // Concentrated pairs reflect through p unless they came from the fallback.
    try {
      const auto b = gen_concentrated_vs_distributed(pp);
      count("concentrated_vs_distributed", b);
      for (const auto& q : b.questions) {
        if (q.provenance.fallback == std::optional<bool>(true)) continue;
        const auto a = as_alloc(q.options[0]);
        const auto bb = as_alloc(q.options[1]);
        for (std::size_t j = 0; j < kIssues; ++j) {
          if (a[j] + bb[j] != Amount(2) * pp[j]) {
            ++predicate["concentrated_vs_distributed"];
            break;
          }
        }
      }
    } catch (const Error& e) {
      if (e.code() != Errc::FallbackExhausted) throw;
      // Only acceptable when brute force agrees that some cell has no pair.
      bool justified = false;
      const std::int64_t base = concentrated_base_magnitude(pp);
      for (int cat = 0; cat < 3 && !justified; ++cat) {
        for (int level = 1; level <= 4 && !justified; ++level) {
          justified = no_concentrated_pair(pp, cat, base * level) && no_concentrated_pair(pp, cat, level);
        }
      }
      if (!justified) ++predicate["concentrated_vs_distributed"];
      ++refusals["concentrated_vs_distributed"];
    }

    // Biennial balancing options average to the ideal over the two years.
    try {
      const auto b = gen_biennial(p, 4, seed);
      count("biennial", b);
      for (const auto& q : b.questions) {
        for (const auto& o : q.options) {
          const auto& y = std::get<YearPair>(o);
          if (y.year1 == p || y.year2 == p) continue;
          for (std::size_t j = 0; j < kIssues; ++j) {
            if (y.year1[j] + y.year2[j] != Amount(2) * p[j]) {
              ++predicate["biennial"];
              break;
            }
          }
        }
      }
    } catch (const Error& e) {
      if (e.code() != Errc::GenerationExhausted) throw;
      ++refusals["biennial"];
    }

    // Triangle: the split parts add up to the concentrated change.
    try {
      const auto b = gen_triangle_split(pp, 2, seed);
      count("triangle_split", b);
      for (const auto& q : b.questions) {
        if (q.provenance.role != std::optional<std::string>("experimental")) continue;
        const auto& conc = std::get<YearPair>(q.options[0]);
        const auto& split = std::get<YearPair>(q.options[1]);
        const auto change = deviation(conc.year1, conc.year2);
        const auto d1 = deviation(pp, split.year1);
        const auto d2 = deviation(pp, split.year2);
        if (!(d1 + d2 == change) || !(conc.year1 == pp)) ++predicate["triangle_split"];
      }
    } catch (const Error& e) {
      if (e.code() != Errc::GenerationExhausted) throw;
      ++refusals["triangle_split"];
    }
  }

  for (const auto& [name, n] : questions) {
    c.expect(invalid[name] == 0, name + ": " + std::to_string(invalid[name]) + " invalid questions");
    c.expect(predicate[name] == 0, name + ": " + std::to_string(predicate[name]) + " predicate violations");
    c.expect(n > 0, name + ": no questions generated");
  }
  for (const auto& [name, n] : refusals) {
    std::printf("      note: %s refused %lld of %d ideals\n", name.c_str(), static_cast<long long>(n), kIdeals);
  }
}

// -- 3. synthetic agents ------------------------------------------------------------

CohortResult cohort(const UtilityModel& model, BatteryKind kind, int n, double noise, std::uint64_t seed,
                    bool alertness = true) {
  BatteryConfig config;
  config.kind = kind;
  config.alertness = alertness;
  config.shuffle = true;
  const bool positive = requires_all_positive(config) || model.kind() == ModelKind::Leontief;
  const auto agents = random_cohort(n, model, noise, {1.0, 1.0}, positive, seed);
  return run_cohort(agents, config, derive_seed(seed, 1));
}

double pooled(const std::vector<ParticipantRate>& rates) {
  std::int64_t hits = 0, total = 0;
  for (const auto& r : rates) {
    hits += r.hits;
    total += r.total;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

void synthetic_oracles(Check& c) {
  AnalysisOptions no_ties;
  no_ties.exclude_tie_broken = true;
  const std::vector<std::pair<std::string, UtilityModel>> models{
      {"l1", UtilityModel::l1()}, {"l2", UtilityModel::l2()}, {"leontief", UtilityModel::leontief()}};
  std::uint64_t seed = 1000;
  for (const auto& [name, model] : models) {
    const auto sp = cohort(model, BatteryKind::SinglePeaked, 40, 0.0, ++seed);
    c.expect(sp.failures.empty(), name + " single-peaked cohort had failures");
    std::int64_t hits = 0, pairs = 0;
    for (const auto& row : consistency_by_lambda(sp.records)) {
      hits += row.consistent;
      pairs += row.pairs;
    }
    c.expect(pairs == 400 && hits == pairs,
             name + " single-peaked " + std::to_string(hits) + "/" + std::to_string(pairs));

    const auto pl = cohort(model, BatteryKind::PeakLinear, 40, 0.0, ++seed);
    c.expect(pl.failures.empty(), name + " peak-linear cohort had failures");
    const auto s = peak_linear_consistency(pl.records, no_ties);
    std::int64_t ph = 0, pt = 0;
    for (const auto& r : s.participants) {
      ph += r.hits;
      pt += r.total;
    }
    c.expect(pt > 0 && ph == pt, name + " peak-linear " + std::to_string(ph) + "/" + std::to_string(pt));
  }

  for (const auto& [kind, mode, label] :
       {std::tuple{BatteryKind::ProjectSymmetry, SymmetryMode::Project, "project"},
        std::tuple{BatteryKind::SignSymmetry, SymmetryMode::Sign, "sign"}}) {
    const auto r = cohort(UtilityModel::l1(), kind, 40, 0.0, ++seed);
    const auto rates = symmetry_consistency(r.records, mode, no_ties);
    for (const auto& f : r.failures) {
      std::printf("      note: %s agent %s skipped: %s\n", label, f.participant_id.c_str(), f.message.c_str());
    }
    // L1 is indifferent on some sets; an agent tied on every set has
    // nothing to measure once tie-broken answers are dropped.
    std::set<std::string> measured, all_tied;
    for (const auto& x : rates) measured.insert(x.participant_id);
    std::map<std::string, bool> tied;
    for (const auto& rec : r.records) {
      if (rec.is_alertness) continue;
      auto it = tied.emplace(rec.participant_id, true).first;
      it->second = it->second && rec.tie_broken;
    }
    for (const auto& [id, t] : tied) {
      if (t) all_tied.insert(id);
    }
    std::printf("      note: %s symmetry: %zu measured, %zu tied on every set, %zu skipped\n", label,
                measured.size(), all_tied.size(), r.failures.size());
    c.expect(measured.size() + all_tied.size() + r.failures.size() == 40,
             std::string(label) + " symmetry participants " + std::to_string(rates.size()));
    c.expect(pooled(rates) == 1.0, std::string(label) + " symmetry rate " + std::to_string(pooled(rates)));
  }

  {
    const auto model = UtilityModel::weighted_asymmetric({-1, -1, -1}, {-5, -1, -1});
    const auto r = cohort(model, BatteryKind::ConcentratedVsDistributed, 40, 0.0, ++seed);
    const auto m = preference_matrices(r.records);
    std::int64_t full = 0;
    for (const auto& x : m) full += x.classification == MatrixClass::FullyConsistent;
    c.expect(m.size() + r.failures.size() == 40, "weighted asymmetric cohort size");
    c.expect(!m.empty() && full == static_cast<std::int64_t>(m.size()),
             "weighted asymmetric fully consistent " + std::to_string(full) + "/" + std::to_string(m.size()));
  }
  {
    const auto model = UtilityModel::monotone_asymmetric({1.0, 0.8, 1.3}, {1.7, 2.1, 0.9}, 1.0, 1.6);
    const auto r = cohort(model, BatteryKind::ConcentratedVsDistributed, 40, 0.0, ++seed);
    const auto m = preference_matrices(r.records);
    std::int64_t monotone = 0;
    for (const auto& x : m) monotone += x.monotone;
    c.expect(!m.empty() && monotone == static_cast<std::int64_t>(m.size()),
             "monotone asymmetric rows monotone " + std::to_string(monotone) + "/" + std::to_string(m.size()));
  }
  {
    const auto r = cohort(UtilityModel::l1(), BatteryKind::SinglePeaked, 1100, 0.5, ++seed, false);
    std::int64_t hits = 0, pairs = 0;
    for (const auto& row : consistency_by_lambda(r.records)) {
      hits += row.consistent;
      pairs += row.pairs;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(pairs);
    c.expect(pairs >= 10000, "noisy cohort answered only " + std::to_string(pairs));
    c.expect(rate >= 0.72 && rate <= 0.78, "noisy cohort consistency " + std::to_string(rate));
    std::printf("      note: noisy cohort %lld/%lld = %.4f\n", static_cast<long long>(hits),
                static_cast<long long>(pairs), rate);
  }
}

// -- 4. analysis tables ---------------------------------------------------------------

void analysis_goldens(Check& c) {
  const auto rates = pairwise_consistency(summary_records(), prefers_option("model_disagreement", 0));
  const auto summary = threshold_table(threshold_summary(rates, "L1", "L2"), "L1 vs L2");
  c.equal(summary.header,
          std::vector<std::string>{"Comparison", "over 60%", "over 70%", "over 80%", "over 90%", "100%", "Participants"},
          "summary header");
  c.equal(summary.rows, summary_expected_rows(), "summary rows");

  const auto lambda = lambda_table(consistency_by_lambda(lambda_records()));
  c.equal(lambda.header, std::vector<std::string>{"λ", "Average Consistency (%)", "Total Pairs"}, "lambda header");
  c.equal(lambda.rows, lambda_expected_rows(), "lambda rows");

  const auto pl = peak_linear_table(peak_linear_consistency(peak_linear_records()));
  c.equal(pl.header,
          std::vector<std::string>{"Percentile (λ)", "A vs. B", "A vs. C", "B vs. C", "Average Consistency"},
          "peak-linear header");
  c.equal(pl.rows, peak_linear_expected_rows(), "peak-linear rows");

  const auto ranking = ranking_table(ranking_consistency(ranking_records()));
  c.equal(ranking.header, std::vector<std::string>{"", "over 1/3", "over 2/3", "3/3 consistent"}, "ranking header");
  c.equal(ranking.rows, ranking_expected_rows(), "ranking rows");

  const auto biennial = biennial_tables(biennial_consistency(biennial_records()));
  const auto expected = biennial_expected_rows();
  c.expect(biennial.size() == expected.size(), "biennial table count");
  for (std::size_t i = 0; i < std::min(biennial.size(), expected.size()); ++i) {
    c.equal(biennial[i].rows, expected[i], "biennial table " + biennial[i].title);
  }

  const auto cycle = transitivity_from_records(cycle_records("p1"));
  c.expect(cycle.size() == 1 && cycle[0].cycle, "cycle triple not flagged");
  const std::vector<PollWinner> triple{
      {"l1", "leontief", "l1"}, {"l1", "l2", "l2"}, {"l2", "leontief", "leontief"}};
  c.expect(transitivity_cycle_detect(triple), "cycle detector on the winners");
}

// -- 5. service -----------------------------------------------------------------------

struct Served {
  TempDir dir;
  std::unique_ptr<PollService> service;
  std::unique_ptr<HttpServer> server;
  std::thread thread;
  int port = 0;

  explicit Served(const std::string& admin) {
    ServiceOptions o;
    o.data_dir = dir.path();
    o.admin_token = admin;
    service = std::make_unique<PollService>(o);
    server = std::make_unique<HttpServer>(*service, "");
    port = server->bind("127.0.0.1", 0);
    thread = std::thread([this] { server->listen(); });
    while (!server->running()) std::this_thread::yield();
  }
  ~Served() {
    server->stop();
    thread.join();
  }
};

std::vector<ResponseRecord> export_records(ApiClient& api, const std::string& poll, const std::string& admin) {
  const auto r = api.get("/polls/" + poll + "/export", admin);
  if (r.status != 200) throw std::runtime_error("export returned " + std::to_string(r.status));
  return records_from_ndjson(r.raw);
}

void service_end_to_end(Check& c) {
  const std::string admin = "admin-secret";
  Served s(admin);
  ApiClient api(s.port);

  // A 12-question biennial session; sub-polls cycle 1, 2, 3.
  const auto created = api.post("/polls", Json{{"kind", "biennial"}, {"k", 4}, {"seed", 77}}, admin);
  c.expect(created.status == 201, "create biennial poll: " + std::to_string(created.status));
  const std::string poll = created.body.value("poll_id", "");
  AgentSpec agent;
  agent.ideal = make_ideal(alloc(30, 30, 40), "walker");
  const std::string state = drive_agent_http(api, poll, "walker", agent, 5);
  c.expect(state == "completed", "biennial session ended " + state);
  const auto records = export_records(api, poll, admin);
  std::vector<int> order;
  int checks = 0;
  for (const auto& r : records) {
    if (r.is_alertness) {
      ++checks;
      continue;
    }
    order.push_back(r.provenance.sub_poll.value_or(0));
  }
  c.expect(checks == 2, "alertness checks answered: " + std::to_string(checks));
  c.equal(order, std::vector<int>{1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3}, "sub-poll order");

  // Failing the first check blocks the participant.
  const auto started = api.post("/polls/" + poll + "/sessions", Json{{"participant_id", "careless"}});
  const std::string sid = started.body.value("session_id", "");
  const std::string token = started.body.value("token", "");
  api.post("/sessions/" + sid + "/ideal", Json{{"values", {30, 30, 40}}, {"rescale", false}}, token);
  const auto first = api.get("/sessions/" + sid + "/next", token);
  const Json& q = first.body["question"];
  int wrong = -1;
  for (int i = 0; i < 2; ++i) {
    if (!(as_alloc(option_from_json(q["options"][static_cast<std::size_t>(i)])) == alloc(30, 30, 40))) wrong = i;
  }
  c.expect(q.value("position", -1) == 0 && wrong >= 0, "first question is not an alertness check");
  const auto failed_answer =
      api.post("/sessions/" + sid + "/answers", Json{{"question_id", q["question_id"]}, {"choice", wrong}}, token);
  c.expect(failed_answer.body.value("state", "") == "blocked", "failed check left the session " +
                                                                   failed_answer.body.value("state", "?"));
  const auto again = api.post("/polls/" + poll + "/sessions", Json{{"participant_id", "careless"}});
  c.expect(again.status == 403, "second session for a blocked participant: " + std::to_string(again.status));

  // Export of an HTTP-driven cohort analyzes exactly like the library run.
  const std::uint64_t seed = 4242;
  BatteryConfig config;
  config.kind = BatteryKind::SinglePeaked;
  config.alertness = true;
  config.shuffle = true;
  const auto agents = random_cohort(40, UtilityModel::l1(), 0.0, {1.0, 1.0}, false, 99);
  const auto cohort_poll = api.post("/polls", Json{{"kind", "single_peaked"}, {"seed", seed}}, admin);
  c.expect(cohort_poll.status == 201, "create cohort poll: " + cohort_poll.raw);
  const std::string cp = cohort_poll.body.value("poll_id", "");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto st = drive_agent_http(api, cp, agents[i].ideal.participant_id, agents[i], derive_seed(seed, 2 * i + 1));
    c.expect(st == "completed", agents[i].ideal.participant_id + " ended " + st);
  }
  const auto direct = run_cohort(agents, config, seed);
  const std::string from_service = render_report(analyze_all(export_records(api, cp, admin)), ReportFormat::Markdown);
  const std::string from_library = render_report(analyze_all(direct.records), ReportFormat::Markdown);
  c.expect(from_service == from_library, "exported cohort report differs from the library report");

  // Replay rebuilds the same state.
  const Json live = s.service->snapshot();
  ServiceOptions o;
  o.data_dir = s.dir.path();
  o.admin_token = admin;
  const PollService replayed(o);
  c.expect(replayed.snapshot() == live, "replayed snapshot differs");
}

}  // namespace

int main() {
  criterion("1.1 utility values on the worked examples", 1, utility_examples);
  criterion("1.2 convex rows and the rounded blend", 1, convex_examples);
  criterion("1.3 cyclic asymmetry options", 1, cyclic_example);
  criterion("1.4 concentrated pair at level 2", 1, concentrated_example);
  criterion("1.5 project rotations and triangle split", 1, rotation_examples);
  criterion("2   generator properties over 10000 ideals", 60, generator_properties);
  criterion("3   synthetic agent oracles", 120, synthetic_oracles);
  criterion("4   analysis tables and the transitivity cycle", 5, analysis_goldens);
  criterion("5   service end to end", 60, service_end_to_end);
  std::printf("%s\n", failed == 0 ? "ALL PASS" : "SOME CRITERIA FAILED");
  return failed == 0 ? 0 : 1;
}
