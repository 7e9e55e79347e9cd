#include "pbpoll/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "pbpoll/error.hpp"

namespace pbpoll {

namespace {

std::string question_id(std::string_view generator, std::size_t n) {
  return std::string(generator) + "-" + std::to_string(n);
}

Question pairwise(const BudgetAllocation& a, const BudgetAllocation& b, Provenance prov) {
  Question q;
  q.kind = QuestionKind::Pairwise;
  q.options = {a, b};
  q.provenance = std::move(prov);
  return q;
}

Question biennial(const YearPair& a, const YearPair& b, Provenance prov) {
  Question q;
  q.kind = QuestionKind::Biennial;
  q.options = {a, b};
  q.provenance = std::move(prov);
  return q;
}

void number_questions(QuestionBattery& battery) {
  for (std::size_t i = 0; i < battery.questions.size(); ++i) {
    battery.questions[i].id = question_id(battery.battery_kind, i + 1);
  }
}

void require_positive_k(int k) {
  if (k < 1) throw Error(Errc::InvalidConfig, "k must be at least 1");
}

DeviationVector vec_dev(std::int64_t a, std::int64_t b, std::int64_t c) {
  return DeviationVector(Vec{Amount(a), Amount(b), Amount(c)});
}

/// Left cyclic shift: [x1,x2,x3] -> [x2,x3,x1] for t = 1.
DeviationVector shift_left(const DeviationVector& d, std::size_t t) {
  return rotate(d, (kIssues - t % kIssues) % kIssues);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Random allocations

AllocationSampler::AllocationSampler(const RandomAllocationConfig& config) {
  if (config.grid <= 0 || kTotalBudget % config.grid != 0) {
    throw Error(Errc::InvalidConfig, "grid must be a positive divisor of 100");
  }
  Amount lower = config.min_entry;
  if (config.require_all_positive && lower < config.grid) lower = config.grid;
  for (std::int64_t a = 0; a <= kTotalBudget; a += config.grid) {
    for (std::int64_t b = 0; a + b <= kTotalBudget; b += config.grid) {
      const std::int64_t c = kTotalBudget - a - b;
      if (a < lower || b < lower || c < lower) continue;
      support_.push_back(BudgetAllocation::from_ints({a, b, c}));
    }
  }
  if (support_.empty()) {
    throw Error(Errc::Unsatisfiable, "no grid allocation satisfies the sampling constraints");
  }
}

const AllocationSampler& AllocationSampler::grid5() {
  static const AllocationSampler sampler{RandomAllocationConfig{}};
  return sampler;
}

const BudgetAllocation& AllocationSampler::sample(Rng& rng) const {
  if (support_.empty()) throw Error(Errc::GenerationExhausted, "empty sampling support");
  return support_[rng.index(support_.size())];
}

BudgetAllocation sample_random_allocation(const RandomAllocationConfig& config, Rng& rng) {
  if (config.grid == kGrid && config.min_entry == Amount(0) && !config.require_all_positive) {
    return AllocationSampler::grid5().sample(rng);
  }
  return AllocationSampler(config).sample(rng);
}

// ---------------------------------------------------------------------------
// Model disagreement

QuestionBattery gen_model_disagreement(const BudgetAllocation& p, const UtilityModel& model_a,
                                       const UtilityModel& model_b, int k, std::uint64_t seed) {
  require_positive_k(k);
  if (!evaluable_at(model_a, p) || !evaluable_at(model_b, p)) {
    throw Error(Errc::LeontiefZeroIdeal, "Leontief utility needs every ideal entry positive");
  }
  const auto& sampler = AllocationSampler::grid5();
  QuestionBattery out{"model_disagreement", seed, p, {}};
  for (int i = 0; i < k; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    bool accepted = false;
    for (int attempt = 0; attempt < kRejectionCap && !accepted; ++attempt) {
      const BudgetAllocation q1 = sampler.sample(rng);
      const BudgetAllocation q2 = sampler.sample(rng);
      if (prefer(model_a, p, q1, q2) == Preference::First &&
          prefer(model_b, p, q1, q2) == Preference::Second) {
        Provenance prov;
        prov.generator = "model_disagreement";
        prov.model_a = std::string(model_a.name());
        prov.model_b = std::string(model_b.name());
        out.questions.push_back(pairwise(q1, q2, std::move(prov)));
        accepted = true;
      }
    }
    if (!accepted) {
      throw Error(Errc::GenerationExhausted,
                  "no disagreeing pair found for " + p.to_string() + " within the attempt cap");
    }
  }
  number_questions(out);
  return out;
}

// ---------------------------------------------------------------------------
// Convex combinations

std::vector<Amount> default_convex_lambdas() {
  std::vector<Amount> out;
  for (int i = 1; i <= 9; ++i) {
    out.emplace_back(i, 10);
    if (i == 5) out.emplace_back(i, 10);
  }
  return out;
}

BudgetAllocation convex_combination(const BudgetAllocation& p, const BudgetAllocation& q,
                                    const Amount& lambda) {
  Vec c;
  for (std::size_t j = 0; j < kIssues; ++j) c[j] = lambda * p[j] + (Amount(1) - lambda) * q[j];
  return validate_allocation(c, false);
}

BudgetAllocation round_convex_to_grid(const BudgetAllocation& c) {
  Vec v = c.entries();
  Amount partial(0);
  for (std::size_t j = 0; j + 1 < kIssues; ++j) {
    v[j] = Amount(round_half_even(v[j]));
    partial += v[j];
  }
  v[kIssues - 1] = Amount(kTotalBudget) - partial;
  for (auto& x : v) x = round_to_multiple(x, kGrid);
  const Amount sum = std::accumulate(v.begin(), v.end(), Amount(0));
  if (sum != Amount(kTotalBudget)) {
    const auto largest = std::max_element(v.begin(), v.end());
    *largest += Amount(kTotalBudget) - sum;
  }
  return validate_allocation(v, true);
}

Question convex_question(const BudgetAllocation& p, const BudgetAllocation& q,
                         const Amount& lambda, bool round_grid5) {
  if (!(lambda > 0 && lambda < 1)) {
    throw Error(Errc::InvalidConfig, "lambda must lie strictly between 0 and 1");
  }
  BudgetAllocation c = convex_combination(p, q, lambda);
  if (round_grid5) c = round_convex_to_grid(c);
  Provenance prov;
  prov.generator = round_grid5 ? "single_peaked_rounded" : "single_peaked";
  prov.lambda = lambda;
  return pairwise(q, c, std::move(prov));
}

QuestionBattery gen_convex_combinations(const BudgetAllocation& p, const ConvexOptions& options,
                                        std::uint64_t seed) {
  if (options.lambdas.empty()) throw Error(Errc::InvalidConfig, "no lambda values");
  const auto& sampler = AllocationSampler::grid5();
  QuestionBattery out{options.round_grid5 ? "single_peaked_rounded" : "single_peaked", seed, p, {}};
  for (std::size_t i = 0; i < options.lambdas.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    bool accepted = false;
    for (int attempt = 0; attempt < kRejectionCap && !accepted; ++attempt) {
      const BudgetAllocation& q = sampler.sample(rng);
      Question question = convex_question(p, q, options.lambdas[i], options.round_grid5);
      const auto& c = std::get<BudgetAllocation>(question.options[1]);
      if (c == q) continue;
      if (options.avoid_degenerate && c == p) continue;
      out.questions.push_back(std::move(question));
      accepted = true;
    }
    if (!accepted) throw Error(Errc::GenerationExhausted, "no usable convex question found");
  }
  number_questions(out);
  return out;
}

// ---------------------------------------------------------------------------
// Peak linear

std::array<BudgetAllocation, kIssues> extreme_allocations() {
  return {BudgetAllocation::from_ints({10, 10, 80}), BudgetAllocation::from_ints({10, 80, 10}),
          BudgetAllocation::from_ints({80, 10, 10})};
}

std::vector<Amount> peak_linear_lambdas() {
  return {Amount(1, 4), Amount(1, 2), Amount(3, 4)};
}

QuestionBattery gen_peak_linear(const BudgetAllocation& p) {
  static constexpr std::array<std::pair<int, int>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};
  static constexpr std::array<const char*, 3> kPairNames{"A-B", "A-C", "B-C"};
  const auto extremes = extreme_allocations();

  QuestionBattery out{"peak_linear", 0, p, {}};
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    Provenance prov;
    prov.generator = "peak_linear";
    prov.role = "extreme";
    prov.pair = kPairNames[k];
    out.questions.push_back(
        pairwise(extremes[kPairs[k].first], extremes[kPairs[k].second], std::move(prov)));
  }
  for (const Amount& lambda : peak_linear_lambdas()) {
    std::array<BudgetAllocation, kIssues> blended;
    for (std::size_t i = 0; i < kIssues; ++i) blended[i] = convex_combination(p, extremes[i], lambda);
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
      Provenance prov;
      prov.generator = "peak_linear";
      prov.role = "blend";
      prov.pair = kPairNames[k];
      prov.lambda = lambda;
      out.questions.push_back(
          pairwise(blended[kPairs[k].first], blended[kPairs[k].second], std::move(prov)));
    }
  }
  number_questions(out);
  return out;
}

// ---------------------------------------------------------------------------
// Symmetry

std::optional<std::vector<Question>> project_symmetry_set(const BudgetAllocation& p,
                                                          const BudgetAllocation& q1,
                                                          const BudgetAllocation& q2,
                                                          int set_index) {
  const DeviationVector d1 = deviation(p, q1);
  const DeviationVector d2 = deviation(p, q2);
  if (d1.is_zero() || d2.is_zero() || d1 == d2) return std::nullopt;

  std::vector<Question> out;
  for (std::size_t j = 0; j < kIssues; ++j) {
    const auto a = p.shifted(rotate(d1, j));
    const auto b = p.shifted(rotate(d2, j));
    if (!a || !b) return std::nullopt;
    Provenance prov;
    prov.generator = "project_symmetry";
    prov.set_index = set_index;
    prov.rotation = static_cast<int>(j);
    out.push_back(pairwise(*a, *b, std::move(prov)));
  }
  return out;
}

namespace {

/// Grid allocations q != p that keep p + rotate(q - p, j) valid for every j.
AllocationSampler project_support(const BudgetAllocation& p) {
  return AllocationSampler::grid5().filtered([&p](const BudgetAllocation& q) {
    const DeviationVector d = deviation(p, q);
    if (d.is_zero()) return false;
    for (std::size_t j = 1; j < kIssues; ++j) {
      if (!p.shifted(rotate(d, j))) return false;
    }
    return true;
  });
}

AllocationSampler sign_support(const BudgetAllocation& p) {
  return AllocationSampler::grid5().filtered([&p](const BudgetAllocation& q) {
    const DeviationVector d = deviation(p, q);
    return !d.is_zero() && p.shifted(-d).has_value();
  });
}

template <typename MakeSet>
QuestionBattery gen_symmetry(const char* kind, const BudgetAllocation& p, int k,
                             std::uint64_t seed, const AllocationSampler& support,
                             MakeSet&& make_set) {
  require_positive_k(k);
  if (support.support().size() < 2) {
    throw Error(Errc::GenerationExhausted,
                std::string("no valid ") + kind + " pairs exist for ideal " + p.to_string());
  }
  QuestionBattery out{kind, seed, p, {}};
  for (int s = 0; s < k; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    bool accepted = false;
    for (int attempt = 0; attempt < kRejectionCap && !accepted; ++attempt) {
      const BudgetAllocation& q1 = support.sample(rng);
      const BudgetAllocation& q2 = support.sample(rng);
      if (auto set = make_set(p, q1, q2, s)) {
        for (auto& q : *set) out.questions.push_back(std::move(q));
        accepted = true;
      }
    }
    if (!accepted) throw Error(Errc::GenerationExhausted, std::string("no valid ") + kind + " set found");
  }
  number_questions(out);
  return out;
}

}  // namespace

QuestionBattery gen_project_symmetry(const BudgetAllocation& p, int k, std::uint64_t seed) {
  return gen_symmetry("project_symmetry", p, k, seed, project_support(p), project_symmetry_set);
}

std::optional<std::vector<Question>> sign_symmetry_set(const BudgetAllocation& p,
                                                       const BudgetAllocation& q1,
                                                       const BudgetAllocation& q2,
                                                       int set_index) {
  const DeviationVector d1 = deviation(p, q1);
  const DeviationVector d2 = deviation(p, q2);
  if (d1.is_zero() || d2.is_zero() || d1 == d2) return std::nullopt;
  const auto n1 = p.shifted(-d1);
  const auto n2 = p.shifted(-d2);
  if (!n1 || !n2) return std::nullopt;

  std::vector<Question> out;
  for (int sign : {1, -1}) {
    Provenance prov;
    prov.generator = "sign_symmetry";
    prov.set_index = set_index;
    prov.sign = sign;
    out.push_back(sign > 0 ? pairwise(q1, q2, prov) : pairwise(*n1, *n2, prov));
  }
  return out;
}

QuestionBattery gen_sign_symmetry(const BudgetAllocation& p, int k, std::uint64_t seed) {
  return gen_symmetry("sign_symmetry", p, k, seed, sign_support(p), sign_symmetry_set);
}

// ---------------------------------------------------------------------------
// Cyclic asymmetry

std::int64_t cyclic_magnitude(const Vec& p, const Amount& lambda) {
  const Amount smallest = *std::min_element(p.begin(), p.end());
  return std::max<std::int64_t>(1, round_half_even(lambda * smallest));
}

std::int64_t cyclic_magnitude(const BudgetAllocation& p, const Amount& lambda) {
  return cyclic_magnitude(p.entries(), lambda);
}

std::array<Vec, kIssues> cyclic_shift_vectors(const Vec& p, const Amount& lambda,
                                              bool positive_direction) {
  const std::int64_t x = cyclic_magnitude(p, lambda);
  const std::int64_t big = static_cast<std::int64_t>(kIssues - 1) * x;
  DeviationVector base = vec_dev(big, -x, -x);
  if (!positive_direction) base = -base;
  std::array<Vec, kIssues> out;
  for (std::size_t j = 0; j < kIssues; ++j) {
    const DeviationVector d = rotate(base, j);
    for (std::size_t i = 0; i < kIssues; ++i) out[j][i] = p[i] + d[i];
  }
  return out;
}

Question cyclic_question(const BudgetAllocation& p, const Amount& lambda, bool positive_direction) {
  Question q;
  q.kind = QuestionKind::Ranking;
  for (const Vec& v : cyclic_shift_vectors(p.entries(), lambda, positive_direction)) {
    for (const Amount& x : v) {
      if (x < 0 || x > kTotalBudget) {
        throw Error(Errc::InvalidOptions, "cyclic shift leaves the simplex for ideal " + p.to_string());
      }
    }
    q.options.push_back(validate_allocation(v, false));
  }
  q.provenance.generator = "cyclic_asymmetry";
  q.provenance.lambda = lambda;
  q.provenance.magnitude = Amount(cyclic_magnitude(p, lambda));
  q.provenance.direction = positive_direction ? "pd" : "nd";
  return q;
}

QuestionBattery gen_cyclic_asymmetry_ranking(const BudgetAllocation& p) {
  QuestionBattery out{"cyclic_asymmetry", 0, p, {}};
  for (bool positive : {true, false}) {
    for (const Amount& lambda : {Amount(1, 5), Amount(2, 5)}) {
      out.questions.push_back(cyclic_question(p, lambda, positive));
    }
  }
  number_questions(out);
  return out;
}

// ---------------------------------------------------------------------------
// Concentrated vs distributed

FallbackVectors FallbackVectors::defaults() {
  FallbackVectors out;
  for (std::int64_t k = 1; k <= 4; ++k) {
    out.levels[static_cast<std::size_t>(k - 1)] = {vec_dev(-2 * k, k, k), vec_dev(2 * k, -k, -k)};
  }
  return out;
}

std::int64_t concentrated_base_magnitude(const BudgetAllocation& p) {
  return std::max<std::int64_t>(1, round_half_even(p.min_entry() / 10));
}

QuestionBattery gen_concentrated_vs_distributed(const BudgetAllocation& p,
                                                const FallbackVectors& fallback) {
  if (!p.all_positive()) {
    throw Error(Errc::ZeroEntry, "concentrated-vs-distributed pairs need every ideal entry positive");
  }
  const std::int64_t x_base = concentrated_base_magnitude(p);
  const std::int64_t big = static_cast<std::int64_t>(kIssues - 1);

  QuestionBattery out{"concentrated_vs_distributed", 0, p, {}};
  for (std::size_t category = 0; category < kIssues; ++category) {
    for (int level = 1; level <= 4; ++level) {
      const std::int64_t x = level * x_base;
      const DeviationVector loss = rotate(vec_dev(-big * x, x, x), category);
      Provenance prov;
      prov.generator = "concentrated_vs_distributed";
      prov.category = static_cast<int>(category);
      prov.level = level;
      prov.magnitude = Amount(x);
      prov.fallback = false;

      auto a = p.shifted(loss);
      auto b = p.shifted(-loss);
      if (!a || !b) {
        const auto& [fd1, fd2] = fallback.levels[static_cast<std::size_t>(level - 1)];
        a = p.shifted(rotate(fd1, category));
        b = p.shifted(rotate(fd2, category));
        prov.fallback = true;
        prov.magnitude = -rotate(fd1, category)[category] / big;
      }
      if (!a || !b || *a == *b) {
        throw Error(Errc::FallbackExhausted,
                    "no valid concentrated pair for category " + std::to_string(category + 1) +
                        ", level " + std::to_string(level) + " of ideal " + p.to_string());
      }
      out.questions.push_back(pairwise(*a, *b, std::move(prov)));
    }
  }
  number_questions(out);
  return out;
}

// ---------------------------------------------------------------------------
// Biennial

std::optional<std::vector<Question>> biennial_round(const BudgetAllocation& p,
                                                    const BudgetAllocation& r, int round_index) {
  if (r == p) return std::nullopt;
  const DeviationVector d = deviation(r, p);  // p - r
  const auto balancing = p.shifted(d);       // 2p - r
  if (!balancing) return std::nullopt;

  auto prov = [round_index](int sub_poll) {
    Provenance out;
    out.generator = "biennial";
    out.sub_poll = sub_poll;
    out.set_index = round_index;
    return out;
  };
  std::vector<Question> out;
  out.push_back(biennial(YearPair{p, r}, YearPair{r, p}, prov(1)));
  out.push_back(biennial(YearPair{r, p}, YearPair{r, *balancing}, prov(2)));
  out.push_back(biennial(YearPair{p, r}, YearPair{*balancing, r}, prov(3)));
  return out;
}

namespace {

AllocationSampler biennial_support(const BudgetAllocation& p) {
  return AllocationSampler::grid5().filtered([&p](const BudgetAllocation& r) {
    return r != p && p.shifted(deviation(r, p)).has_value();
  });
}

}  // namespace

QuestionBattery gen_biennial(const BudgetAllocation& p, int k, std::uint64_t seed) {
  require_positive_k(k);
  const AllocationSampler support = biennial_support(p);
  if (support.empty()) {
    throw Error(Errc::GenerationExhausted, "no balancing budget exists for ideal " + p.to_string());
  }
  QuestionBattery out{"biennial", seed, p, {}};
  for (int i = 0; i < k; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    auto round = biennial_round(p, support.sample(rng), i);
    for (auto& q : *round) out.questions.push_back(std::move(q));
  }
  number_questions(out);
  return out;
}

// ---------------------------------------------------------------------------
// Triangle split

std::pair<DeviationVector, DeviationVector> split_change(const DeviationVector& q, SplitRule rule) {
  const Amount &x1 = q[0], &x2 = q[1], &x3 = q[2];
  if (rule == SplitRule::AnchorLast) {
    return {DeviationVector(Vec{x1, 0, -x1}), DeviationVector(Vec{0, x2, -x2})};
  }
  return {DeviationVector(Vec{-x2, x2, 0}), DeviationVector(Vec{-x3, 0, x3})};
}

std::optional<Question> triangle_question(const BudgetAllocation& p, const DeviationVector& q,
                                          SplitRule rule, int sign) {
  if (q.is_zero()) return std::nullopt;
  auto [q1, q2] = split_change(q, rule);
  if (q1.is_zero() || q2.is_zero()) return std::nullopt;
  const DeviationVector change = sign > 0 ? q : -q;
  if (sign < 0) {
    q1 = -q1;
    q2 = -q2;
  }
  const auto whole = p.shifted(change);
  const auto first = p.shifted(q1);
  const auto second = p.shifted(q2);
  if (!whole || !first || !second) return std::nullopt;

  Provenance prov;
  prov.generator = "triangle_split";
  prov.role = "experimental";
  prov.sign = sign;
  return biennial(YearPair{p, *whole}, YearPair{*first, *second}, std::move(prov));
}

namespace {

bool triangle_base_feasible(const BudgetAllocation& p, const DeviationVector& q, SplitRule rule) {
  for (std::size_t t = 0; t < kIssues; ++t) {
    const DeviationVector rotated = shift_left(q, t);
    for (int sign : {1, -1}) {
      if (!triangle_question(p, rotated, rule, sign)) return false;
    }
  }
  return true;
}

}  // namespace

QuestionBattery gen_triangle_split(const BudgetAllocation& p, int k, std::uint64_t seed,
                                   SplitRule rule) {
  require_positive_k(k);

  std::vector<DeviationVector> bases;
  for (std::int64_t x1 = -kTotalBudget; x1 <= kTotalBudget; x1 += kGrid) {
    for (std::int64_t x2 = -kTotalBudget; x2 <= kTotalBudget; x2 += kGrid) {
      const std::int64_t x3 = -x1 - x2;
      if (x3 < -kTotalBudget || x3 > kTotalBudget) continue;
      const DeviationVector q = vec_dev(x1, x2, x3);
      if (triangle_base_feasible(p, q, rule)) bases.push_back(q);
    }
  }
  const AllocationSampler screening_support = biennial_support(p);
  if (bases.empty() || screening_support.empty()) {
    throw Error(Errc::GenerationExhausted, "no valid split vectors exist for ideal " + p.to_string());
  }

  QuestionBattery out{"triangle_split", seed, p, {}};

  // Screening: an exact ideal against a balancing budget, once with year 1
  // fixed and once with year 2 fixed.
  {
    Rng rng(derive_seed(seed, 0));
    const auto round = biennial_round(p, screening_support.sample(rng), 0);
    for (std::size_t i : {1u, 2u}) {
      Question q = (*round)[i];
      q.provenance.generator = "triangle_split";
      q.provenance.role = "screening";
      q.provenance.set_index.reset();
      out.questions.push_back(std::move(q));
    }
  }

  std::set<Vec> used;
  for (int b = 0; b < k; ++b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b + 1)));
    std::optional<DeviationVector> base;
    for (int attempt = 0; attempt < kRejectionCap && !base; ++attempt) {
      const DeviationVector& candidate = bases[rng.index(bases.size())];
      if (used.insert(candidate.deltas()).second) base = candidate;
    }
    if (!base) throw Error(Errc::GenerationExhausted, "not enough distinct split vectors");

    for (std::size_t t = 0; t < kIssues; ++t) {
      const DeviationVector rotated = shift_left(*base, t);
      for (int sign : {1, -1}) {
        Question q = *triangle_question(p, rotated, rule, sign);
        q.provenance.set_index = b;
        q.provenance.rotation = static_cast<int>(t);
        out.questions.push_back(std::move(q));
      }
    }
  }
  number_questions(out);
  return out;
}

// ---------------------------------------------------------------------------
// Alertness checks and option shuffling

QuestionBattery insert_alertness_checks(QuestionBattery battery, std::uint64_t seed) {
  if (battery.questions.empty()) {
    throw Error(Errc::InvalidConfig, "cannot add alertness checks to an empty battery");
  }
  const BudgetAllocation& p = battery.ideal;
  const auto others =
      AllocationSampler::grid5().filtered([&p](const BudgetAllocation& q) { return q != p; });

  auto make_check = [&](std::uint64_t stream, int number) {
    Rng rng(derive_seed(seed, stream));
    const BudgetAllocation& other = others.sample(rng);
    const bool ideal_first = rng.index(2) == 0;
    Provenance prov;
    prov.generator = "alertness";
    prov.role = "alertness";
    prov.ideal_option = ideal_first ? 0 : 1;
    Question q = ideal_first ? pairwise(p, other, prov) : pairwise(other, p, prov);
    q.is_alertness = true;
    q.id = "alertness-" + std::to_string(number);
    return q;
  };

  const std::size_t middle = battery.questions.size() / 2;
  auto& qs = battery.questions;
  qs.insert(qs.begin() + static_cast<std::ptrdiff_t>(middle), make_check(1, 2));
  qs.insert(qs.begin(), make_check(0, 1));
  return battery;
}

QuestionBattery shuffle_option_order(QuestionBattery battery, std::uint64_t seed) {
  for (auto& q : battery.questions) {
    Rng rng(derive_seed(seed, fnv1a(q.id)));
    std::vector<int> perm(q.options.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.index(i)]);
    }
    // Compose with any earlier permutation so generator indices stay exact.
    const std::vector<Option> base = q.generator_options();
    std::vector<Option> shown(base.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shown[i] = base[static_cast<std::size_t>(perm[i])];
    q.options = std::move(shown);
    q.provenance.permutation = std::move(perm);
  }
  return battery;
}

}  // namespace pbpoll
