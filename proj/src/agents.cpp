#include "pbpoll/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace pbpoll {

void validate_agent(const AgentSpec& agent) {
  if (!(agent.noise_rate >= 0.0 && agent.noise_rate <= 1.0)) {
    throw Error(Errc::InvalidConfig, "noise rate must lie in [0, 1]");
  }
  const auto [w1, w2] = agent.year_weights;
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(w1 + w2 > 0.0) || !std::isfinite(w1 + w2)) {
    throw Error(Errc::InvalidConfig, "year weights must be non-negative with a positive sum");
  }
}

namespace {

double score(const AgentSpec& agent, const Option& option) {
  const BudgetAllocation& p = agent.ideal.allocation;
  if (const auto* a = std::get_if<BudgetAllocation>(&option)) return evaluate(agent.model, p, *a);
  const auto& pair = std::get<YearPair>(option);
  return agent.year_weights[0] * evaluate(agent.model, p, pair.year1) +
         agent.year_weights[1] * evaluate(agent.model, p, pair.year2);
}

std::vector<int> random_permutation(std::size_t n, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  return perm;
}

}  // namespace

AgentChoice choose(const AgentSpec& agent, const Question& question, Rng& rng) {
  const std::vector<Option> options = question.generator_options();
  const std::size_t n = options.size();
  AgentChoice out;

  if (rng.bernoulli(agent.noise_rate)) {
    out.noisy = true;
    if (question.kind == QuestionKind::Ranking) {
      out.generator_relative = random_permutation(n, rng);
    } else {
      out.generator_relative = static_cast<int>(rng.index(n));
    }
    return out;
  }

  std::vector<double> utility(n);
  for (std::size_t i = 0; i < n; ++i) utility[i] = score(agent, options[i]);

  if (question.kind == QuestionKind::Ranking) {
    // A random pre-order followed by a stable sort breaks ties uniformly.
    std::vector<int> order = random_permutation(n, rng);
    std::stable_sort(order.begin(), order.end(), [&utility](int a, int b) {
      return utility[static_cast<std::size_t>(a)] > utility[static_cast<std::size_t>(b)];
    });
    for (std::size_t i = 1; i < n; ++i) {
      if (utility[static_cast<std::size_t>(order[i])] == utility[static_cast<std::size_t>(order[i - 1])]) {
        out.tie_broken = true;
      }
    }
    out.generator_relative = order;
    return out;
  }

  const double best = *std::max_element(utility.begin(), utility.end());
  std::vector<int> winners;
  for (std::size_t i = 0; i < n; ++i) {
    if (utility[i] == best) winners.push_back(static_cast<int>(i));
  }
  if (winners.size() > 1) {
    out.tie_broken = true;
    out.generator_relative = winners[rng.index(winners.size())];
  } else {
    out.generator_relative = winners.front();
  }
  return out;
}

ResponseRecord answer(const AgentSpec& agent, const Question& question,
                      const std::string& battery_kind, Rng& rng) {
  const AgentChoice choice = choose(agent, question, rng);
  ResponseRecord r = make_record(question, battery_kind, agent.ideal.participant_id, "",
                                 question.to_displayed(choice.generator_relative));
  r.tie_broken = choice.tie_broken;
  return r;
}

bool ends_session(const ResponseRecord& record) {
  if (failed_alertness(record)) return true;
  if (record.provenance.role == std::optional<std::string>("screening")) {
    // Option 1 of a screening question is the balancing pair.
    const int* choice = std::get_if<int>(&record.generator_relative_answer);
    return choice && *choice == 1;
  }
  return false;
}

CohortResult run_cohort(const std::vector<AgentSpec>& agents, const BatteryConfig& plan,
                        std::uint64_t seed) {
  validate_config(plan);
  const bool all_positive = requires_all_positive(plan);
  const std::string kind(battery_kind_name(plan.kind));
  CohortResult out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentSpec& agent = agents[i];
    try {
      validate_agent(agent);
      make_ideal(agent.ideal.allocation, agent.ideal.participant_id, all_positive);
      const QuestionBattery battery =
          generate_battery(plan, agent.ideal.allocation, derive_seed(seed, 2 * i));
      Rng rng(derive_seed(seed, 2 * i + 1));
      for (const auto& q : battery.questions) {
        out.records.push_back(answer(agent, q, kind, rng));
        if (ends_session(out.records.back())) break;
      }
    } catch (const Error& e) {
      out.failures.push_back({agent.ideal.participant_id, e.code(), e.what()});
    }
  }
  return out;
}

std::vector<AgentSpec> random_cohort(int n, const UtilityModel& model, double noise_rate,
                                     std::array<double, 2> year_weights,
                                     bool require_all_positive, std::uint64_t seed) {
  if (n < 0) throw Error(Errc::InvalidConfig, "cohort size must be non-negative");
  const auto eligible = AllocationSampler::grid5().filtered([&](const BudgetAllocation& a) {
    return a.positive_count() >= 2 && (!require_all_positive || a.all_positive()) &&
           evaluable_at(model, a);
  });
  Rng rng(derive_seed(seed, 0x1DEA1ULL));
  std::vector<AgentSpec> out;
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "agent-%04d", i + 1);
    AgentSpec spec;
    spec.ideal = IdealBudget{eligible.sample(rng), id};
    spec.model = model;
    spec.noise_rate = noise_rate;
    spec.year_weights = year_weights;
    validate_agent(spec);
    out.push_back(std::move(spec));
  }
  return out;
}

namespace {

std::array<double, 2> weights_from(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(Errc::InvalidConfig, "year_weights must list two numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

double noise_from(const Json& j) {
  if (!j.contains("noise")) return 0.0;
  if (!j["noise"].is_number()) throw Error(Errc::InvalidConfig, "noise must be numeric");
  return j["noise"].get<double>();
}

}  // namespace

CohortSpec cohort_spec_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "cohort spec must be an object");
  CohortSpec spec;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw Error(Errc::InvalidConfig, "seed must be an integer");
    spec.seed = j["seed"].get<std::uint64_t>();
    spec.has_seed = true;
  }
  if (!j.contains("battery")) throw Error(Errc::InvalidConfig, "cohort spec needs a battery");
  spec.battery = config_from_json(j["battery"]);

  if (j.contains("agents")) {
    if (!j["agents"].is_array()) throw Error(Errc::InvalidConfig, "agents must be an array");
    int index = 0;
    for (const auto& a : j["agents"]) {
      ++index;
      if (!a.is_object() || !a.contains("ideal")) throw Error(Errc::InvalidConfig, "agent needs an ideal");
      AgentSpec agent;
      char id[32];
      std::snprintf(id, sizeof id, "agent-%04d", index);
      agent.ideal.allocation = allocation_from_json(a["ideal"]);
      agent.ideal.participant_id = a.contains("participant_id") ? a["participant_id"].get<std::string>() : id;
      if (a.contains("model")) agent.model = model_from_json(a["model"]);
      agent.noise_rate = noise_from(a);
      if (a.contains("year_weights")) agent.year_weights = weights_from(a["year_weights"]);
      validate_agent(agent);
      spec.agents.push_back(std::move(agent));
    }
  }
  if (j.contains("random")) {
    const Json& r = j["random"];
    if (!r.is_object() || !r.contains("n") || !r["n"].is_number_integer()) {
      throw Error(Errc::InvalidConfig, "random cohort needs an integer n");
    }
    const UtilityModel model = r.contains("model") ? model_from_json(r["model"]) : UtilityModel::l1();
    const std::array<double, 2> weights =
        r.contains("year_weights") ? weights_from(r["year_weights"]) : std::array<double, 2>{1.0, 1.0};
    auto extra = random_cohort(r["n"].get<int>(), model, noise_from(r), weights,
                               requires_all_positive(spec.battery), spec.seed);
    const std::size_t offset = spec.agents.size();
    for (std::size_t i = 0; i < extra.size(); ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "agent-%04zu", offset + i + 1);
      extra[i].ideal.participant_id = id;
      spec.agents.push_back(std::move(extra[i]));
    }
  }
  return spec;
}

Json agent_to_json(const AgentSpec& agent) {
  return Json{{"participant_id", agent.ideal.participant_id},
              {"ideal", allocation_to_json(agent.ideal.allocation)},
              {"model", model_to_json(agent.model)},
              {"noise", agent.noise_rate},
              {"year_weights", agent.year_weights}};
}

}  // namespace pbpoll
