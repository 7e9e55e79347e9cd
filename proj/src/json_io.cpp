#include "pbpoll/json_io.hpp"

#include <cmath>
#include <sstream>

#include "pbpoll/error.hpp"

namespace pbpoll {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad("expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

int as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

std::string as_string(const Json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " must be a string");
  return j.get<std::string>();
}

bool as_bool(const Json& j, const char* what) {
  if (!j.is_boolean()) bad(std::string(what) + " must be a boolean");
  return j.get<bool>();
}

template <typename T, typename F>
void put_opt(Json& j, const char* key, const std::optional<T>& v, F&& conv) {
  if (v) j[key] = conv(*v);
}

std::array<double, kIssues> weights_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != kIssues) {
    throw Error(Errc::InvalidConfig, std::string(what) + " must list 3 numbers");
  }
  std::array<double, kIssues> out{};
  for (std::size_t i = 0; i < kIssues; ++i) {
    if (!j[i].is_number()) throw Error(Errc::InvalidConfig, std::string(what) + " must be numeric");
    out[i] = j[i].get<double>();
  }
  return out;
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
}

Json amount_to_json(const Amount& x) {
  if (x.denominator() == 1) return x.numerator();
  return to_double(x);
}

Amount amount_from_json(const Json& j) {
  if (j.is_number_integer()) return Amount(j.get<std::int64_t>());
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v) || std::fabs(v) > 1e9) bad("amount out of range");
    return Amount(std::llround(v * 1e6), 1000000);
  }
  if (j.is_string()) return parse_amount(j.get<std::string>());
  bad("amount must be a number");
}

Json allocation_to_json(const BudgetAllocation& a) {
  Json out = Json::array();
  for (const auto& x : a.entries()) out.push_back(amount_to_json(x));
  return out;
}

BudgetAllocation allocation_from_json(const Json& j) {
  if (!j.is_array()) bad("allocation must be an array");
  std::vector<Amount> v;
  for (const auto& x : j) v.push_back(amount_from_json(x));
  return validate_allocation(v, false);
}

Json deviation_to_json(const DeviationVector& d) {
  Json out = Json::array();
  for (const auto& x : d.deltas()) out.push_back(amount_to_json(x));
  return out;
}

DeviationVector deviation_from_json(const Json& j) {
  if (!j.is_array() || j.size() != kIssues) bad("deviation must list 3 numbers");
  Vec v;
  for (std::size_t i = 0; i < kIssues; ++i) v[i] = amount_from_json(j[i]);
  return DeviationVector(v);
}

Json option_to_json(const Option& o) {
  if (const auto* a = std::get_if<BudgetAllocation>(&o)) return allocation_to_json(*a);
  const auto& pair = std::get<YearPair>(o);
  return Json{{"year1", allocation_to_json(pair.year1)}, {"year2", allocation_to_json(pair.year2)}};
}

Option option_from_json(const Json& j) {
  if (j.is_object()) {
    return YearPair{allocation_from_json(field(j, "year1")), allocation_from_json(field(j, "year2"))};
  }
  return allocation_from_json(j);
}

Json provenance_to_json(const Provenance& p) {
  Json j = Json::object();
  j["generator"] = p.generator;
  put_opt(j, "lambda", p.lambda, amount_to_json);
  put_opt(j, "magnitude", p.magnitude, amount_to_json);
  auto same = [](const auto& v) { return v; };
  put_opt(j, "set_index", p.set_index, same);
  put_opt(j, "rotation", p.rotation, same);
  put_opt(j, "sign", p.sign, same);
  put_opt(j, "sub_poll", p.sub_poll, same);
  put_opt(j, "category", p.category, same);
  put_opt(j, "level", p.level, same);
  put_opt(j, "fallback", p.fallback, same);
  put_opt(j, "pair", p.pair, same);
  put_opt(j, "role", p.role, same);
  put_opt(j, "direction", p.direction, same);
  put_opt(j, "model_a", p.model_a, same);
  put_opt(j, "model_b", p.model_b, same);
  put_opt(j, "ideal_option", p.ideal_option, same);
  if (!p.permutation.empty()) j["permutation"] = p.permutation;
  return j;
}

Provenance provenance_from_json(const Json& j) {
  if (!j.is_object()) bad("provenance must be an object");
  Provenance p;
  p.generator = as_string(field(j, "generator"), "generator");
  auto get_int = [&j](const char* key, std::optional<int>& out) {
    if (j.contains(key)) out = as_int(j[key], key);
  };
  auto get_str = [&j](const char* key, std::optional<std::string>& out) {
    if (j.contains(key)) out = as_string(j[key], key);
  };
  if (j.contains("lambda")) p.lambda = amount_from_json(j["lambda"]);
  if (j.contains("magnitude")) p.magnitude = amount_from_json(j["magnitude"]);
  get_int("set_index", p.set_index);
  get_int("rotation", p.rotation);
  get_int("sign", p.sign);
  get_int("sub_poll", p.sub_poll);
  get_int("category", p.category);
  get_int("level", p.level);
  if (j.contains("fallback")) p.fallback = as_bool(j["fallback"], "fallback");
  get_str("pair", p.pair);
  get_str("role", p.role);
  get_str("direction", p.direction);
  get_str("model_a", p.model_a);
  get_str("model_b", p.model_b);
  get_int("ideal_option", p.ideal_option);
  if (j.contains("permutation")) {
    const Json& perm = j["permutation"];
    if (!perm.is_array()) bad("permutation must be an array");
    for (const auto& x : perm) p.permutation.push_back(as_int(x, "permutation entry"));
  }
  return p;
}

Json answer_to_json(const Answer& a) {
  if (const int* choice = std::get_if<int>(&a)) return *choice;
  return std::get<std::vector<int>>(a);
}

Answer answer_from_json(const Json& j) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_array()) {
    std::vector<int> out;
    for (const auto& x : j) out.push_back(as_int(x, "rank"));
    return out;
  }
  throw Error(Errc::MalformedAnswer, "answer must be an index or a ranking");
}

Json question_to_json(const Question& q) {
  Json options = Json::array();
  for (const auto& o : q.options) options.push_back(option_to_json(o));
  return Json{{"id", q.id},
              {"kind", std::string(question_kind_name(q.kind))},
              {"options", options},
              {"provenance", provenance_to_json(q.provenance)},
              {"is_alertness", q.is_alertness}};
}

Question question_from_json(const Json& j) {
  Question q;
  q.id = as_string(field(j, "id"), "id");
  q.kind = parse_question_kind(as_string(field(j, "kind"), "kind"));
  const Json& options = field(j, "options");
  if (!options.is_array()) bad("options must be an array");
  for (const auto& o : options) q.options.push_back(option_from_json(o));
  q.provenance = provenance_from_json(field(j, "provenance"));
  q.is_alertness = as_bool(field(j, "is_alertness"), "is_alertness");
  return q;
}

Json battery_to_json(const QuestionBattery& b) {
  Json questions = Json::array();
  for (const auto& q : b.questions) questions.push_back(question_to_json(q));
  return Json{{"battery_kind", b.battery_kind},
              {"seed", b.seed},
              {"ideal", allocation_to_json(b.ideal)},
              {"questions", questions}};
}

QuestionBattery battery_from_json(const Json& j) {
  QuestionBattery b;
  b.battery_kind = as_string(field(j, "battery_kind"), "battery_kind");
  const Json& seed = field(j, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) bad("seed must be an integer");
  b.seed = seed.get<std::uint64_t>();
  b.ideal = allocation_from_json(field(j, "ideal"));
  const Json& questions = field(j, "questions");
  if (!questions.is_array()) bad("questions must be an array");
  for (const auto& q : questions) b.questions.push_back(question_from_json(q));
  return b;
}

Json model_to_json(const UtilityModel& m) {
  switch (m.kind()) {
    case ModelKind::L1:
    case ModelKind::L2:
    case ModelKind::Leontief:
      return std::string(m.name());
    default: break;
  }
  const auto& p = m.params();
  Json j{{"kind", std::string(m.name())},
         {"gain_weights", p.gain_weights},
         {"loss_weights", p.loss_weights}};
  if (m.kind() == ModelKind::MonotoneAsymmetric) {
    j["gain_exponent"] = p.gain_exponent;
    j["loss_exponent"] = p.loss_exponent;
  }
  return j;
}

UtilityModel model_from_json(const Json& j) {
  if (j.is_string()) {
    const ModelKind kind = parse_model_kind(j.get<std::string>());
    if (kind == ModelKind::WeightedAsymmetric || kind == ModelKind::MonotoneAsymmetric) {
      throw Error(Errc::InvalidConfig, "asymmetric models need weights");
    }
    return UtilityModel::make(kind, {});
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(Errc::InvalidConfig, "model must be a name or an object with a kind");
  }
  const ModelKind kind = parse_model_kind(j["kind"].get<std::string>());
  ModelParams params;
  if (kind == ModelKind::WeightedAsymmetric || kind == ModelKind::MonotoneAsymmetric) {
    if (!j.contains("gain_weights")) throw Error(Errc::InvalidConfig, "missing gain_weights");
    params.gain_weights = weights_from_json(j["gain_weights"], "gain_weights");
    params.loss_weights = j.contains("loss_weights")
                              ? weights_from_json(j["loss_weights"], "loss_weights")
                              : params.gain_weights;
    auto exponent = [&j](const char* key) {
      if (!j.contains(key)) return 1.0;
      if (!j[key].is_number()) throw Error(Errc::InvalidConfig, std::string(key) + " must be numeric");
      return j[key].get<double>();
    };
    params.gain_exponent = exponent("gain_exponent");
    params.loss_exponent = exponent("loss_exponent");
  }
  return UtilityModel::make(kind, params);
}

Json config_to_json(const BatteryConfig& c) {
  Json lambdas = Json::array();
  for (const auto& l : c.lambdas) lambdas.push_back(amount_to_json(l));
  Json fallback = Json::array();
  for (const auto& [d1, d2] : c.fallback.levels) {
    fallback.push_back(Json::array({deviation_to_json(d1), deviation_to_json(d2)}));
  }
  Json j{{"kind", std::string(battery_kind_name(c.kind))},
         {"alertness", c.alertness},
         {"shuffle", c.shuffle}};
  // Fixed-size batteries have no k.
  if (c.effective_k() > 0) j["k"] = c.effective_k();
  switch (c.kind) {
    case BatteryKind::ModelDisagreement:
      j["model_a"] = model_to_json(c.model_a);
      j["model_b"] = model_to_json(c.model_b);
      break;
    case BatteryKind::SinglePeaked:
    case BatteryKind::SinglePeakedRounded:
      j["lambdas"] = lambdas;
      j["avoid_degenerate"] = c.avoid_degenerate;
      break;
    case BatteryKind::TriangleSplit:
      j["split_rule"] = c.split_rule == SplitRule::AnchorLast ? "anchor_last" : "anchor_first";
      break;
    case BatteryKind::ConcentratedVsDistributed:
      j["fallback"] = fallback;
      break;
    default: break;
  }
  return j;
}

BatteryConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw Error(Errc::InvalidConfig, "config needs a kind");
  }
  BatteryConfig c;
  c.kind = parse_battery_kind(j["kind"].get<std::string>());
  try {
    if (j.contains("k") && !j["k"].is_null()) c.k = as_int(j["k"], "k");
    if (j.contains("model_a")) c.model_a = model_from_json(j["model_a"]);
    if (j.contains("model_b")) c.model_b = model_from_json(j["model_b"]);
    if (j.contains("lambdas")) {
      if (!j["lambdas"].is_array()) bad("lambdas must be an array");
      c.lambdas.clear();
      for (const auto& l : j["lambdas"]) c.lambdas.push_back(amount_from_json(l));
    }
    if (j.contains("avoid_degenerate")) c.avoid_degenerate = as_bool(j["avoid_degenerate"], "avoid_degenerate");
    if (j.contains("split_rule")) {
      const std::string rule = as_string(j["split_rule"], "split_rule");
      if (rule == "anchor_last") c.split_rule = SplitRule::AnchorLast;
      else if (rule == "anchor_first") c.split_rule = SplitRule::AnchorFirst;
      else bad("split_rule must be anchor_last or anchor_first");
    }
    if (j.contains("fallback")) {
      const Json& f = j["fallback"];
      if (!f.is_array() || f.size() != 4) bad("fallback must list 4 vector pairs");
      for (std::size_t i = 0; i < 4; ++i) {
        if (!f[i].is_array() || f[i].size() != 2) bad("fallback entries must be pairs");
        c.fallback.levels[i] = {deviation_from_json(f[i][0]), deviation_from_json(f[i][1])};
      }
    }
    if (j.contains("alertness")) c.alertness = as_bool(j["alertness"], "alertness");
    if (j.contains("shuffle")) c.shuffle = as_bool(j["shuffle"], "shuffle");
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    throw Error(Errc::InvalidConfig, e.what());
  }
  validate_config(c);
  return c;
}

Json record_to_json(const ResponseRecord& r) {
  return Json{{"participant_id", r.participant_id},
              {"session_id", r.session_id},
              {"question_id", r.question_id},
              {"battery_kind", r.battery_kind},
              {"question_kind", std::string(question_kind_name(r.question_kind))},
              {"provenance", provenance_to_json(r.provenance)},
              {"is_alertness", r.is_alertness},
              {"answer", answer_to_json(r.answer)},
              {"generator_relative_answer", answer_to_json(r.generator_relative_answer)},
              {"tie_broken", r.tie_broken},
              {"timestamp_ms", r.timestamp_ms},
              {"received_at_ms", r.received_at_ms}};
}

ResponseRecord record_from_json(const Json& j) {
  ResponseRecord r;
  r.participant_id = as_string(field(j, "participant_id"), "participant_id");
  r.session_id = j.contains("session_id") ? as_string(j["session_id"], "session_id") : "";
  r.question_id = as_string(field(j, "question_id"), "question_id");
  r.battery_kind = as_string(field(j, "battery_kind"), "battery_kind");
  r.question_kind = parse_question_kind(as_string(field(j, "question_kind"), "question_kind"));
  r.provenance = provenance_from_json(field(j, "provenance"));
  r.is_alertness = j.contains("is_alertness") && as_bool(j["is_alertness"], "is_alertness");
  r.answer = answer_from_json(field(j, "answer"));
  r.generator_relative_answer = j.contains("generator_relative_answer")
                                    ? answer_from_json(j["generator_relative_answer"])
                                    : r.answer;
  r.tie_broken = j.contains("tie_broken") && as_bool(j["tie_broken"], "tie_broken");
  if (j.contains("timestamp_ms")) r.timestamp_ms = j["timestamp_ms"].get<std::int64_t>();
  if (j.contains("received_at_ms")) r.received_at_ms = j["received_at_ms"].get<std::int64_t>();
  return r;
}

std::string records_to_ndjson(const std::vector<ResponseRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<ResponseRecord> records_from_ndjson(std::string_view text) {
  std::vector<ResponseRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    try {
      const Json j = parse_json(line);
      if (j.is_object() && j.contains("type") && j["type"] != "response") continue;
      out.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Json::exception& e) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (end == text.size()) break;
  }
  return out;
}

}  // namespace pbpoll
