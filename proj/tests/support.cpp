#include "support.hpp"

#include <random>

#include "pbpoll/random.hpp"

namespace testing {

BudgetAllocation alloc(std::int64_t a, std::int64_t b, std::int64_t c) {
  return BudgetAllocation::from_ints({a, b, c});
}

ResponseRecord choice_record(const std::string& participant, const std::string& question_id,
                             const Provenance& provenance, int choice) {
  ResponseRecord r;
  r.participant_id = participant;
  r.session_id = participant + "-s";
  r.question_id = question_id;
  r.battery_kind = provenance.generator;
  r.question_kind = provenance.generator == "biennial" ? QuestionKind::Biennial : QuestionKind::Pairwise;
  r.provenance = provenance;
  r.answer = choice;
  r.generator_relative_answer = choice;
  return r;
}

ResponseRecord ranking_record(const std::string& participant, const std::string& question_id,
                              const std::vector<int>& ranking) {
  ResponseRecord r;
  r.participant_id = participant;
  r.session_id = participant + "-s";
  r.question_id = question_id;
  r.battery_kind = "cyclic_asymmetry";
  r.question_kind = QuestionKind::Ranking;
  r.provenance.generator = "cyclic_asymmetry";
  r.answer = ranking;
  r.generator_relative_answer = ranking;
  return r;
}

namespace {

std::string pid(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%03d", i);
  return buf;
}

}  // namespace

// -- model disagreement ---------------------------------------------------------

std::vector<ResponseRecord> summary_records() {
  // (share of the ten answers going to the L2 option, participants)
  const std::vector<std::pair<int, int>> groups{{10, 4}, {9, 8}, {8, 4}, {7, 11}, {6, 5},
                                                {0, 2},  {3, 4}, {4, 3}, {5, 3}};
  std::vector<ResponseRecord> out;
  Provenance prov;
  prov.generator = "model_disagreement";
  prov.model_a = "l1";
  prov.model_b = "l2";
  int n = 0;
  for (const auto& [l2_answers, count] : groups) {
    for (int c = 0; c < count; ++c, ++n) {
      for (int q = 0; q < 10; ++q) {
        out.push_back(choice_record(pid(n), "model_disagreement-" + std::to_string(q + 1), prov,
                                    q < l2_answers ? 1 : 0));
      }
    }
  }
  return out;
}

Rows summary_expected_rows() {
  return {
      {"L1 over L2", "20.5% (9)", "13.6% (6)", "4.5% (2)", "4.5% (2)", "4.5% (2)", ""},
      {"L2 over L1", "72.7% (32)", "61.4% (27)", "36.4% (16)", "27.3% (12)", "9.1% (4)", ""},
      {"Total L1 vs L2", "93.2% (41)", "75% (33)", "40.9% (18)", "31.8% (14)", "13.6% (6)", "44"},
  };
}

// -- single-peaked ---------------------------------------------------------------

std::vector<ResponseRecord> lambda_records() {
  // Per lambda tenth: consistent answers out of 71 (two questions at 0.5).
  const std::vector<std::pair<int, int>> consistent{{1, 55}, {2, 64}, {3, 66}, {4, 60}, {5, 65},
                                                    {5, 65}, {6, 65}, {7, 64}, {8, 63}, {9, 65}};
  std::vector<ResponseRecord> out;
  int question = 0;
  for (const auto& [tenth, hits] : consistent) {
    ++question;
    Provenance prov;
    prov.generator = "single_peaked";
    prov.lambda = Amount(tenth, 10);
    for (int i = 0; i < 71; ++i) {
      out.push_back(choice_record(pid(i), "single_peaked-" + std::to_string(question), prov, i < hits ? 1 : 0));
    }
  }
  return out;
}

Rows lambda_expected_rows() {
  return {{"0.1", "77.46", "71"},  {"0.2", "90.14", "71"}, {"0.3", "92.96", "71"},
          {"0.4", "84.51", "71"},  {"0.5", "91.55", "142"}, {"0.6", "91.55", "71"},
          {"0.7", "90.14", "71"},  {"0.8", "88.73", "71"}, {"0.9", "91.55", "71"}};
}

// -- peak linear -----------------------------------------------------------------

std::vector<ResponseRecord> peak_linear_records() {
  const std::vector<std::string> pairs{"A-B", "A-C", "B-C"};
  const std::array<Amount, 3> lambdas{Amount(1, 4), Amount(1, 2), Amount(3, 4)};
  const int hits[3][3] = {{30, 32, 31}, {35, 37, 35}, {40, 35, 35}};
  std::vector<ResponseRecord> out;
  for (int i = 0; i < 44; ++i) {
    int q = 0;
    for (const auto& pair : pairs) {
      Provenance prov;
      prov.generator = "peak_linear";
      prov.role = "extreme";
      prov.pair = pair;
      // Half the participants prefer the first extreme, so consistency is
      // not the same thing as choosing option 0.
      out.push_back(choice_record(pid(i), "peak_linear-" + std::to_string(++q), prov, i % 2));
    }
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        Provenance prov;
        prov.generator = "peak_linear";
        prov.role = "blend";
        prov.pair = pairs[p];
        prov.lambda = lambdas[l];
        const bool consistent = i < hits[l][p];
        out.push_back(choice_record(pid(i), "peak_linear-" + std::to_string(++q), prov,
                                    consistent ? i % 2 : 1 - i % 2));
      }
    }
  }
  return out;
}

Rows peak_linear_expected_rows() {
  return {
      {"25% (λ=0.25)", "68% (30/44)", "73% (32/44)", "70% (31/44)", "70% (93/132)"},
      {"50% (λ=0.5)", "80% (35/44)", "84% (37/44)", "80% (35/44)", "81% (107/132)"},
      {"75% (λ=0.75)", "91% (40/44)", "80% (35/44)", "80% (35/44)", "83% (110/132)"},
      {"All percentiles", "80% (105/132)", "79% (104/132)", "77% (101/132)", "78% (310/396)"},
  };
}

// -- ranking ---------------------------------------------------------------------

std::vector<ResponseRecord> ranking_records() {
  // Ranking sequences with 3, 2, 1 and 0 relations constant.
  const std::vector<std::vector<std::vector<int>>> patterns{
      {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}},
      {{0, 1, 2}, {1, 0, 2}, {0, 1, 2}, {1, 0, 2}},
      {{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {0, 1, 2}},
      {{0, 1, 2}, {2, 1, 0}, {0, 1, 2}, {2, 1, 0}},
  };
  const std::array<int, 4> counts{7, 9, 11, 10};
  std::vector<ResponseRecord> out;
  int n = 0;
  for (std::size_t g = 0; g < patterns.size(); ++g) {
    for (int c = 0; c < counts[g]; ++c, ++n) {
      for (std::size_t q = 0; q < 4; ++q) {
        out.push_back(ranking_record(pid(n), "cyclic_asymmetry-" + std::to_string(q + 1), patterns[g][q]));
      }
    }
  }
  return out;
}

Rows ranking_expected_rows() {
  return {{"Number of Participants", "27", "16", "7"}, {"Percentage", "72.9%", "43.2%", "18.9%"}};
}

// -- biennial --------------------------------------------------------------------

std::vector<ResponseRecord> biennial_records() {
  // Per sub-poll: (ideal answers out of 4, participants).
  const std::array<std::vector<std::pair<int, int>>, 3> groups{{
      {{2, 2}, {3, 10}, {1, 2}, {4, 24}, {0, 1}},
      {{2, 2}, {3, 6}, {1, 4}, {4, 27}},
      {{2, 3}, {3, 7}, {1, 3}, {4, 26}},
  }};
  std::vector<ResponseRecord> out;
  for (int sp = 1; sp <= 3; ++sp) {
    int n = 0;
    for (const auto& [ideal, count] : groups[static_cast<std::size_t>(sp - 1)]) {
      for (int c = 0; c < count; ++c, ++n) {
        for (int round = 0; round < 4; ++round) {
          Provenance prov;
          prov.generator = "biennial";
          prov.sub_poll = sp;
          prov.set_index = round;
          out.push_back(choice_record(pid(n), "biennial-" + std::to_string(3 * round + sp), prov,
                                      round < ideal ? 0 : 1));
        }
      }
    }
  }
  return out;
}

std::vector<Rows> biennial_expected_rows() {
  return {
      {{"50%", "2", "50.00%", "50.00%"},
       {"75%", "12", "66.70%", "33.30%"},
       {"100%", "25", "96.00%", "4.00%"},
       {"Total", "39", "84.60%", "15.40%"}},
      {{"50%", "2", "50.00%", "50.00%"},
       {"75%", "10", "55.00%", "45.00%"},
       {"100%", "27", "100.00%", "0.00%"},
       {"Total", "39", "85.90%", "14.10%"}},
      {{"50%", "3", "50.00%", "50.00%"},
       {"75%", "10", "60.00%", "40.00%"},
       {"100%", "26", "100.00%", "0.00%"},
       {"Total", "39", "85.90%", "14.10%"}},
      {{"Sub-poll 1", "100.00% (39)", "94.87% (37)", "64.10% (25)", "39"},
       {"Sub-poll 2", "100.00% (39)", "94.87% (37)", "69.23% (27)", "39"},
       {"Sub-poll 3", "100.00% (39)", "92.31% (36)", "66.67% (26)", "39"}},
  };
}

// -- transitivity ----------------------------------------------------------------

std::vector<ResponseRecord> cycle_records(const std::string& participant) {
  // (model_a, model_b, answers choosing model_a's option out of 10)
  const std::vector<std::tuple<std::string, std::string, int>> polls{
      {"l1", "leontief", 8}, {"l1", "l2", 3}, {"l2", "leontief", 4}};
  std::vector<ResponseRecord> out;
  int q = 0;
  for (const auto& [a, b, wins] : polls) {
    Provenance prov;
    prov.generator = "model_disagreement";
    prov.model_a = a;
    prov.model_b = b;
    for (int i = 0; i < 10; ++i) {
      out.push_back(choice_record(participant, "model_disagreement-" + std::to_string(++q), prov, i < wins ? 0 : 1));
    }
  }
  return out;
}

// -- plumbing --------------------------------------------------------------------

TempDir::TempDir() {
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() / ("pbpoll-test-" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

ApiClient::ApiClient(int port) : client_("127.0.0.1", port) {
  client_.set_connection_timeout(5);
  client_.set_read_timeout(30);
}

namespace {

ApiClient::Reply to_reply(const httplib::Result& res) {
  ApiClient::Reply r;
  if (!res) return r;
  r.status = res->status;
  r.raw = res->body;
  if (res->get_header_value("Content-Type") == "application/json" && !res->body.empty()) {
    r.body = Json::parse(res->body);
  }
  return r;
}

httplib::Headers auth(const std::string& token) {
  httplib::Headers h;
  if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
  return h;
}

}  // namespace

ApiClient::Reply ApiClient::get(const std::string& path, const std::string& token) {
  return to_reply(client_.Get(path, auth(token)));
}

ApiClient::Reply ApiClient::post(const std::string& path, const Json& body, const std::string& token) {
  return to_reply(client_.Post(path, auth(token), body.dump(), "application/json"));
}

std::string drive_agent_http(ApiClient& api, const std::string& poll_id, const std::string& participant_id,
                             const AgentSpec& agent, std::uint64_t answer_seed) {
  const auto started = api.post("/polls/" + poll_id + "/sessions", Json{{"participant_id", participant_id}});
  if (started.status != 201) return "error:" + std::to_string(started.status);
  const std::string sid = started.body["session_id"];
  const std::string token = started.body["token"];

  Json values = Json::array();
  for (const auto& x : agent.ideal.allocation.entries()) values.push_back(amount_to_json(x));
  const auto ideal = api.post("/sessions/" + sid + "/ideal", Json{{"values", values}, {"rescale", false}}, token);
  if (ideal.status == 422 && ideal.body.value("error", "") == "ScreenedOut") return "screened_out";
  if (ideal.status != 200) return "error:" + std::to_string(ideal.status);

  Rng rng(answer_seed);
  for (;;) {
    const auto next = api.get("/sessions/" + sid + "/next", token);
    if (next.status != 200) return "error:" + std::to_string(next.status);
    if (!next.body.contains("question")) return next.body["state"];
    const Json& qj = next.body["question"];
    // The client only sees display order, so it answers on that.
    Question q;
    q.id = qj["question_id"];
    q.kind = parse_question_kind(qj["kind"].get<std::string>());
    for (const auto& o : qj["options"]) q.options.push_back(option_from_json(o));
    const ResponseRecord r = answer(agent, q, "", rng);
    Json body{{"question_id", q.id}};
    if (const int* c = std::get_if<int>(&r.answer)) {
      body["choice"] = *c;
    } else {
      body["ranking"] = std::get<std::vector<int>>(r.answer);
    }
    const auto reply = api.post("/sessions/" + sid + "/answers", body, token);
    if (reply.status != 200) return "error:" + std::to_string(reply.status);
    const std::string state = reply.body["state"];
    if (state != "active") return state;
  }
}

}  // namespace testing
