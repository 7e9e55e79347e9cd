#include "pbpoll/service.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "pbpoll/agents.hpp"
#include "pbpoll/error.hpp"
#include "pbpoll/random.hpp"

namespace pbpoll {

namespace fs = std::filesystem;

std::string_view session_state_name(SessionState s) {
  switch (s) {
    case SessionState::AwaitingIdeal: return "awaiting_ideal";
    case SessionState::Active: return "active";
    case SessionState::Completed: return "completed";
    case SessionState::Blocked: return "blocked";
    case SessionState::ScreenedOut: return "screened_out";
  }
  return "unknown";
}

std::string_view poll_status_name(PollStatus s) { return s == PollStatus::Open ? "open" : "closed"; }

namespace {

bool valid_poll_id(const std::string& id) {
  if (id.empty() || id.size() > 64 || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

std::string random_token() {
  std::random_device rd;
  char buf[33];
  const std::uint64_t a = (std::uint64_t{rd()} << 32) | rd();
  const std::uint64_t b = (std::uint64_t{rd()} << 32) | rd();
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                static_cast<unsigned long long>(b));
  return buf;
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (std::uint64_t{rd()} << 32) | rd();
}

Json issues_to_json(const IssueSet& issues) {
  return Json{{"scope", std::string(issues.scope_name())}, {"names", issues.names()}};
}

IssueSet issues_from_json(const Json& j) {
  try {
    if (j.is_string()) return IssueSet::parse(j.get<std::string>());
    if (!j.is_object() || !j.contains("scope")) throw Error(Errc::InvalidConfig, "issues must name a scope");
    const IssueSet base = IssueSet::parse(j.at("scope").get<std::string>());
    if (!j.contains("names")) return base;
    const auto names = j.at("names").get<std::vector<std::string>>();
    if (names.size() != kIssues) throw Error(Errc::InvalidConfig, "issues need exactly three names");
    return IssueSet({names[0], names[1], names[2]}, base.scope());
  } catch (const Json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("bad issues: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
}

bool is_generation_failure(Errc c) {
  return c == Errc::GenerationExhausted || c == Errc::FallbackExhausted || c == Errc::Unsatisfiable ||
         c == Errc::InvalidOptions || c == Errc::LeontiefZeroIdeal;
}

}  // namespace

struct PollService::Session {
  std::string id;
  std::string participant_id;
  std::string token;
  std::uint64_t ordinal = 0;
  SessionState state = SessionState::AwaitingIdeal;
  std::optional<BudgetAllocation> ideal;
  std::optional<QuestionBattery> battery;
  std::size_t cursor = 0;
  std::optional<std::size_t> served_cursor;
  std::int64_t served_at = 0;
  std::string reason;
};

struct PollService::Poll {
  std::string id;
  BatteryConfig config;
  IssueSet issues = IssueSet::national();
  std::uint64_t seed = 0;
  PollStatus status = PollStatus::Open;
  bool requires_all_positive = false;
  std::int64_t created_ms = 0;
  std::uint64_t seq = 0;
  std::map<std::string, Session> sessions;
  std::vector<std::string> session_order;
  std::vector<ResponseRecord> records;
  fs::path log_path;
  mutable std::mutex mu;

  Session& session(const std::string& id) { return sessions.at(id); }
};

PollService::PollService(ServiceOptions options) : options_(std::move(options)) {
  if (!options_.clock) {
    options_.clock = [] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
  if (!options_.data_dir.empty()) load();
}

PollService::~PollService() = default;

std::int64_t PollService::now() const { return options_.clock(); }

void PollService::check_admin(std::string_view token) const {
  if (!options_.admin_token.empty() && token != options_.admin_token) {
    throw Error(Errc::Unauthorized, "admin token required");
  }
}

std::shared_ptr<PollService::Poll> PollService::find_poll(const std::string& poll_id) const {
  std::lock_guard lock(registry_mutex_);
  const auto it = polls_.find(poll_id);
  if (it == polls_.end()) throw Error(Errc::UnknownPoll, "unknown poll " + poll_id);
  return it->second;
}

std::shared_ptr<PollService::Poll> PollService::session_poll(const std::string& session_id) const {
  std::lock_guard lock(registry_mutex_);
  const auto it = session_index_.find(session_id);
  if (it == session_index_.end()) throw Error(Errc::UnknownSession, "unknown session " + session_id);
  return it->second;
}

PollService::Session& PollService::authorize(Poll& poll, const std::string& session_id,
                                              std::string_view token) const {
  Session& s = poll.session(session_id);
  if (s.token != token) throw Error(Errc::Unauthorized, "session token does not match");
  return s;
}

// -- persistence --------------------------------------------------------------

void PollService::commit(Poll& poll, std::string event_type, const std::string& session_id, Json payload,
                         const QuestionBattery* battery) {
  Json event{{"event_type", std::move(event_type)},
             {"session_id", session_id},
             {"payload", std::move(payload)},
             {"seq", poll.seq + 1},
             {"timestamp", now()}};
  if (!poll.log_path.empty()) {
    std::ofstream out(poll.log_path, std::ios::app | std::ios::binary);
    out << event.dump() << '\n';
    out.flush();
    if (!out) throw Error(Errc::IoError, "cannot append to " + poll.log_path.string());
  }
  apply(poll, event, battery);
}

void PollService::apply(Poll& poll, const Json& event, const QuestionBattery* prebuilt) {
  const auto seq = event.at("seq").get<std::uint64_t>();
  if (seq <= poll.seq) {
    throw Error(Errc::IoError, "event log for " + poll.id + " has non-increasing seq " + std::to_string(seq));
  }
  poll.seq = seq;
  const std::string type = event.at("event_type").get<std::string>();
  const std::string sid = event.at("session_id").get<std::string>();
  const Json& payload = event.at("payload");
  const std::int64_t ts = event.at("timestamp").get<std::int64_t>();

  if (type == "poll_created") {
    poll.config = config_from_json(payload.at("config"));
    poll.issues = issues_from_json(payload.at("issues"));
    poll.seed = payload.at("seed").get<std::uint64_t>();
    poll.requires_all_positive = requires_all_positive(poll.config);
    poll.created_ms = ts;
    return;
  }
  if (type == "poll_closed") {
    poll.status = PollStatus::Closed;
    return;
  }
  if (type == "session_started") {
    Session s;
    s.id = sid;
    s.participant_id = payload.at("participant_id").get<std::string>();
    s.token = payload.at("token").get<std::string>();
    s.ordinal = payload.at("ordinal").get<std::uint64_t>();
    poll.sessions.emplace(sid, std::move(s));
    poll.session_order.push_back(sid);
    std::lock_guard lock(registry_mutex_);
    participants_[payload.at("participant_id").get<std::string>()].sessions.push_back(sid);
    session_index_[sid] = polls_.at(poll.id);
    return;
  }

  Session& s = poll.session(sid);
  if (type == "ideal_submitted") {
    s.ideal = allocation_from_json(payload.at("ideal"));
    const auto battery_seed = payload.at("battery_seed").get<std::uint64_t>();
    s.battery = prebuilt ? *prebuilt : generate_battery(poll.config, *s.ideal, battery_seed);
    s.cursor = 0;
    s.state = s.battery->questions.empty() ? SessionState::Completed : SessionState::Active;
  } else if (type == "session_screened_out") {
    if (payload.contains("ideal")) s.ideal = allocation_from_json(payload.at("ideal"));
    s.reason = payload.at("reason").get<std::string>();
    s.state = SessionState::ScreenedOut;
  } else if (type == "question_served") {
    s.served_cursor = payload.at("cursor").get<std::size_t>();
    s.served_at = ts;
  } else if (type == "answer_submitted") {
    const Question& q = s.battery->questions.at(s.cursor);
    ResponseRecord r = make_record(q, s.battery->battery_kind, s.participant_id, s.id,
                                   answer_from_json(payload.at("answer")));
    r.timestamp_ms = ts;
    r.received_at_ms = s.served_cursor == s.cursor ? s.served_at : ts;
    ++s.cursor;
    if (failed_alertness(r)) {
      s.state = SessionState::Blocked;
      std::lock_guard lock(registry_mutex_);
      participants_[s.participant_id].blocked = true;
    } else if (ends_session(r)) {
      s.state = SessionState::ScreenedOut;
      s.reason = "balanced across years on a screening question";
    } else if (s.cursor == s.battery->questions.size()) {
      s.state = SessionState::Completed;
    }
    poll.records.push_back(std::move(r));
  } else {
    throw Error(Errc::IoError, "unknown event type " + type);
  }
}

void PollService::save_registry() const {
  if (options_.data_dir.empty()) return;
  Json participants = Json::object();
  Json polls = Json::array();
  {
    std::lock_guard lock(registry_mutex_);
    for (const auto& [id, p] : participants_) {
      participants[id] = Json{{"blocked", p.blocked}, {"sessions", p.sessions}};
    }
    polls = poll_order_;
  }
  const Json doc{{"polls", polls}, {"participants", participants}};
  const fs::path path = options_.data_dir / "registry.json";
  const fs::path tmp = options_.data_dir / "registry.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    out << doc.dump(2) << '\n';
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "cannot replace " + path.string() + ": " + ec.message());
}

void PollService::load() {
  std::error_code ec;
  fs::create_directories(options_.data_dir / "polls", ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + options_.data_dir.string() + ": " + ec.message());
  const fs::path registry = options_.data_dir / "registry.json";
  if (!fs::exists(registry)) return;

  std::ifstream in(registry, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const Json doc = parse_json(buf.str());
  for (const auto& id_json : doc.at("polls")) {
    const std::string id = id_json.get<std::string>();
    auto poll = std::make_shared<Poll>();
    poll->id = id;
    poll->log_path = options_.data_dir / "polls" / (id + ".ndjson");
    polls_[id] = poll;
    poll_order_.push_back(id);

    std::ifstream log(poll->log_path, std::ios::binary);
    if (!log) throw Error(Errc::IoError, "missing event log " + poll->log_path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(log, line)) {
      ++n;
      if (line.empty()) continue;
      try {
        apply(*poll, parse_json(line), nullptr);
      } catch (const Json::exception& e) {
        throw Error(Errc::IoError, poll->log_path.string() + " line " + std::to_string(n) + ": " + e.what());
      }
    }
  }
}

// -- polls --------------------------------------------------------------------

Json PollService::poll_view_locked(const Poll& poll) const {
  Json config = config_to_json(poll.config);
  return Json{{"poll_id", poll.id},
              {"battery_kind", std::string(battery_kind_name(poll.config.kind))},
              {"config", config},
              {"issues", issues_to_json(poll.issues)},
              {"status", std::string(poll_status_name(poll.status))},
              {"requires_all_positive", poll.requires_all_positive},
              {"sessions", poll.session_order.size()}};
}

Json PollService::create_poll(const Json& body, std::string_view admin_token) {
  check_admin(admin_token);
  if (!body.is_object()) throw Error(Errc::InvalidConfig, "poll body must be an object");
  BatteryConfig config = config_from_json(body);
  config.alertness = true;
  config.shuffle = true;
  validate_config(config);
  const IssueSet issues = body.contains("issues") ? issues_from_json(body.at("issues")) : IssueSet::national();
  std::uint64_t seed = random_seed();
  if (body.contains("seed")) {
    const Json& v = body.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw Error(Errc::InvalidConfig, "seed must be a non-negative integer");
    }
    seed = body.at("seed").get<std::uint64_t>();
  }

  auto poll = std::make_shared<Poll>();
  {
    std::lock_guard lock(registry_mutex_);
    if (body.contains("poll_id")) {
      if (!body.at("poll_id").is_string()) throw Error(Errc::InvalidConfig, "poll_id must be a string");
      poll->id = body.at("poll_id").get<std::string>();
      if (!valid_poll_id(poll->id)) throw Error(Errc::InvalidConfig, "poll_id may only use letters, digits, '-', '_' and '.'");
      if (polls_.count(poll->id)) throw Error(Errc::InvalidConfig, "poll " + poll->id + " already exists");
    } else {
      std::size_t n = poll_order_.size() + 1;
      while (polls_.count("poll-" + std::to_string(n))) ++n;
      poll->id = "poll-" + std::to_string(n);
    }
    if (!options_.data_dir.empty()) poll->log_path = options_.data_dir / "polls" / (poll->id + ".ndjson");
    polls_[poll->id] = poll;
    poll_order_.push_back(poll->id);
  }
  Json view;
  {
    std::lock_guard lock(poll->mu);
    commit(*poll, "poll_created", "",
           Json{{"config", config_to_json(config)}, {"issues", issues_to_json(issues)}, {"seed", seed}});
    view = poll_view_locked(*poll);
  }
  save_registry();
  return view;
}

Json PollService::poll_view(const std::string& poll_id) const {
  const auto poll = find_poll(poll_id);
  std::lock_guard lock(poll->mu);
  return poll_view_locked(*poll);
}

Json PollService::close_poll(const std::string& poll_id, std::string_view admin_token) {
  check_admin(admin_token);
  const auto poll = find_poll(poll_id);
  std::lock_guard lock(poll->mu);
  if (poll->status == PollStatus::Open) commit(*poll, "poll_closed", "", Json::object());
  return poll_view_locked(*poll);
}

// -- sessions -------------------------------------------------------------------

bool PollService::participant_blocked(const std::string& participant_id) const {
  std::lock_guard lock(registry_mutex_);
  const auto it = participants_.find(participant_id);
  return it != participants_.end() && it->second.blocked;
}

SessionTicket PollService::start_session(const std::string& poll_id, const std::string& participant_id) {
  if (participant_id.empty()) throw Error(Errc::InvalidConfig, "participant_id is required");
  const auto poll = find_poll(poll_id);
  SessionTicket ticket;
  {
    std::lock_guard lock(poll->mu);
    if (participant_blocked(participant_id)) {
      throw Error(Errc::ParticipantBlocked, "participant " + participant_id + " is blocked");
    }
    if (poll->status == PollStatus::Closed) throw Error(Errc::PollClosed, "poll " + poll_id + " is closed");
    const std::uint64_t ordinal = poll->session_order.size();
    ticket.session_id = poll->id + "-s" + std::to_string(ordinal + 1);
    ticket.token = random_token();
    commit(*poll, "session_started", ticket.session_id,
           Json{{"participant_id", participant_id}, {"token", ticket.token}, {"ordinal", ordinal}});
  }
  save_registry();
  return ticket;
}

namespace {

void require_not_blocked(bool participant_blocked, SessionState state) {
  if (participant_blocked || state == SessionState::Blocked) {
    throw Error(Errc::SessionBlocked, "participant is blocked");
  }
}

}  // namespace

BudgetAllocation PollService::submit_ideal(const std::string& session_id, std::string_view token,
                                           const std::vector<Amount>& raw, bool use_rescale) {
  const auto poll = session_poll(session_id);
  std::lock_guard lock(poll->mu);
  Session* s = &authorize(*poll, session_id, token);
  require_not_blocked(participant_blocked(s->participant_id), s->state);
  if (s->state != SessionState::AwaitingIdeal) {
    throw Error(Errc::SessionNotActive, "session " + session_id + " already has an ideal");
  }

  BudgetAllocation allocation;
  try {
    allocation = use_rescale ? rescale(raw) : validate_allocation(raw, true);
    make_ideal(allocation, s->participant_id);
  } catch (const Error& e) {
    throw Error(Errc::ValidationFailed, e.what());
  }

  const Json raw_json = [&raw] {
    Json a = Json::array();
    for (const auto& x : raw) a.push_back(amount_to_json(x));
    return a;
  }();
  auto screen_out = [&](const std::string& reason) {
    commit(*poll, "session_screened_out", session_id,
           Json{{"reason", reason}, {"raw", raw_json}, {"ideal", allocation_to_json(allocation)}});
    throw Error(Errc::ScreenedOut, reason);
  };

  try {
    make_ideal(allocation, s->participant_id, poll->requires_all_positive);
  } catch (const Error& e) {
    screen_out(e.what());
  }
  const std::uint64_t battery_seed = derive_seed(poll->seed, 2 * s->ordinal);
  QuestionBattery battery;
  try {
    battery = generate_battery(poll->config, allocation, battery_seed);
  } catch (const Error& e) {
    if (!is_generation_failure(e.code())) throw;
    screen_out(std::string("no questions can be built for this budget: ") + e.what());
  }
  commit(*poll, "ideal_submitted", session_id,
         Json{{"raw", raw_json},
              {"rescale", use_rescale},
              {"ideal", allocation_to_json(allocation)},
              {"battery_seed", battery_seed}},
         &battery);
  return allocation;
}

NextQuestion PollService::next_question(const std::string& session_id, std::string_view token) {
  const auto poll = session_poll(session_id);
  std::lock_guard lock(poll->mu);
  Session* s = &authorize(*poll, session_id, token);
  require_not_blocked(participant_blocked(s->participant_id), s->state);
  NextQuestion out;
  out.state = s->state;
  if (s->state == SessionState::Completed) {
    out.position = out.total = s->battery->questions.size();
    return out;
  }
  if (s->state != SessionState::Active) {
    throw Error(Errc::SessionNotActive,
                "session " + session_id + " is " + std::string(session_state_name(s->state)));
  }
  const Question& q = s->battery->questions[s->cursor];
  if (s->served_cursor != s->cursor) {
    commit(*poll, "question_served", session_id, Json{{"question_id", q.id}, {"cursor", s->cursor}});
  }
  out.question = q;
  out.position = s->cursor;
  out.total = s->battery->questions.size();
  return out;
}

SessionState PollService::submit_answer(const std::string& session_id, std::string_view token,
                                        const std::string& question_id, const Answer& displayed_answer) {
  const auto poll = session_poll(session_id);
  SessionState state;
  bool blocked_now = false;
  {
    std::lock_guard lock(poll->mu);
    Session* s = &authorize(*poll, session_id, token);
    require_not_blocked(participant_blocked(s->participant_id), s->state);
    if (s->state == SessionState::Completed) {
      throw Error(Errc::WrongQuestion, "session " + session_id + " has no open question");
    }
    if (s->state != SessionState::Active) {
      throw Error(Errc::SessionNotActive,
                  "session " + session_id + " is " + std::string(session_state_name(s->state)));
    }
    const Question& q = s->battery->questions[s->cursor];
    if (q.id != question_id) {
      throw Error(Errc::WrongQuestion, "expected an answer to " + q.id + ", got " + question_id);
    }
    check_answer_shape(q, displayed_answer);
    commit(*poll, "answer_submitted", session_id,
           Json{{"question_id", question_id}, {"cursor", s->cursor}, {"answer", answer_to_json(displayed_answer)}});
    state = s->state;
    blocked_now = state == SessionState::Blocked;
  }
  if (blocked_now) save_registry();
  return state;
}

Json PollService::session_view(const std::string& session_id, std::string_view token) const {
  const auto poll = session_poll(session_id);
  std::lock_guard lock(poll->mu);
  Session* s = &authorize(*poll, session_id, token);
  Json view{{"session_id", s->id},
            {"poll_id", poll->id},
            {"participant_id", s->participant_id},
            {"state", std::string(session_state_name(s->state))},
            {"cursor", s->cursor},
            {"length", s->battery ? s->battery->questions.size() : 0}};
  if (s->ideal) view["ideal"] = allocation_to_json(*s->ideal);
  if (!s->reason.empty()) view["reason"] = s->reason;
  return view;
}

// -- export -------------------------------------------------------------------

std::string PollService::export_responses(const std::string& poll_id, std::string_view admin_token) const {
  check_admin(admin_token);
  const auto poll = find_poll(poll_id);
  std::lock_guard lock(poll->mu);
  Json sessions = Json::array();
  for (const auto& sid : poll->session_order) {
    const Session& s = poll->sessions.at(sid);
    sessions.push_back(Json{{"session_id", s.id},
                            {"participant_id", s.participant_id},
                            {"state", std::string(session_state_name(s.state))},
                            {"cursor", s.cursor},
                            {"length", s.battery ? s.battery->questions.size() : 0}});
  }
  const Json header{{"type", "header"},
                    {"poll_id", poll->id},
                    {"battery_kind", std::string(battery_kind_name(poll->config.kind))},
                    {"status", std::string(poll_status_name(poll->status))},
                    {"seed", poll->seed},
                    {"record_count", poll->records.size()},
                    {"sessions", sessions}};
  std::string out = header.dump() + "\n";
  for (const auto& r : poll->records) {
    Json j = record_to_json(r);
    j["type"] = "response";
    out += j.dump();
    out += '\n';
  }
  return out;
}

Json PollService::snapshot() const {
  std::vector<std::shared_ptr<Poll>> polls;
  Json participants = Json::object();
  {
    std::lock_guard lock(registry_mutex_);
    for (const auto& id : poll_order_) polls.push_back(polls_.at(id));
    for (const auto& [id, p] : participants_) {
      participants[id] = Json{{"blocked", p.blocked}, {"sessions", p.sessions}};
    }
  }
  Json out{{"participants", participants}, {"polls", Json::array()}};
  for (const auto& poll : polls) {
    std::lock_guard lock(poll->mu);
    Json p = poll_view_locked(*poll);
    p["seed"] = poll->seed;
    p["seq"] = poll->seq;
    p["created_ms"] = poll->created_ms;
    Json sessions = Json::array();
    for (const auto& sid : poll->session_order) {
      const Session& s = poll->sessions.at(sid);
      Json j{{"session_id", s.id},
             {"participant_id", s.participant_id},
             {"token", s.token},
             {"ordinal", s.ordinal},
             {"state", std::string(session_state_name(s.state))},
             {"cursor", s.cursor},
             {"served_at", s.served_at},
             {"reason", s.reason}};
      if (s.served_cursor) j["served_cursor"] = *s.served_cursor;
      if (s.ideal) j["ideal"] = allocation_to_json(*s.ideal);
      if (s.battery) j["battery"] = battery_to_json(*s.battery);
      sessions.push_back(std::move(j));
    }
    p["session_states"] = std::move(sessions);
    Json records = Json::array();
    for (const auto& r : poll->records) records.push_back(record_to_json(r));
    p["records"] = std::move(records);
    out["polls"].push_back(std::move(p));
  }
  return out;
}

}  // namespace pbpoll
