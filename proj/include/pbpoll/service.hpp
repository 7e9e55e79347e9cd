#pragma once

// Poll lifecycle with an append-only event log per poll. Every state change
// goes through one apply() path, so replaying a log on startup rebuilds the
// exact state the live operations produced.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbpoll/battery.hpp"
#include "pbpoll/json_io.hpp"
#include "pbpoll/records.hpp"

namespace pbpoll {

enum class SessionState { AwaitingIdeal, Active, Completed, Blocked, ScreenedOut };
enum class PollStatus { Open, Closed };

std::string_view session_state_name(SessionState s);
std::string_view poll_status_name(PollStatus s);

struct ServiceOptions {
  /// Empty keeps everything in memory.
  std::filesystem::path data_dir;
  /// Required for poll creation, closing and export. Empty disables the check.
  std::string admin_token;
  /// Milliseconds since the epoch; replaceable for tests.
  std::function<std::int64_t()> clock;
};

struct SessionTicket {
  std::string session_id;
  std::string token;
  SessionState state = SessionState::AwaitingIdeal;
};

/// What a participant sees: options in display order and nothing about
/// where the question came from.
struct NextQuestion {
  SessionState state = SessionState::Active;
  std::optional<Question> question;
  std::size_t position = 0;
  std::size_t total = 0;
};

class PollService {
 public:
  /// Replays every poll listed in data_dir/registry.json.
  explicit PollService(ServiceOptions options);
  ~PollService();
  PollService(const PollService&) = delete;
  PollService& operator=(const PollService&) = delete;

  /// Body is a battery config plus optional "issues" (a scope name or
  /// {"scope", "names"}), "seed" and "poll_id". Alertness checks and option
  /// shuffling are always on. Returns the poll view.
  Json create_poll(const Json& body, std::string_view admin_token);
  Json poll_view(const std::string& poll_id) const;
  Json close_poll(const std::string& poll_id, std::string_view admin_token);

  SessionTicket start_session(const std::string& poll_id, const std::string& participant_id);

  /// Returns the accepted ideal. Bad vectors raise ValidationFailed and leave
  /// the session waiting; ineligible ideals or batteries that cannot be built
  /// raise ScreenedOut after moving the session to screened_out.
  BudgetAllocation submit_ideal(const std::string& session_id, std::string_view token,
                                const std::vector<Amount>& raw, bool use_rescale);

  /// The question at the cursor, without advancing. Completed sessions get
  /// no question.
  NextQuestion next_question(const std::string& session_id, std::string_view token);

  /// Returns the session state after the answer.
  SessionState submit_answer(const std::string& session_id, std::string_view token,
                             const std::string& question_id, const Answer& displayed_answer);

  /// Header line followed by the poll's records in submission order.
  std::string export_responses(const std::string& poll_id, std::string_view admin_token) const;

  Json session_view(const std::string& session_id, std::string_view token) const;
  bool participant_blocked(const std::string& participant_id) const;

  /// Full internal state, for comparing a live service with a replayed one.
  Json snapshot() const;

 private:
  struct Session;
  struct Poll;

  std::shared_ptr<Poll> find_poll(const std::string& poll_id) const;
  std::shared_ptr<Poll> session_poll(const std::string& session_id) const;
  /// Caller holds poll.mu.
  Session& authorize(Poll& poll, const std::string& session_id, std::string_view token) const;
  void check_admin(std::string_view token) const;
  void commit(Poll& poll, std::string event_type, const std::string& session_id, Json payload,
              const QuestionBattery* battery = nullptr);
  void apply(Poll& poll, const Json& event, const QuestionBattery* battery);
  void save_registry() const;
  void load();
  Json poll_view_locked(const Poll& poll) const;
  std::int64_t now() const;

  ServiceOptions options_;
  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Poll>> polls_;
  std::vector<std::string> poll_order_;
  std::map<std::string, std::shared_ptr<Poll>> session_index_;
  struct Participant {
    bool blocked = false;
    std::vector<std::string> sessions;
  };
  std::map<std::string, Participant> participants_;
};

}  // namespace pbpoll
