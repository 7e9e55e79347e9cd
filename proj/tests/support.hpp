#pragma once

// Helpers shared by the unit tests and the acceptance runner: hand-built
// response sets with known counts, a scratch directory, and a scripted
// service client.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <httplib.h>

#include "pbpoll/agents.hpp"
#include "pbpoll/analysis.hpp"
#include "pbpoll/json_io.hpp"
#include "pbpoll/service.hpp"

namespace testing {

using namespace pbpoll;

using Rows = std::vector<std::vector<std::string>>;

BudgetAllocation alloc(std::int64_t a, std::int64_t b, std::int64_t c);

ResponseRecord choice_record(const std::string& participant, const std::string& question_id,
                             const Provenance& provenance, int choice);
ResponseRecord ranking_record(const std::string& participant, const std::string& question_id,
                              const std::vector<int>& ranking);

/// 44 participants answering ten L1-vs-L2 questions each, rates of choosing
/// the L2 option spread so the threshold counts are 9/6/2/2/2 and
/// 32/27/16/12/4.
std::vector<ResponseRecord> summary_records();
Rows summary_expected_rows();

/// 71 participants, one answer per lambda (two at 0.5), with 55, 64, 66, 60,
/// 130, 65, 64, 63, 65 consistent answers.
std::vector<ResponseRecord> lambda_records();
Rows lambda_expected_rows();

/// 44 participants; consistent blend answers per (lambda, pair) as in the
/// published percentile table.
std::vector<ResponseRecord> peak_linear_records();
Rows peak_linear_expected_rows();

/// 37 participants: 7 with all three relations constant, 9 with two, 11
/// with one, 10 with none.
std::vector<ResponseRecord> ranking_records();
Rows ranking_expected_rows();

/// 39 participants over the three biennial sub-polls.
std::vector<ResponseRecord> biennial_records();
std::vector<Rows> biennial_expected_rows();

/// L1 beats Leontief, L2 beats L1, Leontief beats L2.
std::vector<ResponseRecord> cycle_records(const std::string& participant);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// JSON over HTTP against a running HttpServer.
class ApiClient {
 public:
  explicit ApiClient(int port);

  struct Reply {
    int status = 0;
    Json body;
    std::string raw;
  };

  Reply get(const std::string& path, const std::string& token = {});
  Reply post(const std::string& path, const Json& body, const std::string& token = {});

 private:
  httplib::Client client_;
};

/// Drives one agent through a live session over HTTP, answering exactly as
/// run_cohort would. Returns the final session state name.
std::string drive_agent_http(ApiClient& api, const std::string& poll_id, const std::string& participant_id,
                             const AgentSpec& agent, std::uint64_t answer_seed);

}  // namespace testing
