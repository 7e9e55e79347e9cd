// Command-line front end. Everything goes through the C API so the CLI
// behaves exactly like any other client of the shared library.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <pthread.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbpoll/pbpoll.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitIncomplete = 2;
constexpr int kExitExhausted = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code(pbp_status s) {
  switch (s) {
    case PBP_OK: return 0;
    case PBP_INCOMPLETE_DATA: return kExitIncomplete;
    case PBP_GENERATION_EXHAUSTED: return kExitExhausted;
    default: return kExitUsage;
  }
}

void check(pbp_status s) {
  if (s != PBP_OK) throw Failure{exit_code(s), std::string(pbp_status_string(s)) + ": " + pbp_last_error()};
}

/// Owns a pbp_buffer.
class Buffer {
 public:
  Buffer() = default;
  ~Buffer() { pbp_buffer_free(b_); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  pbp_buffer** out() { return &b_; }
  std::string str() const { return std::string(pbp_buffer_data(b_), pbp_buffer_size(b_)); }

 private:
  pbp_buffer* b_ = nullptr;
};

class Responses {
 public:
  ~Responses() { pbp_responses_free(r_); }
  pbp_responses** out() { return &r_; }
  const pbp_responses* get() const { return r_; }

 private:
  pbp_responses* r_ = nullptr;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure{kExitUsage, "cannot write " + path};
}

Json parse_config(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Failure{kExitUsage, what + ": " + e.what()};
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (std::uint64_t{rd()} << 32) | rd();
  std::cerr << "seed: " << s << "\n";
  return s;
}

struct GenerateArgs {
  std::string kind;
  std::string ideal;
  std::string config_path;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  bool alertness = false;
  bool shuffle = false;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  Json config = a.config_path.empty() ? Json::object() : parse_config(read_file(a.config_path), a.config_path);
  if (!a.kind.empty()) config["kind"] = a.kind;
  if (!config.contains("kind")) throw Failure{kExitUsage, "--kind or a config with a kind is required"};
  if (a.k) config["k"] = *a.k;
  if (a.alertness) config["alertness"] = true;
  if (a.shuffle) config["shuffle"] = true;
  const std::uint64_t seed = resolve_seed(a.seed);
  Buffer battery;
  check(pbp_battery_generate(config.dump().c_str(), a.ideal.c_str(), seed, battery.out()));
  write_output(a.out, battery.str());
  return 0;
}

struct SimulateArgs {
  std::string cohort_path;
  std::string kind;
  std::string model = "l1";
  int n = 40;
  double noise = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  Json cohort;
  if (!a.cohort_path.empty()) {
    cohort = parse_config(read_file(a.cohort_path), a.cohort_path);
    if (!a.kind.empty()) cohort["battery"]["kind"] = a.kind;
  } else {
    if (a.kind.empty()) throw Failure{kExitUsage, "--kind is required without --cohort"};
    cohort = Json{{"battery", {{"kind", a.kind}}},
                  {"random", {{"n", a.n}, {"model", a.model}, {"noise", a.noise}}}};
  }
  Responses responses;
  std::uint64_t used = 0;
  check(pbp_responses_simulate(cohort.dump().c_str(), a.seed ? &*a.seed : nullptr, responses.out(), &used));
  if (!a.seed) std::cerr << "seed: " << used << "\n";
  Buffer failures;
  check(pbp_responses_failures(responses.get(), failures.out()));
  const Json f = Json::parse(failures.str());
  for (const auto& x : f) {
    std::cerr << "agent " << x["participant_id"].get<std::string>() << " skipped: " << x["error"].get<std::string>()
              << " (" << x["message"].get<std::string>() << ")\n";
  }
  Buffer ndjson;
  check(pbp_responses_to_ndjson(responses.get(), ndjson.out()));
  write_output(a.out, ndjson.str());
  return 0;
}

struct AnalyzeArgs {
  std::string in;
  std::string format = "markdown";
  bool exclude_ties = false;
  bool keep_failed = false;
  bool partial_credit = false;
  std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
  const std::string text = read_file(a.in);
  Responses responses;
  check(pbp_responses_parse(text.data(), text.size(), responses.out()));
  unsigned flags = 0;
  if (a.exclude_ties) flags |= PBP_EXCLUDE_TIE_BROKEN;
  if (a.keep_failed) flags |= PBP_KEEP_FAILED_ALERTNESS;
  if (a.partial_credit) flags |= PBP_PARTIAL_CREDIT;
  Buffer report;
  check(pbp_analyze(responses.get(), a.format.c_str(), flags, report.out()));
  write_output(a.out, report.str());
  return 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "pbpoll-data";
  std::string admin_token;
  std::string static_dir;
};

int run_serve(const ServeArgs& a) {
  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  pbp_service* service = nullptr;
  check(pbp_service_create(a.data_dir.c_str(), a.admin_token.c_str(), &service));
  int port = 0;
  const pbp_status s = pbp_service_listen(service, a.host.c_str(), a.port,
                                          a.static_dir.empty() ? nullptr : a.static_dir.c_str(), &port);
  if (s != PBP_OK) {
    pbp_service_free(service);
    check(s);
  }
  std::cerr << "listening on http://" << a.host << ":" << port << "\n";
  if (a.admin_token.empty()) std::cerr << "warning: no admin token, export is open to anyone\n";
  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "stopping\n";
  pbp_service_free(service);
  return 0;
}

struct ExportArgs {
  std::string url = "http://127.0.0.1:8080";
  std::string poll;
  std::string admin_token;
  std::string out;
};

int run_export(const ExportArgs& a) {
  Buffer body;
  check(pbp_export_fetch(a.url.c_str(), a.poll.c_str(), a.admin_token.c_str(), body.out()));
  write_output(a.out, body.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Participatory budgeting poll toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write the question battery for one ideal budget");
  generate->add_option("--kind", gen.kind, "Battery kind");
  generate->add_option("--ideal", gen.ideal, "Ideal budget, e.g. 30,20,50")->required();
  generate->add_option("--config", gen.config_path, "Battery config document");
  generate->add_option("--k", gen.k, "Number of sets or questions");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_flag("--alertness", gen.alertness, "Insert the two alertness checks");
  generate->add_flag("--shuffle", gen.shuffle, "Shuffle option order");
  generate->add_option("-o,--out", gen.out, "Output path (default stdout)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a synthetic cohort and write its responses");
  simulate->add_option("--cohort", sim.cohort_path, "Cohort spec document");
  simulate->add_option("--kind", sim.kind, "Battery kind (overrides the cohort spec)");
  simulate->add_option("--model", sim.model, "Utility model of random agents")->capture_default_str();
  simulate->add_option("--n", sim.n, "Number of random agents")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--noise", sim.noise, "Answer-at-random probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("-o,--out", sim.out, "Output path (default stdout)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Write consistency tables for a response file");
  analyze->add_option("--in", an.in, "Response file (NDJSON, '-' for stdin)")->required();
  analyze->add_option("--format", an.format, "markdown or csv")->capture_default_str();
  analyze->add_flag("--exclude-ties", an.exclude_ties, "Drop tie-broken answers");
  analyze->add_flag("--keep-failed-alertness", an.keep_failed, "Keep participants who failed a check");
  analyze->add_flag("--partial-credit", an.partial_credit, "Partial credit for symmetry sets");
  analyze->add_option("-o,--out", an.out, "Output path (default stdout)");

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Run the poll service");
  serve->add_option("--host", sv.host)->capture_default_str();
  serve->add_option("--port", sv.port)->capture_default_str();
  serve->add_option("--data-dir", sv.data_dir, "Event logs and registry")->capture_default_str();
  serve->add_option("--admin-token", sv.admin_token, "Token for poll admin and export")->envname("PBPOLL_ADMIN_TOKEN");
  serve->add_option("--static", sv.static_dir, "Directory served at /");

  ExportArgs ex;
  auto* exp = app.add_subcommand("export", "Download a poll's responses from a running service");
  exp->add_option("--url", ex.url, "Service base URL")->capture_default_str();
  exp->add_option("--poll", ex.poll, "Poll id")->required();
  exp->add_option("--admin-token", ex.admin_token)->envname("PBPOLL_ADMIN_TOKEN");
  exp->add_option("-o,--out", ex.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*simulate) return run_simulate(sim);
    if (*analyze) return run_analyze(an);
    if (*serve) return run_serve(sv);
    if (*exp) return run_export(ex);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kExitUsage;
}
