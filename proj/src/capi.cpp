#include "pbpoll/pbpoll.h"

#include <httplib.h>

#include <random>
#include <string>
#include <thread>

#include "pbpoll/agents.hpp"
#include "pbpoll/analysis.hpp"
#include "pbpoll/error.hpp"
#include "pbpoll/http.hpp"
#include "pbpoll/json_io.hpp"
#include "pbpoll/service.hpp"

struct pbp_buffer {
  std::string text;
};

struct pbp_responses {
  std::vector<pbpoll::ResponseRecord> records;
  std::vector<pbpoll::AgentFailure> failures;
};

struct pbp_service {
  std::unique_ptr<pbpoll::PollService> service;
  std::unique_ptr<pbpoll::HttpServer> server;
  std::thread thread;
};

namespace {

using namespace pbpoll;

thread_local std::string last_error;

pbp_status status_of(Errc code) {
  switch (code) {
    case Errc::BadLength:
    case Errc::SumMismatch:
    case Errc::OutOfRange:
    case Errc::OffGrid:
    case Errc::AllZero:
    case Errc::TooFewPositive:
    case Errc::ZeroEntry:
    case Errc::NotZeroSum:
    case Errc::LeontiefZeroIdeal:
    case Errc::InvalidOptions:
    case Errc::ValidationFailed:
    case Errc::MalformedAnswer:
    case Errc::ScreenedOut:
      return PBP_VALIDATION;
    case Errc::GenerationExhausted:
    case Errc::FallbackExhausted:
    case Errc::Unsatisfiable:
      return PBP_GENERATION_EXHAUSTED;
    case Errc::EmptyResponseSet:
    case Errc::IncompleteSet:
    case Errc::MalformedRanking:
    case Errc::IncompleteMatrix:
    case Errc::IncompleteTriple:
    case Errc::MissingBaseline:
      return PBP_INCOMPLETE_DATA;
    case Errc::IoError:
      return PBP_IO;
    case Errc::Unauthorized:
      return PBP_UNAUTHORIZED;
    default:
      return PBP_INVALID_ARGUMENT;
  }
}

pbp_status fail(pbp_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename F>
pbp_status guarded(F f) {
  try {
    last_error.clear();
    return f();
  } catch (const Error& e) {
    return fail(status_of(e.code()), std::string(errc_name(e.code())) + ": " + e.what());
  } catch (const Json::exception& e) {
    return fail(PBP_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PBP_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PBP_INTERNAL, e.what());
  }
}

pbp_buffer* make_buffer(std::string text) { return new pbp_buffer{std::move(text)}; }

std::vector<Amount> parse_values(const char* text) {
  const std::string_view s(text);
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && s[first] == '[') {
    const Json j = parse_json(s);
    std::vector<Amount> out;
    for (const auto& x : j) out.push_back(amount_from_json(x));
    return out;
  }
  return parse_amount_list(s);
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (std::uint64_t{rd()} << 32) | rd();
}

}  // namespace

extern "C" {

const char* pbp_status_string(pbp_status status) {
  switch (status) {
    case PBP_OK: return "ok";
    case PBP_INVALID_ARGUMENT: return "invalid argument";
    case PBP_VALIDATION: return "validation failed";
    case PBP_GENERATION_EXHAUSTED: return "generation exhausted";
    case PBP_INCOMPLETE_DATA: return "incomplete data";
    case PBP_IO: return "i/o error";
    case PBP_NETWORK: return "network error";
    case PBP_UNAUTHORIZED: return "unauthorized";
    case PBP_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pbp_last_error(void) { return last_error.c_str(); }

const char* pbp_buffer_data(const pbp_buffer* buffer) { return buffer ? buffer->text.c_str() : ""; }
size_t pbp_buffer_size(const pbp_buffer* buffer) { return buffer ? buffer->text.size() : 0; }
void pbp_buffer_free(pbp_buffer* buffer) { delete buffer; }

pbp_status pbp_battery_generate(const char* config_json, const char* ideal, uint64_t seed, pbp_buffer** out) {
  if (!config_json || !ideal || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const BatteryConfig config = config_from_json(parse_json(config_json));
    const auto allocation = BudgetAllocation::from(parse_values(ideal));
    make_ideal(allocation, "");
    const auto battery = generate_battery(config, allocation, seed);
    *out = make_buffer(battery_to_json(battery).dump(2) + "\n");
    return PBP_OK;
  });
}

pbp_status pbp_rescale(const char* values, pbp_buffer** out) {
  if (!values || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = make_buffer(allocation_to_json(rescale(parse_values(values))).dump());
    return PBP_OK;
  });
}

pbp_status pbp_responses_simulate(const char* cohort_json, const uint64_t* seed, pbp_responses** out,
                                  uint64_t* used_seed) {
  if (!cohort_json || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const CohortSpec spec = cohort_spec_from_json(parse_json(cohort_json));
    const std::uint64_t s = seed ? *seed : spec.has_seed ? spec.seed : fresh_seed();
    if (used_seed) *used_seed = s;
    auto result = run_cohort(spec.agents, spec.battery, s);
    *out = new pbp_responses{std::move(result.records), std::move(result.failures)};
    return PBP_OK;
  });
}

pbp_status pbp_responses_parse(const char* ndjson, size_t length, pbp_responses** out) {
  if ((!ndjson && length > 0) || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new pbp_responses{records_from_ndjson(std::string_view(ndjson ? ndjson : "", length)), {}};
    return PBP_OK;
  });
}

pbp_status pbp_responses_to_ndjson(const pbp_responses* responses, pbp_buffer** out) {
  if (!responses || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = make_buffer(records_to_ndjson(responses->records));
    return PBP_OK;
  });
}

size_t pbp_responses_count(const pbp_responses* responses) { return responses ? responses->records.size() : 0; }

pbp_status pbp_responses_failures(const pbp_responses* responses, pbp_buffer** out) {
  if (!responses || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    Json a = Json::array();
    for (const auto& f : responses->failures) {
      a.push_back(Json{{"participant_id", f.participant_id},
                       {"error", std::string(errc_name(f.code))},
                       {"message", f.message}});
    }
    *out = make_buffer(a.dump());
    return PBP_OK;
  });
}

void pbp_responses_free(pbp_responses* responses) { delete responses; }

pbp_status pbp_analyze(const pbp_responses* responses, const char* format, unsigned flags, pbp_buffer** out) {
  if (!responses || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const ReportFormat f = parse_report_format(format ? format : "markdown");
    AnalysisOptions options;
    options.exclude_tie_broken = flags & PBP_EXCLUDE_TIE_BROKEN;
    options.exclude_failed_alertness = !(flags & PBP_KEEP_FAILED_ALERTNESS);
    options.partial_credit = flags & PBP_PARTIAL_CREDIT;
    *out = make_buffer(render_report(analyze_all(responses->records, options), f));
    return PBP_OK;
  });
}

pbp_status pbp_service_create(const char* data_dir, const char* admin_token, pbp_service** out) {
  if (!out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ServiceOptions options;
    if (data_dir) options.data_dir = data_dir;
    if (admin_token) options.admin_token = admin_token;
    auto handle = std::make_unique<pbp_service>();
    handle->service = std::make_unique<PollService>(std::move(options));
    *out = handle.release();
    return PBP_OK;
  });
}

pbp_status pbp_service_listen(pbp_service* service, const char* host, int port, const char* static_dir,
                              int* bound_port) {
  if (!service || !host) return fail(PBP_INVALID_ARGUMENT, "null argument");
  if (service->server) return fail(PBP_INVALID_ARGUMENT, "service is already listening");
  return guarded([&] {
    service->server = std::make_unique<HttpServer>(*service->service, static_dir ? static_dir : "");
    int p = 0;
    try {
      p = service->server->bind(host, port);
    } catch (const Error& e) {
      service->server.reset();
      return fail(PBP_NETWORK, e.what());
    }
    if (bound_port) *bound_port = p;
    HttpServer* server = service->server.get();
    service->thread = std::thread([server] { server->listen(); });
    while (!server->running()) std::this_thread::yield();
    return PBP_OK;
  });
}

pbp_status pbp_service_wait(pbp_service* service) {
  if (!service) return fail(PBP_INVALID_ARGUMENT, "null argument");
  if (service->thread.joinable()) service->thread.join();
  return PBP_OK;
}

pbp_status pbp_service_stop(pbp_service* service) {
  if (!service) return fail(PBP_INVALID_ARGUMENT, "null argument");
  if (service->server) service->server->stop();
  if (service->thread.joinable()) service->thread.join();
  return PBP_OK;
}

void pbp_service_free(pbp_service* service) {
  if (!service) return;
  pbp_service_stop(service);
  delete service;
}

pbp_status pbp_export_fetch(const char* base_url, const char* poll_id, const char* admin_token, pbp_buffer** out) {
  if (!base_url || !poll_id || !out) return fail(PBP_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    httplib::Client client(base_url);
    client.set_connection_timeout(5);
    httplib::Headers headers;
    if (admin_token && *admin_token) headers.emplace("Authorization", std::string("Bearer ") + admin_token);
    const auto res = client.Get("/polls/" + std::string(poll_id) + "/export", headers);
    if (!res) return fail(PBP_NETWORK, "request to " + std::string(base_url) + " failed: " + httplib::to_string(res.error()));
    if (res->status == 401) return fail(PBP_UNAUTHORIZED, "export rejected the admin token");
    if (res->status == 404) return fail(PBP_INVALID_ARGUMENT, "unknown poll " + std::string(poll_id));
    if (res->status != 200) return fail(PBP_NETWORK, "export returned HTTP " + std::to_string(res->status) + ": " + res->body);
    *out = make_buffer(res->body);
    return PBP_OK;
  });
}

}  // extern "C"
