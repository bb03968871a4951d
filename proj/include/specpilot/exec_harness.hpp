#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specpilot/clock.hpp"
#include "specpilot/literal.hpp"
#include "specpilot/script_dsl.hpp"
#include "specpilot/spec_model.hpp"

namespace specpilot {

struct ApiDef {
    std::vector<std::string> params;
    std::vector<std::string> results;  // always includes "status"
};

/// Ground truth for valid API names and arities; immutable once built.
class ApiRegistry {
  public:
    void add(std::string name, ApiDef def);
    bool contains(const std::string& name) const;
    const ApiDef* find(const std::string& name) const;
    std::vector<std::string> names() const;  // sorted

  private:
    std::map<std::string, ApiDef> apis_;
};

/// The simulated journey-planning SUT surface:
///   reset_system() -> {status}
///   add_train(id, origin, dest, dep_min, arr_min) -> {status}
///   cancel_train(id) -> {status}
///   get_train(id) -> {status, origin, dest, dep_min, arr_min}
///   query_connection(origin, dest) -> {status, count, earliest_dep, latest_arr}
ApiRegistry default_registry();

struct UnknownApiFinding {
    std::string api;
    std::string block;  // block label, e.g. "step 2"
    int statement = 0;  // 1-based within the block
    enum class Reason { UnknownName, ArityMismatch } reason = Reason::UnknownName;
    std::string message;
};

/// One finding per call site whose name is not registered or whose
/// argument count mismatches the registered arity.
std::vector<UnknownApiFinding> check_api_names(const TestScript& script,
                                               const ApiRegistry& registry);

enum class Outcome { Ok, AssertFail, RuntimeError };

std::string outcome_name(Outcome o);

struct LogEntry {
    std::string block;  // block label
    int stmt = 0;       // 1-based within the block
    std::string text;   // canonical statement text
    Outcome outcome = Outcome::Ok;
    std::string detail;
    std::vector<std::pair<std::string, Literal>> values;  // call result record
};

struct ExecutionLog {
    std::vector<LogEntry> entries;  // one per attempted statement, in order
    std::int64_t started_at = 0;
    std::int64_t finished_at = 0;
};

/// Interprets the script against a fresh SUT state. Assert failures are
/// logged and execution continues; runtime errors (unknown API, unbound
/// variable, missing field, type mismatch) abort the current block and
/// execution continues at the next block. All failures are log entries,
/// never exceptions.
ExecutionLog execute_script(const TestScript& script, const ApiRegistry& registry, Clock& clock);

/// One LogEntry per line with keys block, stmt, text, outcome, detail,
/// values.
std::string log_to_jsonl(const ExecutionLog& log);
ExecutionLog log_from_jsonl(const std::string& text);

/// Executor contract a remote CI system can satisfy. execute is never
/// called after available() reported false in the same iteration.
class CiExecutor {
  public:
    virtual ~CiExecutor() = default;

    virtual bool available() = 0;

    /// Throws TransportError on transport failure.
    virtual ExecutionLog execute(const std::string& script_text, const CiConfig& config) = 0;
};

/// In-process sandbox executor; the tested path.
class LocalExecutor final : public CiExecutor {
  public:
    LocalExecutor(const ApiRegistry& registry, Clock& clock, bool available = true)
        : registry_(registry), clock_(clock), available_(available)
    {}

    bool available() override { return available_; }
    ExecutionLog execute(const std::string& script_text, const CiConfig& config) override;

  private:
    const ApiRegistry& registry_;
    Clock& clock_;
    bool available_;
};

/// Stub client for a remote CI job endpoint:
///   GET  /health                            -> 200 when available
///   POST /execute?job=<job>&timeout_s=<n>   -> 200, body = JSONL log
/// Request body is the script text; timeout honors CiConfig.timeout_s.
class RemoteCiExecutor final : public CiExecutor {
  public:
    RemoteCiExecutor(std::string host, int port) : host_(std::move(host)), port_(port) {}

    bool available() override;
    ExecutionLog execute(const std::string& script_text, const CiConfig& config) override;

  private:
    std::string host_;
    int port_;
};

}  // namespace specpilot
