#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specpilot/exec_harness.hpp"
#include "specpilot/script_dsl.hpp"
#include "specpilot/spec_model.hpp"

namespace specpilot {

enum class Verdict { Pass, Revise, FailSyntax, NotExecuted };

std::string verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& name);

struct Finding {
    std::string code;  // L1-HARDCODED .. L5-DUPLICATE-STMT, COV-MISSED-STEP,
                       // SEM-FAILED-STEP, SYN-PARSE
    enum class Severity { Info, Warn } severity = Severity::Warn;
    std::string location;  // block label, "script", or "spec step N"
    std::string message;

    bool operator==(const Finding&) const = default;
};

struct Thresholds {
    double coverage = 0.8;
    double semantic = 0.8;
};

/// The five-dimension score for one candidate script.
struct EvaluationMatrix {
    int syntax = 0;  // 0 or 1
    double executability = 0.0;
    double coverage = 0.0;
    double semantic = 0.0;
    double improvement = 0.0;
    std::vector<Finding> findings;
    Verdict verdict = Verdict::FailSyntax;
};

struct CoverageResult {
    double score = 0.0;
    std::vector<Finding> findings;
    /// Per spec step (0-based): matched script step number, or 0 when
    /// missed. Feeds the engineer report's coverage map.
    std::vector<int> matched_step;
};

/// Greedy matching of spec steps to script steps by token Jaccard
/// (threshold 0.25) over step title tokens plus call-name tokens.
CoverageResult eval_coverage(const SpecDocument& spec, const TestScript& script);

struct ScoreResult {
    double score = 0.0;
    std::vector<Finding> findings;
};

/// A spec step is satisfied iff it is covered, its matched step block
/// has at least one assert, and every assert in that block logged ok.
ScoreResult eval_semantic(const SpecDocument& spec, const TestScript& script,
                          const ExecutionLog& log);

/// Lint pass: L1 hardcoded literal, L2 step without assert, L3 missing
/// teardown, L4 unknown API, L5 duplicated adjacent statement.
/// score = max(0, 1 - 0.2 * findings).
ScoreResult eval_improvement(const TestScript& script, const ApiRegistry& registry);

/// Full matrix. A null log yields verdict not_executed (coverage and
/// improvement are still computed); unparsable text yields fail_syntax
/// with all scores zero.
EvaluationMatrix evaluate(const SpecDocument& spec, const std::string& script_text,
                          const ExecutionLog* log, const ApiRegistry& registry,
                          const Thresholds& thresholds = {});

std::string matrix_to_json(const EvaluationMatrix& matrix);
EvaluationMatrix matrix_from_json(const std::string& text);

}  // namespace specpilot
