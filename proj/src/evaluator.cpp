#include "specpilot/evaluator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "specpilot/errors.hpp"
#include "specpilot/generator.hpp"
#include "specpilot/retrieval.hpp"

namespace specpilot {

using ordered_json = nlohmann::ordered_json;

std::string verdict_name(Verdict v)
{
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Revise: return "revise";
        case Verdict::FailSyntax: return "fail_syntax";
        case Verdict::NotExecuted: return "not_executed";
    }
    return {};
}

Verdict verdict_from_name(const std::string& name)
{
    if (name == "pass") return Verdict::Pass;
    if (name == "revise") return Verdict::Revise;
    if (name == "fail_syntax") return Verdict::FailSyntax;
    if (name == "not_executed") return Verdict::NotExecuted;
    throw InvalidArgumentError("unknown verdict '" + name + "'");
}

namespace {

constexpr double kMatchThreshold = 0.25;

std::set<std::string> step_token_set(const StepBlock& step)
{
    std::set<std::string> tokens;
    for (const std::string& t : tokenize(step.title)) tokens.insert(t);
    for (const Statement& stmt : step.statements) {
        if (stmt.kind != Statement::Kind::Let && stmt.kind != Statement::Kind::Call) continue;
        for (const std::string& t : tokenize(stmt.call.api)) tokens.insert(t);
    }
    return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b)
{
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const std::string& t : a) inter += b.count(t);
    std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

int count_asserts(const StepBlock& step)
{
    int n = 0;
    for (const Statement& s : step.statements)
        if (s.kind == Statement::Kind::Assert) ++n;
    return n;
}

}  // namespace

CoverageResult eval_coverage(const SpecDocument& spec, const TestScript& script)
{
    std::vector<std::set<std::string>> step_tokens;
    step_tokens.reserve(script.steps.size());
    for (const StepBlock& step : script.steps) step_tokens.push_back(step_token_set(step));

    CoverageResult result;
    result.matched_step.assign(spec.steps.size(), 0);
    std::vector<bool> taken(script.steps.size(), false);

    int matched = 0;
    for (std::size_t i = 0; i < spec.steps.size(); ++i) {
        std::set<std::string> action_tokens;
        for (const std::string& t : tokenize(spec.steps[i].action)) action_tokens.insert(t);
        double best = 0.0;
        int best_idx = -1;
        for (std::size_t j = 0; j < script.steps.size(); ++j) {
            if (taken[j]) continue;
            double sim = jaccard(action_tokens, step_tokens[j]);
            if (sim > best) {  // ties keep the lowest step number
                best = sim;
                best_idx = static_cast<int>(j);
            }
        }
        if (best_idx >= 0 && best >= kMatchThreshold) {
            taken[best_idx] = true;
            result.matched_step[i] = script.steps[best_idx].number;
            ++matched;
        } else {
            Finding f;
            f.code = "COV-MISSED-STEP";
            f.severity = Finding::Severity::Warn;
            f.location = "spec step " + std::to_string(spec.steps[i].index);
            f.message = "no script step matches action '" + spec.steps[i].action + "'";
            result.findings.push_back(std::move(f));
        }
    }
    result.score = spec.steps.empty()
                       ? 0.0
                       : static_cast<double>(matched) / static_cast<double>(spec.steps.size());
    return result;
}

ScoreResult eval_semantic(const SpecDocument& spec, const TestScript& script,
                          const ExecutionLog& log)
{
    CoverageResult coverage = eval_coverage(spec, script);

    // outcome per (block label, statement index)
    std::map<std::pair<std::string, int>, Outcome> outcomes;
    for (const LogEntry& e : log.entries) outcomes[{e.block, e.stmt}] = e.outcome;

    ScoreResult result;
    int satisfied = 0;
    for (std::size_t i = 0; i < spec.steps.size(); ++i) {
        int step_number = coverage.matched_step[i];
        if (step_number == 0) continue;  // not covered
        const StepBlock& block = script.steps[static_cast<std::size_t>(step_number) - 1];
        std::string label = "step " + std::to_string(block.number);
        int asserts = count_asserts(block);
        bool all_ok = asserts > 0;
        for (std::size_t s = 0; s < block.statements.size() && all_ok; ++s) {
            if (block.statements[s].kind != Statement::Kind::Assert) continue;
            auto it = outcomes.find({label, static_cast<int>(s) + 1});
            if (it == outcomes.end() || it->second != Outcome::Ok) all_ok = false;
        }
        if (all_ok) {
            ++satisfied;
        } else {
            Finding f;
            f.code = "SEM-FAILED-STEP";
            f.severity = Finding::Severity::Warn;
            f.location = label;
            f.message = asserts == 0
                            ? "spec step " + std::to_string(spec.steps[i].index) +
                                  " is covered but its step has no assert"
                            : "spec step " + std::to_string(spec.steps[i].index) +
                                  " is covered but an assert did not pass";
            result.findings.push_back(std::move(f));
        }
    }
    result.score = spec.steps.empty()
                       ? 0.0
                       : static_cast<double>(satisfied) / static_cast<double>(spec.steps.size());
    return result;
}

ScoreResult eval_improvement(const TestScript& script, const ApiRegistry& registry)
{
    ScoreResult result;
    auto add = [&result](std::string code, Finding::Severity severity, std::string location,
                         std::string message) {
        result.findings.push_back(
            {std::move(code), severity, std::move(location), std::move(message)});
    };

    // L1: literal call arguments in steps that mirror no data binding
    for (const StepBlock& step : script.steps) {
        std::string label = "step " + std::to_string(step.number);
        for (const Statement& stmt : step.statements) {
            if (stmt.kind != Statement::Kind::Let && stmt.kind != Statement::Kind::Call) continue;
            for (const CallArg& arg : stmt.call.args) {
                if (arg.kind != CallArg::Kind::Lit) continue;
                if (arg.lit.kind == Literal::Kind::Bool) continue;
                bool bound = false;
                for (const auto& [name, value] : script.data) {
                    if (value == arg.lit) {
                        bound = true;
                        break;
                    }
                }
                if (!bound)
                    add("L1-HARDCODED", Finding::Severity::Info, label,
                        "literal " + to_source(arg.lit) + " in call '" + stmt.call.api +
                            "' is not bound in the data block");
            }
        }
    }

    // L2: step blocks with no assert
    for (const StepBlock& step : script.steps) {
        if (count_asserts(step) == 0)
            add("L2-NO-ASSERT", Finding::Severity::Warn, "step " + std::to_string(step.number),
                "step has no assert");
    }

    // L3: missing teardown
    if (script.teardown.empty())
        add("L3-NO-TEARDOWN", Finding::Severity::Info, "script", "script has no teardown block");

    // L4: unknown APIs / arity mismatches, with the nearest registry name
    for (const UnknownApiFinding& f : check_api_names(script, registry)) {
        std::string message = f.message;
        if (f.reason == UnknownApiFinding::Reason::UnknownName) {
            if (auto nearest = nearest_api(f.api, registry))
                message += " (nearest: '" + nearest->first + "')";
            else
                message += " (no close registry name)";
        }
        add("L4-UNKNOWN-API", Finding::Severity::Warn, f.block, std::move(message));
    }

    // L5: identical adjacent statements within a block
    auto check_adjacent = [&add](const std::vector<Statement>& stmts, const std::string& label) {
        for (std::size_t i = 1; i < stmts.size(); ++i) {
            if (stmts[i] == stmts[i - 1])
                add("L5-DUPLICATE-STMT", Finding::Severity::Info, label,
                    "statement '" + render_statement(stmts[i]) + "' duplicates the previous one");
        }
    };
    check_adjacent(script.setup, "setup");
    for (const StepBlock& step : script.steps)
        check_adjacent(step.statements, "step " + std::to_string(step.number));
    check_adjacent(script.teardown, "teardown");

    double penalty = 0.2 * static_cast<double>(result.findings.size());
    result.score = std::max(0.0, 1.0 - penalty);
    return result;
}

namespace {

// Deterministic finding order: script blocks in source order, then
// script-level findings, then spec-step references; code breaks ties.
int location_rank(const std::string& location, const std::map<std::string, int>& block_rank)
{
    auto it = block_rank.find(location);
    if (it != block_rank.end()) return it->second;
    int base = static_cast<int>(block_rank.size());
    if (location == "script") return base;
    if (location.rfind("spec step ", 0) == 0)
        return base + 1 + std::stoi(location.substr(10));
    return base + 100000;
}

void sort_findings(std::vector<Finding>& findings, const TestScript& script)
{
    std::map<std::string, int> block_rank;
    int rank = 0;
    if (!script.data.empty()) block_rank["data"] = rank++;
    if (!script.setup.empty()) block_rank["setup"] = rank++;
    for (const StepBlock& step : script.steps)
        block_rank["step " + std::to_string(step.number)] = rank++;
    if (!script.teardown.empty()) block_rank["teardown"] = rank++;

    std::stable_sort(findings.begin(), findings.end(),
                     [&block_rank](const Finding& a, const Finding& b) {
                         int ra = location_rank(a.location, block_rank);
                         int rb = location_rank(b.location, block_rank);
                         if (ra != rb) return ra < rb;
                         return a.code < b.code;
                     });
}

struct BlockStats {
    std::string label;
    std::size_t statement_count = 0;
};

std::vector<BlockStats> script_blocks(const TestScript& script)
{
    std::vector<BlockStats> blocks;
    if (!script.data.empty()) blocks.push_back({"data", script.data.size()});
    if (!script.setup.empty()) blocks.push_back({"setup", script.setup.size()});
    for (const StepBlock& step : script.steps)
        blocks.push_back({"step " + std::to_string(step.number), step.statements.size()});
    if (!script.teardown.empty()) blocks.push_back({"teardown", script.teardown.size()});
    return blocks;
}

double executability_score(const TestScript& script, const ExecutionLog& log)
{
    std::vector<BlockStats> blocks = script_blocks(script);
    if (blocks.empty()) return 0.0;

    std::map<std::string, std::pair<std::size_t, bool>> attempted;  // label -> (count, faulted)
    for (const LogEntry& e : log.entries) {
        auto& [count, faulted] = attempted[e.block];
        ++count;
        if (e.outcome == Outcome::RuntimeError) faulted = true;
    }

    std::size_t completed = 0;
    for (const BlockStats& block : blocks) {
        auto it = attempted.find(block.label);
        if (it == attempted.end()) continue;
        const auto& [count, faulted] = it->second;
        if (!faulted && count == block.statement_count) ++completed;
    }
    return static_cast<double>(completed) / static_cast<double>(blocks.size());
}

}  // namespace

EvaluationMatrix evaluate(const SpecDocument& spec, const std::string& script_text,
                          const ExecutionLog* log, const ApiRegistry& registry,
                          const Thresholds& thresholds)
{
    EvaluationMatrix matrix;
    TestScript script;
    try {
        script = parse_script(script_text);
    } catch (const ScriptParseError& e) {
        matrix.syntax = 0;
        matrix.verdict = Verdict::FailSyntax;
        matrix.findings.push_back(
            {"SYN-PARSE", Finding::Severity::Warn, "script", e.what()});
        return matrix;
    }

    matrix.syntax = 1;
    CoverageResult coverage = eval_coverage(spec, script);
    matrix.coverage = coverage.score;
    ScoreResult improvement = eval_improvement(script, registry);
    matrix.improvement = improvement.score;

    matrix.findings.insert(matrix.findings.end(), coverage.findings.begin(),
                           coverage.findings.end());
    matrix.findings.insert(matrix.findings.end(), improvement.findings.begin(),
                           improvement.findings.end());

    if (log == nullptr) {
        matrix.executability = 0.0;
        matrix.semantic = 0.0;
        matrix.verdict = Verdict::NotExecuted;
        sort_findings(matrix.findings, script);
        return matrix;
    }

    matrix.executability = executability_score(script, *log);
    ScoreResult semantic = eval_semantic(spec, script, *log);
    matrix.semantic = semantic.score;
    matrix.findings.insert(matrix.findings.end(), semantic.findings.begin(),
                           semantic.findings.end());
    sort_findings(matrix.findings, script);

    bool pass = matrix.executability == 1.0 && matrix.coverage >= thresholds.coverage &&
                matrix.semantic >= thresholds.semantic;
    matrix.verdict = pass ? Verdict::Pass : Verdict::Revise;
    return matrix;
}

std::string matrix_to_json(const EvaluationMatrix& matrix)
{
    ordered_json root = ordered_json::object();
    root["syntax"] = matrix.syntax;
    root["executability"] = matrix.executability;
    root["coverage"] = matrix.coverage;
    root["semantic"] = matrix.semantic;
    root["improvement"] = matrix.improvement;
    root["verdict"] = verdict_name(matrix.verdict);
    ordered_json findings = ordered_json::array();
    for (const Finding& f : matrix.findings) {
        findings.push_back(
            {{"code", f.code},
             {"severity", f.severity == Finding::Severity::Warn ? "warn" : "info"},
             {"location", f.location},
             {"message", f.message}});
    }
    root["findings"] = std::move(findings);
    return root.dump(2) + "\n";
}

EvaluationMatrix matrix_from_json(const std::string& text)
{
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgumentError(std::string("bad evaluation json: ") + e.what());
    }
    EvaluationMatrix matrix;
    matrix.syntax = root.value("syntax", 0);
    matrix.executability = root.value("executability", 0.0);
    matrix.coverage = root.value("coverage", 0.0);
    matrix.semantic = root.value("semantic", 0.0);
    matrix.improvement = root.value("improvement", 0.0);
    matrix.verdict = verdict_from_name(root.value("verdict", "fail_syntax"));
    if (root.contains("findings")) {
        for (const auto& f : root["findings"]) {
            Finding finding;
            finding.code = f.value("code", "");
            finding.severity = f.value("severity", "warn") == "info" ? Finding::Severity::Info
                                                                     : Finding::Severity::Warn;
            finding.location = f.value("location", "");
            finding.message = f.value("message", "");
            matrix.findings.push_back(std::move(finding));
        }
    }
    return matrix;
}

}  // namespace specpilot
