#include "specpilot/exec_harness.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <variant>

#include <nlohmann/json.hpp>

#include "specpilot/errors.hpp"

namespace specpilot {

using ordered_json = nlohmann::ordered_json;

void ApiRegistry::add(std::string name, ApiDef def)
{
    apis_.emplace(std::move(name), std::move(def));
}

bool ApiRegistry::contains(const std::string& name) const
{
    return apis_.count(name) != 0;
}

const ApiDef* ApiRegistry::find(const std::string& name) const
{
    auto it = apis_.find(name);
    return it == apis_.end() ? nullptr : &it->second;
}

std::vector<std::string> ApiRegistry::names() const
{
    std::vector<std::string> out;
    out.reserve(apis_.size());
    for (const auto& [name, def] : apis_) out.push_back(name);
    return out;
}

ApiRegistry default_registry()
{
    ApiRegistry reg;
    reg.add("reset_system", {{}, {"status"}});
    reg.add("add_train", {{"id", "origin", "dest", "dep_min", "arr_min"}, {"status"}});
    reg.add("cancel_train", {{"id"}, {"status"}});
    reg.add("get_train", {{"id"}, {"status", "origin", "dest", "dep_min", "arr_min"}});
    reg.add("query_connection",
            {{"origin", "dest"}, {"status", "count", "earliest_dep", "latest_arr"}});
    return reg;
}

namespace {

struct BlockView {
    std::string label;
    const std::vector<Statement>* statements;
};

std::vector<BlockView> statement_blocks(const TestScript& script)
{
    std::vector<BlockView> blocks;
    if (!script.setup.empty()) blocks.push_back({"setup", &script.setup});
    for (const StepBlock& step : script.steps)
        blocks.push_back({"step " + std::to_string(step.number), &step.statements});
    if (!script.teardown.empty()) blocks.push_back({"teardown", &script.teardown});
    return blocks;
}

}  // namespace

std::vector<UnknownApiFinding> check_api_names(const TestScript& script,
                                               const ApiRegistry& registry)
{
    std::vector<UnknownApiFinding> findings;
    for (const BlockView& block : statement_blocks(script)) {
        for (std::size_t i = 0; i < block.statements->size(); ++i) {
            const Statement& stmt = (*block.statements)[i];
            if (stmt.kind != Statement::Kind::Let && stmt.kind != Statement::Kind::Call) continue;
            UnknownApiFinding f;
            f.api = stmt.call.api;
            f.block = block.label;
            f.statement = static_cast<int>(i) + 1;
            const ApiDef* def = registry.find(stmt.call.api);
            if (def == nullptr) {
                f.reason = UnknownApiFinding::Reason::UnknownName;
                f.message = "unknown API '" + stmt.call.api + "'";
                findings.push_back(std::move(f));
            } else if (def->params.size() != stmt.call.args.size()) {
                f.reason = UnknownApiFinding::Reason::ArityMismatch;
                f.message = "API '" + stmt.call.api + "' expects " +
                            std::to_string(def->params.size()) + " arguments, got " +
                            std::to_string(stmt.call.args.size());
                findings.push_back(std::move(f));
            }
        }
    }
    return findings;
}

std::string outcome_name(Outcome o)
{
    switch (o) {
        case Outcome::Ok: return "ok";
        case Outcome::AssertFail: return "assert_fail";
        case Outcome::RuntimeError: return "runtime_error";
    }
    return {};
}

namespace {

struct Train {
    std::string origin;
    std::string dest;
    std::int64_t dep_min = 0;
    std::int64_t arr_min = 0;
    bool cancelled = false;
};

using Record = std::vector<std::pair<std::string, Literal>>;
using Value = std::variant<Literal, Record>;

struct RuntimeFault {
    std::string message;
};

class Interpreter {
  public:
    Interpreter(const ApiRegistry& registry) : registry_(registry) {}

    ExecutionLog run(const TestScript& script, Clock& clock)
    {
        ExecutionLog log;
        log.started_at = clock.now();

        // Data bindings cannot fault; each one still logs an entry.
        if (!script.data.empty()) {
            int stmt = 0;
            for (const auto& [name, value] : script.data) {
                env_[name] = value;
                LogEntry entry;
                entry.block = "data";
                entry.stmt = ++stmt;
                entry.text = "let " + name + " = " + to_source(value);
                entry.outcome = Outcome::Ok;
                log.entries.push_back(std::move(entry));
            }
        }

        for (const BlockView& block : statement_blocks(script)) {
            for (std::size_t i = 0; i < block.statements->size(); ++i) {
                const Statement& stmt = (*block.statements)[i];
                LogEntry entry;
                entry.block = block.label;
                entry.stmt = static_cast<int>(i) + 1;
                entry.text = render_statement(stmt);
                bool abort_block = false;
                try {
                    run_statement(stmt, entry);
                } catch (const RuntimeFault& fault) {
                    entry.outcome = Outcome::RuntimeError;
                    entry.detail = fault.message;
                    abort_block = true;
                }
                log.entries.push_back(std::move(entry));
                if (abort_block) break;  // rest of this block is unattempted
            }
        }

        log.finished_at = clock.now();
        return log;
    }

  private:
    void run_statement(const Statement& stmt, LogEntry& entry)
    {
        switch (stmt.kind) {
            case Statement::Kind::Comment: entry.outcome = Outcome::Ok; break;
            case Statement::Kind::Call: {
                Record result = dispatch(stmt.call);
                entry.values = result;
                entry.outcome = Outcome::Ok;
                break;
            }
            case Statement::Kind::Let: {
                Record result = dispatch(stmt.call);
                entry.values = result;
                env_[stmt.let_name] = std::move(result);
                entry.outcome = Outcome::Ok;
                break;
            }
            case Statement::Kind::Assert: {
                Literal lhs = eval_operand(stmt.cmp.lhs);
                Literal rhs = eval_operand(stmt.cmp.rhs);
                bool ok = compare(lhs, stmt.cmp.op, rhs);
                entry.detail = to_source(lhs) + " " + op_text(stmt.cmp.op) + " " + to_source(rhs);
                entry.outcome = ok ? Outcome::Ok : Outcome::AssertFail;
                break;
            }
        }
    }

    static const char* op_text(CmpOp op)
    {
        switch (op) {
            case CmpOp::Eq: return "==";
            case CmpOp::Ne: return "!=";
            case CmpOp::Lt: return "<";
            case CmpOp::Le: return "<=";
            case CmpOp::Gt: return ">";
            case CmpOp::Ge: return ">=";
        }
        return "==";
    }

    Literal resolve_arg(const CallArg& arg)
    {
        if (arg.kind == CallArg::Kind::Lit) return arg.lit;
        auto it = env_.find(arg.var);
        if (it == env_.end()) throw RuntimeFault{"unbound variable '" + arg.var + "'"};
        if (std::holds_alternative<Record>(it->second))
            throw RuntimeFault{"variable '" + arg.var +
                               "' holds a call result and cannot be passed as an argument"};
        return std::get<Literal>(it->second);
    }

    Literal eval_operand(const Operand& o)
    {
        switch (o.kind) {
            case Operand::Kind::Lit: return o.lit;
            case Operand::Kind::Var: {
                auto it = env_.find(o.var);
                if (it == env_.end()) throw RuntimeFault{"unbound variable '" + o.var + "'"};
                if (std::holds_alternative<Record>(it->second))
                    throw RuntimeFault{"variable '" + o.var +
                                       "' is a call result; compare one of its fields"};
                return std::get<Literal>(it->second);
            }
            case Operand::Kind::Field: {
                auto it = env_.find(o.var);
                if (it == env_.end()) throw RuntimeFault{"unbound variable '" + o.var + "'"};
                if (!std::holds_alternative<Record>(it->second))
                    throw RuntimeFault{"variable '" + o.var + "' has no fields"};
                const Record& record = std::get<Record>(it->second);
                for (const auto& [field, value] : record)
                    if (field == o.field) return value;
                throw RuntimeFault{"result '" + o.var + "' has no field '" + o.field + "'"};
            }
        }
        throw RuntimeFault{"invalid operand"};
    }

    bool compare(const Literal& lhs, CmpOp op, const Literal& rhs)
    {
        if (lhs.kind != rhs.kind)
            throw RuntimeFault{"type mismatch comparing " + kind_name(lhs.kind) + " and " +
                               kind_name(rhs.kind)};
        if (lhs.kind == Literal::Kind::Bool && op != CmpOp::Eq && op != CmpOp::Ne)
            throw RuntimeFault{"booleans support only == and !="};
        int cmp = 0;
        switch (lhs.kind) {
            case Literal::Kind::Str: cmp = lhs.str.compare(rhs.str); break;
            case Literal::Kind::Int: cmp = lhs.num < rhs.num ? -1 : (lhs.num > rhs.num ? 1 : 0); break;
            case Literal::Kind::Bool: cmp = lhs.flag == rhs.flag ? 0 : 1; break;
        }
        switch (op) {
            case CmpOp::Eq: return cmp == 0;
            case CmpOp::Ne: return cmp != 0;
            case CmpOp::Lt: return cmp < 0;
            case CmpOp::Le: return cmp <= 0;
            case CmpOp::Gt: return cmp > 0;
            case CmpOp::Ge: return cmp >= 0;
        }
        return false;
    }

    static std::string kind_name(Literal::Kind k)
    {
        switch (k) {
            case Literal::Kind::Str: return "string";
            case Literal::Kind::Int: return "integer";
            case Literal::Kind::Bool: return "boolean";
        }
        return {};
    }

    Record dispatch(const CallExpr& call)
    {
        const ApiDef* def = registry_.find(call.api);
        if (def == nullptr) throw RuntimeFault{"unknown API '" + call.api + "'"};
        if (def->params.size() != call.args.size())
            throw RuntimeFault{"API '" + call.api + "' expects " +
                               std::to_string(def->params.size()) + " arguments, got " +
                               std::to_string(call.args.size())};
        std::vector<Literal> args;
        args.reserve(call.args.size());
        for (const CallArg& a : call.args) args.push_back(resolve_arg(a));

        if (call.api == "reset_system") {
            trains_.clear();
            return {{"status", Literal::of_string("OK")}};
        }
        if (call.api == "add_train") {
            std::string id = want_string(args[0], "id");
            Train train;
            train.origin = want_string(args[1], "origin");
            train.dest = want_string(args[2], "dest");
            train.dep_min = want_int(args[3], "dep_min");
            train.arr_min = want_int(args[4], "arr_min");
            if (train.dep_min >= train.arr_min) return {{"status", Literal::of_string("ERR")}};
            trains_[id] = train;
            return {{"status", Literal::of_string("OK")}};
        }
        if (call.api == "cancel_train") {
            auto it = trains_.find(want_string(args[0], "id"));
            if (it == trains_.end()) return {{"status", Literal::of_string("NOT_FOUND")}};
            it->second.cancelled = true;
            return {{"status", Literal::of_string("OK")}};
        }
        if (call.api == "get_train") {
            auto it = trains_.find(want_string(args[0], "id"));
            if (it == trains_.end()) return {{"status", Literal::of_string("NOT_FOUND")}};
            const Train& t = it->second;
            return {{"status", Literal::of_string("OK")},
                    {"origin", Literal::of_string(t.origin)},
                    {"dest", Literal::of_string(t.dest)},
                    {"dep_min", Literal::of_int(t.dep_min)},
                    {"arr_min", Literal::of_int(t.arr_min)}};
        }
        if (call.api == "query_connection") {
            std::string origin = want_string(args[0], "origin");
            std::string dest = want_string(args[1], "dest");
            std::int64_t count = 0;
            std::int64_t earliest_dep = 0;
            std::int64_t latest_arr = 0;
            for (const auto& [id, t] : trains_) {
                if (t.cancelled || t.origin != origin || t.dest != dest) continue;
                if (count == 0) {
                    earliest_dep = t.dep_min;
                    latest_arr = t.arr_min;
                } else {
                    earliest_dep = std::min(earliest_dep, t.dep_min);
                    latest_arr = std::max(latest_arr, t.arr_min);
                }
                ++count;
            }
            return {{"status", Literal::of_string("OK")},
                    {"count", Literal::of_int(count)},
                    {"earliest_dep", Literal::of_int(earliest_dep)},
                    {"latest_arr", Literal::of_int(latest_arr)}};
        }
        throw RuntimeFault{"unknown API '" + call.api + "'"};
    }

    std::string want_string(const Literal& lit, const char* param)
    {
        if (lit.kind != Literal::Kind::Str)
            throw RuntimeFault{std::string("argument '") + param + "' must be a string"};
        return lit.str;
    }

    std::int64_t want_int(const Literal& lit, const char* param)
    {
        if (lit.kind != Literal::Kind::Int)
            throw RuntimeFault{std::string("argument '") + param + "' must be an integer"};
        return lit.num;
    }

    const ApiRegistry& registry_;
    std::map<std::string, Value> env_;
    std::map<std::string, Train> trains_;
};

}  // namespace

ExecutionLog execute_script(const TestScript& script, const ApiRegistry& registry, Clock& clock)
{
    Interpreter interp(registry);
    return interp.run(script, clock);
}

std::string log_to_jsonl(const ExecutionLog& log)
{
    std::string out;
    for (const LogEntry& entry : log.entries) {
        ordered_json line = ordered_json::object();
        line["block"] = entry.block;
        line["stmt"] = entry.stmt;
        line["text"] = entry.text;
        line["outcome"] = outcome_name(entry.outcome);
        line["detail"] = entry.detail;
        ordered_json values = ordered_json::object();
        for (const auto& [field, value] : entry.values) {
            switch (value.kind) {
                case Literal::Kind::Str: values[field] = value.str; break;
                case Literal::Kind::Int: values[field] = value.num; break;
                case Literal::Kind::Bool: values[field] = value.flag; break;
            }
        }
        line["values"] = std::move(values);
        out += line.dump();
        out += '\n';
    }
    return out;
}

ExecutionLog log_from_jsonl(const std::string& text)
{
    ExecutionLog log;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidArgumentError(std::string("bad log line: ") + e.what());
        }
        LogEntry entry;
        entry.block = j.value("block", "");
        entry.stmt = j.value("stmt", 0);
        entry.text = j.value("text", "");
        std::string outcome = j.value("outcome", "ok");
        entry.outcome = outcome == "assert_fail"
                            ? Outcome::AssertFail
                            : (outcome == "runtime_error" ? Outcome::RuntimeError : Outcome::Ok);
        entry.detail = j.value("detail", "");
        if (j.contains("values") && j["values"].is_object()) {
            for (auto it = j["values"].begin(); it != j["values"].end(); ++it) {
                const ordered_json& v = it.value();
                if (v.is_string())
                    entry.values.emplace_back(it.key(), Literal::of_string(v.get<std::string>()));
                else if (v.is_boolean())
                    entry.values.emplace_back(it.key(), Literal::of_bool(v.get<bool>()));
                else if (v.is_number_integer())
                    entry.values.emplace_back(it.key(), Literal::of_int(v.get<std::int64_t>()));
            }
        }
        log.entries.push_back(std::move(entry));
    }
    return log;
}

ExecutionLog LocalExecutor::execute(const std::string& script_text, const CiConfig&)
{
    // The orchestrator only hands over scripts that already parsed.
    TestScript script = parse_script(script_text);
    return execute_script(script, registry_, clock_);
}

}  // namespace specpilot
