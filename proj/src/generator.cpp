#include "specpilot/generator.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace specpilot {

namespace {

std::string sanitize_line(const std::string& text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) out += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
    std::size_t b = out.find_first_not_of(' ');
    if (b == std::string::npos) return {};
    std::size_t e = out.find_last_not_of(' ');
    return out.substr(b, e - b + 1);
}

/// Every token of the API phrase (underscores read as spaces) must
/// occur in the action text for the API to count as mentioned.
std::optional<std::string> api_in_action(const std::string& action, const ApiRegistry& registry)
{
    std::set<std::string> action_tokens;
    for (const std::string& t : tokenize(action)) action_tokens.insert(t);

    std::optional<std::string> best;
    std::size_t best_len = 0;
    for (const std::string& name : registry.names()) {  // sorted: lexicographic tie-break
        std::vector<std::string> phrase = tokenize(name);
        bool all = !phrase.empty();
        for (const std::string& t : phrase)
            if (action_tokens.count(t) == 0) all = false;
        if (all && phrase.size() > best_len) {
            best = name;
            best_len = phrase.size();
        }
    }
    return best;
}

/// Integer and quoted-string literals in order of appearance.
std::vector<Literal> literals_in_action(const std::string& action)
{
    std::vector<Literal> out;
    std::size_t i = 0;
    while (i < action.size()) {
        char c = action[i];
        if (c == '"') {
            std::size_t end = action.find('"', i + 1);
            if (end == std::string::npos) break;
            out.push_back(Literal::of_string(action.substr(i + 1, end - i - 1)));
            i = end + 1;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            // part of a word like ICE7? only standalone numbers count
            bool word_start = i == 0 || !std::isalnum(static_cast<unsigned char>(action[i - 1]));
            std::size_t j = i;
            while (j < action.size() && std::isdigit(static_cast<unsigned char>(action[j]))) ++j;
            bool word_end = j >= action.size() || !std::isalnum(static_cast<unsigned char>(action[j]));
            if (word_start && word_end) {
                try {
                    out.push_back(Literal::of_int(std::stoll(action.substr(i, j - i))));
                } catch (const std::out_of_range&) {
                }
            }
            i = j;
            continue;
        }
        ++i;
    }
    return out;
}

StepBlock make_stub(int number, const SpecStep& spec_step,
                    const std::vector<std::pair<std::string, Literal>>& data,
                    const ApiRegistry& registry)
{
    StepBlock step;
    step.number = number;
    step.title = sanitize_line(spec_step.action);
    if (step.title.empty()) step.title = "step " + std::to_string(number);

    std::optional<std::string> api = api_in_action(spec_step.action, registry);
    if (!api) {
        step.statements.push_back(Statement::comment_line(sanitize_line(spec_step.action)));
        return step;
    }

    const ApiDef* def = registry.find(*api);
    std::vector<CallArg> pool;
    for (const auto& [name, value] : data) {
        (void)value;
        pool.push_back(CallArg::variable(name));
    }
    for (const Literal& lit : literals_in_action(spec_step.action))
        pool.push_back(CallArg::literal(lit));

    CallExpr call;
    call.api = *api;
    for (std::size_t i = 0; i < def->params.size(); ++i)
        call.args.push_back(i < pool.size() ? pool[i] : CallArg::literal(Literal::of_int(0)));

    std::string var = "r" + std::to_string(number);
    step.statements.push_back(Statement::let(var, std::move(call)));
    Comparison cmp;
    cmp.lhs = Operand::field_access(var, "status");
    cmp.op = CmpOp::Eq;
    cmp.rhs = Operand::literal(Literal::of_string("OK"));
    step.statements.push_back(Statement::assertion(cmp));
    return step;
}

std::set<std::string> referenced_variables(const TestScript& script)
{
    std::set<std::string> refs;
    auto visit_call = [&refs](const CallExpr& call) {
        for (const CallArg& a : call.args)
            if (a.kind == CallArg::Kind::Var) refs.insert(a.var);
    };
    auto visit_operand = [&refs](const Operand& o) {
        if (o.kind == Operand::Kind::Var || o.kind == Operand::Kind::Field) refs.insert(o.var);
    };
    auto visit_stmts = [&](const std::vector<Statement>& stmts) {
        for (const Statement& s : stmts) {
            switch (s.kind) {
                case Statement::Kind::Let:
                case Statement::Kind::Call: visit_call(s.call); break;
                case Statement::Kind::Assert:
                    visit_operand(s.cmp.lhs);
                    visit_operand(s.cmp.rhs);
                    break;
                case Statement::Kind::Comment: break;
            }
        }
    };
    visit_stmts(script.setup);
    for (const StepBlock& step : script.steps) visit_stmts(step.statements);
    visit_stmts(script.teardown);
    return refs;
}

}  // namespace

std::string generate_template(const GenerationRequest& request, const ApiRegistry& registry)
{
    const SpecDocument& spec = request.spec;

    if (request.retrieved.empty()) {
        TestScript skeleton;
        skeleton.header_key = spec.key;
        skeleton.data = spec.test_data;
        for (std::size_t i = 0; i < spec.steps.size(); ++i)
            skeleton.steps.push_back(
                make_stub(static_cast<int>(i) + 1, spec.steps[i], skeleton.data, registry));
        return render_script(skeleton);
    }

    TestScript base = parse_script(request.retrieved.front().pair.script_text);
    base.header_key = spec.key;

    // Bind every spec test_data entry: replace same-named copied
    // bindings in place, append the rest in spec order.
    for (const auto& [name, value] : spec.test_data) {
        auto it = std::find_if(base.data.begin(), base.data.end(),
                               [&name = name](const auto& b) { return b.first == name; });
        if (it != base.data.end())
            it->second = value;
        else
            base.data.emplace_back(name, value);
    }
    // Copied bindings with no same-named spec entry are dropped only
    // when nothing references them.
    std::set<std::string> spec_names;
    for (const auto& [name, value] : spec.test_data) {
        (void)value;
        spec_names.insert(name);
    }
    std::set<std::string> referenced = referenced_variables(base);
    std::erase_if(base.data, [&](const auto& binding) {
        return spec_names.count(binding.first) == 0 && referenced.count(binding.first) == 0;
    });

    // Align retrieved steps to spec steps by index; stub the rest;
    // retitle and renumber 1..n.
    std::vector<StepBlock> steps;
    for (std::size_t i = 0; i < spec.steps.size(); ++i) {
        if (i < base.steps.size()) {
            StepBlock step = base.steps[i];
            step.number = static_cast<int>(i) + 1;
            std::string title = sanitize_line(spec.steps[i].action);
            step.title = title.empty() ? "step " + std::to_string(i + 1) : title;
            steps.push_back(std::move(step));
        } else {
            steps.push_back(
                make_stub(static_cast<int>(i) + 1, spec.steps[i], base.data, registry));
        }
    }
    base.steps = std::move(steps);
    return render_script(base);
}

std::string assemble_prompt(const GenerationRequest& request)
{
    std::string out;
    out += "=== SPECIFICATION ===\n";
    out += serialize_spec(request.spec);
    for (std::size_t i = 0; i < request.retrieved.size(); ++i) {
        out += "=== EXAMPLE " + std::to_string(i + 1) + " ===\n";
        out += "--- SPEC ---\n";
        out += serialize_spec(request.retrieved[i].pair.spec);
        out += "--- SCRIPT ---\n";
        out += request.retrieved[i].pair.script_text;
        if (out.back() != '\n') out += '\n';
    }
    out += "=== GRAMMAR ===\n";
    out += grammar_text();
    if (!request.prior_findings.empty()) {
        out += "=== FINDINGS ===\n";
        for (const Finding& f : request.prior_findings)
            out += "- " + f.code + " @ " + f.location + ": " + f.message + "\n";
    }
    out += "=== INSTRUCTION ===\n";
    out += "Write exactly one script in the grammar above that implements the "
           "specification. Output only the script text.\n";
    return out;
}

namespace {

int levenshtein(const std::string& a, const std::string& b)
{
    std::vector<int> prev(b.size() + 1);
    std::vector<int> curr(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        curr[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

}  // namespace

std::optional<std::pair<std::string, int>> nearest_api(const std::string& name,
                                                       const ApiRegistry& registry)
{
    std::optional<std::pair<std::string, int>> best;
    for (const std::string& candidate : registry.names()) {  // sorted
        int d = levenshtein(name, candidate);
        if (!best || d < best->second) best = {candidate, d};
    }
    if (!best || best->second > 2) return std::nullopt;
    return best;
}

TestScript repair(const TestScript& script, const std::vector<Finding>& findings,
                  const ApiRegistry& registry)
{
    bool fix_apis = false;
    bool fix_asserts = false;
    bool fix_teardown = false;
    for (const Finding& f : findings) {
        if (f.code == "L4-UNKNOWN-API") fix_apis = true;
        if (f.code == "L2-NO-ASSERT") fix_asserts = true;
        if (f.code == "L3-NO-TEARDOWN") fix_teardown = true;
    }

    TestScript out = script;

    if (fix_apis) {
        auto fix_stmts = [&registry](std::vector<Statement>& stmts) {
            for (Statement& s : stmts) {
                if (s.kind != Statement::Kind::Let && s.kind != Statement::Kind::Call) continue;
                if (registry.contains(s.call.api)) continue;
                if (auto nearest = nearest_api(s.call.api, registry)) {
                    s.call.api = nearest->first;
                } else {
                    s = Statement::comment_line(render_statement(s));
                }
            }
        };
        fix_stmts(out.setup);
        for (StepBlock& step : out.steps) fix_stmts(step.statements);
        fix_stmts(out.teardown);
    }

    if (fix_asserts) {
        for (StepBlock& step : out.steps) {
            bool has_assert = std::any_of(
                step.statements.begin(), step.statements.end(),
                [](const Statement& s) { return s.kind == Statement::Kind::Assert; });
            if (has_assert) continue;
            std::string last_var;
            for (const Statement& s : step.statements)
                if (s.kind == Statement::Kind::Let) last_var = s.let_name;
            if (!last_var.empty()) {
                Comparison cmp;
                cmp.lhs = Operand::field_access(last_var, "status");
                cmp.op = CmpOp::Eq;
                cmp.rhs = Operand::literal(Literal::of_string("OK"));
                step.statements.push_back(Statement::assertion(cmp));
            } else {
                Statement gap = Statement::comment_line("no call result to assert in this step");
                if (step.statements.empty() || !(step.statements.back() == gap))
                    step.statements.push_back(std::move(gap));
            }
        }
    }

    if (fix_teardown && out.teardown.empty()) {
        CallExpr call;
        call.api = "reset_system";
        out.teardown.push_back(Statement::bare_call(std::move(call)));
    }

    return out;
}

}  // namespace specpilot
