#include "specpilot/script_dsl.hpp"

#include <cctype>
#include <optional>
#include <regex>

#include "specpilot/errors.hpp"

namespace specpilot {

namespace {

bool is_name_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_blank(std::string_view line)
{
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string trim(std::string_view s)
{
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

const std::regex kKeyPattern("[A-Z]+-[0-9]+");

struct Token {
    enum class Kind { Name, Int, Str, Punct, End };

    Kind kind = Kind::End;
    std::string text;       // Name: identifier; Punct: symbol
    std::string str_value;  // Str: unescaped content
    std::int64_t int_value = 0;
};

// Lexes one source line. '#' hands the rest of the line to the caller.
class LineLexer {
  public:
    LineLexer(std::string_view line, int line_number) : line_(line), number_(line_number) {}

    [[noreturn]] void fail(const std::string& message) const
    {
        throw ScriptParseError(number_, message);
    }

    bool at_comment()
    {
        skip_ws();
        return pos_ < line_.size() && line_[pos_] == '#';
    }

    std::string comment_text()
    {
        ++pos_;  // '#'
        return trim(line_.substr(pos_));
    }

    Token next()
    {
        if (pushed_) {
            Token t = *pushed_;
            pushed_.reset();
            return t;
        }
        return scan();
    }

    void push_back(Token t) { pushed_ = std::move(t); }

    Token expect_name(const std::string& what)
    {
        Token t = next();
        if (t.kind != Token::Kind::Name) fail("expected " + what);
        return t;
    }

    void expect_punct(const std::string& p)
    {
        Token t = next();
        if (t.kind != Token::Kind::Punct || t.text != p) fail("expected '" + p + "'");
    }

    void expect_end()
    {
        Token t = next();
        if (t.kind != Token::Kind::End) fail("unexpected trailing input");
    }

  private:
    Token scan()
    {
        skip_ws();
        if (pos_ >= line_.size()) return Token{};
        char c = line_[pos_];
        if (is_name_start(c)) {
            std::size_t start = pos_;
            while (pos_ < line_.size() && is_name_char(line_[pos_])) ++pos_;
            Token t;
            t.kind = Token::Kind::Name;
            t.text = std::string(line_.substr(start, pos_ - start));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < line_.size() &&
             std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])))) {
            std::size_t start = pos_;
            if (c == '-') ++pos_;
            while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_])))
                ++pos_;
            Token t;
            t.kind = Token::Kind::Int;
            try {
                t.int_value = std::stoll(std::string(line_.substr(start, pos_ - start)));
            } catch (const std::out_of_range&) {
                fail("integer literal out of range");
            }
            return t;
        }
        if (c == '"') {
            ++pos_;
            Token t;
            t.kind = Token::Kind::Str;
            while (pos_ < line_.size() && line_[pos_] != '"') {
                if (line_[pos_] == '\\') {
                    ++pos_;
                    if (pos_ >= line_.size()) fail("unterminated escape in string");
                    char e = line_[pos_];
                    if (e != '"' && e != '\\') fail("unsupported escape in string");
                    t.str_value += e;
                } else {
                    t.str_value += line_[pos_];
                }
                ++pos_;
            }
            if (pos_ >= line_.size()) fail("unterminated string");
            ++pos_;  // closing quote
            return t;
        }
        static const char* two_char[] = {"==", "!=", "<=", ">="};
        for (const char* op : two_char) {
            if (line_.substr(pos_, 2) == op) {
                pos_ += 2;
                Token t;
                t.kind = Token::Kind::Punct;
                t.text = op;
                return t;
            }
        }
        if (c == '(' || c == ')' || c == ',' || c == '=' || c == '.' || c == '<' || c == '>') {
            ++pos_;
            Token t;
            t.kind = Token::Kind::Punct;
            t.text = std::string(1, c);
            return t;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    void skip_ws()
    {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    std::string_view line_;
    std::size_t pos_ = 0;
    int number_;
    std::optional<Token> pushed_;
};

bool is_keyword(const std::string& name)
{
    return name == "true" || name == "false" || name == "let" || name == "call" ||
           name == "assert" || name == "script" || name == "data" || name == "setup" ||
           name == "step" || name == "teardown";
}

Literal parse_literal_token(LineLexer& lex, const Token& t)
{
    switch (t.kind) {
        case Token::Kind::Str: return Literal::of_string(t.str_value);
        case Token::Kind::Int: return Literal::of_int(t.int_value);
        case Token::Kind::Name:
            if (t.text == "true") return Literal::of_bool(true);
            if (t.text == "false") return Literal::of_bool(false);
            break;
        default: break;
    }
    lex.fail("expected literal");
}

CallExpr parse_call_tail(LineLexer& lex)
{
    // 'call' keyword already consumed
    CallExpr call;
    call.api = lex.expect_name("API name after 'call'").text;
    if (is_keyword(call.api)) lex.fail("expected API name after 'call'");
    lex.expect_punct("(");
    Token t = lex.next();
    if (t.kind == Token::Kind::Punct && t.text == ")") return call;
    for (;;) {
        if (t.kind == Token::Kind::Name && !is_keyword(t.text)) {
            call.args.push_back(CallArg::variable(t.text));
        } else {
            call.args.push_back(CallArg::literal(parse_literal_token(lex, t)));
        }
        Token sep = lex.next();
        if (sep.kind == Token::Kind::Punct && sep.text == ")") break;
        if (!(sep.kind == Token::Kind::Punct && sep.text == ",")) lex.fail("expected ',' or ')'");
        t = lex.next();
    }
    return call;
}

Operand parse_operand(LineLexer& lex)
{
    Token t = lex.next();
    if (t.kind == Token::Kind::Name && !is_keyword(t.text)) {
        Token dot = lex.next();
        if (dot.kind == Token::Kind::Punct && dot.text == ".") {
            Token field = lex.expect_name("field name after '.'");
            if (is_keyword(field.text)) lex.fail("expected field name after '.'");
            return Operand::field_access(t.text, field.text);
        }
        lex.push_back(dot);
        return Operand::variable(t.text);
    }
    return Operand::literal(parse_literal_token(lex, t));
}

std::optional<CmpOp> cmp_op_from(const std::string& text)
{
    if (text == "==") return CmpOp::Eq;
    if (text == "!=") return CmpOp::Ne;
    if (text == "<") return CmpOp::Lt;
    if (text == "<=") return CmpOp::Le;
    if (text == ">") return CmpOp::Gt;
    if (text == ">=") return CmpOp::Ge;
    return std::nullopt;
}

Statement parse_statement(LineLexer& lex)
{
    if (lex.at_comment()) return Statement::comment_line(lex.comment_text());
    Token head = lex.expect_name("statement");
    if (head.text == "let") {
        Token name = lex.expect_name("variable name after 'let'");
        if (is_keyword(name.text)) lex.fail("expected variable name after 'let'");
        lex.expect_punct("=");
        Token call_kw = lex.expect_name("'call'");
        if (call_kw.text != "call") lex.fail("expected 'call' after '='");
        Statement s = Statement::let(name.text, parse_call_tail(lex));
        lex.expect_end();
        return s;
    }
    if (head.text == "call") {
        Statement s = Statement::bare_call(parse_call_tail(lex));
        lex.expect_end();
        return s;
    }
    if (head.text == "assert") {
        Comparison cmp;
        cmp.lhs = parse_operand(lex);
        Token op = lex.next();
        std::optional<CmpOp> parsed =
            op.kind == Token::Kind::Punct ? cmp_op_from(op.text) : std::nullopt;
        if (!parsed) lex.fail("expected comparison operator");
        cmp.op = *parsed;
        cmp.rhs = parse_operand(lex);
        Statement s = Statement::assertion(cmp);
        lex.expect_end();
        return s;
    }
    lex.fail("unknown statement '" + head.text + "'");
}

const char* cmp_op_text(CmpOp op)
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

std::string render_operand(const Operand& o)
{
    switch (o.kind) {
        case Operand::Kind::Lit: return to_source(o.lit);
        case Operand::Kind::Var: return o.var;
        case Operand::Kind::Field: return o.var + "." + o.field;
    }
    return {};
}

std::string render_call(const CallExpr& call)
{
    std::string out = "call " + call.api + "(";
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i > 0) out += ", ";
        const CallArg& a = call.args[i];
        out += a.kind == CallArg::Kind::Var ? a.var : to_source(a.lit);
    }
    out += ")";
    return out;
}

// Section order within a script; steps may repeat.
enum class Phase { Start, Data, Setup, Steps, Teardown };

}  // namespace

TestScript parse_script(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    }

    TestScript script;
    Phase phase = Phase::Start;
    bool header_seen = false;
    std::vector<Statement>* current_stmts = nullptr;
    bool in_data = false;
    int block_header_line = 1;
    int current_block_size = 0;
    int last_content_line = 1;

    auto close_block = [&](int at_line) {
        if (phase != Phase::Start && current_block_size == 0)
            throw ScriptParseError(block_header_line, "block has no statements");
        (void)at_line;
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        int line_no = static_cast<int>(i) + 1;
        std::string_view line = lines[i];
        if (is_blank(line)) continue;
        last_content_line = line_no;
        bool indented = line[0] == ' ' || line[0] == '\t';

        if (!header_seen) {
            if (indented) throw ScriptParseError(line_no, "expected script header");
            LineLexer lex(line, line_no);
            Token kw = lex.next();
            if (kw.kind != Token::Kind::Name || kw.text != "script")
                throw ScriptParseError(line_no, "expected script header");
            Token key = lex.next();
            if (key.kind != Token::Kind::Str)
                lex.fail("expected quoted script key after 'script'");
            if (!std::regex_match(key.str_value, kKeyPattern))
                lex.fail("script key must match [A-Z]+-[0-9]+");
            lex.expect_end();
            script.header_key = key.str_value;
            header_seen = true;
            continue;
        }

        if (indented) {
            LineLexer lex(line, line_no);
            if (in_data) {
                if (lex.at_comment()) lex.fail("comments are not allowed in the data block");
                Token let_kw = lex.expect_name("'let'");
                if (let_kw.text != "let") lex.fail("expected 'let' binding in data block");
                Token name = lex.expect_name("binding name after 'let'");
                if (is_keyword(name.text)) lex.fail("expected binding name after 'let'");
                lex.expect_punct("=");
                Literal value = parse_literal_token(lex, lex.next());
                lex.expect_end();
                script.data.emplace_back(name.text, value);
                ++current_block_size;
                continue;
            }
            if (current_stmts == nullptr)
                throw ScriptParseError(line_no, "statement outside a block");
            current_stmts->push_back(parse_statement(lex));
            ++current_block_size;
            continue;
        }

        // Block header line.
        LineLexer lex(line, line_no);
        Token kw = lex.expect_name("block keyword");
        close_block(line_no);
        in_data = false;
        current_stmts = nullptr;
        if (kw.text == "data") {
            if (phase != Phase::Start) lex.fail("'data' must be the first block");
            lex.expect_end();
            phase = Phase::Data;
            in_data = true;
        } else if (kw.text == "setup") {
            if (phase != Phase::Start && phase != Phase::Data)
                lex.fail("'setup' must come before the steps");
            lex.expect_end();
            phase = Phase::Setup;
            current_stmts = &script.setup;
        } else if (kw.text == "step") {
            if (phase == Phase::Teardown) lex.fail("steps cannot follow teardown");
            Token num = lex.next();
            if (num.kind != Token::Kind::Int) lex.fail("expected step number");
            Token title = lex.next();
            if (title.kind != Token::Kind::Str) lex.fail("expected quoted step title");
            if (title.str_value.empty()) lex.fail("step title must not be empty");
            lex.expect_end();
            int expected = static_cast<int>(script.steps.size()) + 1;
            if (num.int_value != expected)
                lex.fail("expected step " + std::to_string(expected) + ", got " +
                         std::to_string(num.int_value));
            phase = Phase::Steps;
            StepBlock step;
            step.number = expected;
            step.title = title.str_value;
            script.steps.push_back(std::move(step));
            current_stmts = &script.steps.back().statements;
        } else if (kw.text == "teardown") {
            if (phase != Phase::Steps) lex.fail("'teardown' must follow at least one step");
            lex.expect_end();
            phase = Phase::Teardown;
            current_stmts = &script.teardown;
        } else {
            lex.fail("unknown keyword '" + kw.text + "'");
        }
        block_header_line = line_no;
        current_block_size = 0;
    }

    if (!header_seen) throw ScriptParseError(1, "expected script header");
    close_block(last_content_line);
    if (script.steps.empty())
        throw ScriptParseError(last_content_line, "script requires at least one step");
    return script;
}

std::string render_statement(const Statement& stmt)
{
    switch (stmt.kind) {
        case Statement::Kind::Let: return "let " + stmt.let_name + " = " + render_call(stmt.call);
        case Statement::Kind::Call: return render_call(stmt.call);
        case Statement::Kind::Assert:
            return "assert " + render_operand(stmt.cmp.lhs) + " " + cmp_op_text(stmt.cmp.op) + " " +
                   render_operand(stmt.cmp.rhs);
        case Statement::Kind::Comment: return "# " + stmt.comment;
    }
    return {};
}

std::string render_script(const TestScript& script)
{
    std::string out = "script " + to_source(Literal::of_string(script.header_key)) + "\n";
    if (!script.data.empty()) {
        out += "data\n";
        for (const auto& [name, value] : script.data)
            out += "  let " + name + " = " + to_source(value) + "\n";
    }
    auto emit = [&out](const std::vector<Statement>& stmts) {
        for (const Statement& s : stmts) out += "  " + render_statement(s) + "\n";
    };
    if (!script.setup.empty()) {
        out += "setup\n";
        emit(script.setup);
    }
    for (const StepBlock& step : script.steps) {
        out += "step " + std::to_string(step.number) + " " +
               to_source(Literal::of_string(step.title)) + "\n";
        emit(step.statements);
    }
    if (!script.teardown.empty()) {
        out += "teardown\n";
        emit(script.teardown);
    }
    return out;
}

namespace {

void lex_call(const CallExpr& call, std::vector<std::string>& out)
{
    out.push_back("call");
    out.push_back(call.api);
    out.push_back("(");
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i > 0) out.push_back(",");
        const CallArg& a = call.args[i];
        out.push_back(a.kind == CallArg::Kind::Var ? a.var : to_source(a.lit));
    }
    out.push_back(")");
}

void lex_operand(const Operand& o, std::vector<std::string>& out)
{
    switch (o.kind) {
        case Operand::Kind::Lit: out.push_back(to_source(o.lit)); break;
        case Operand::Kind::Var: out.push_back(o.var); break;
        case Operand::Kind::Field:
            out.push_back(o.var);
            out.push_back(".");
            out.push_back(o.field);
            break;
    }
}

void lex_statements(const std::vector<Statement>& stmts, std::vector<std::string>& out)
{
    for (const Statement& s : stmts) {
        switch (s.kind) {
            case Statement::Kind::Let:
                out.push_back("let");
                out.push_back(s.let_name);
                out.push_back("=");
                lex_call(s.call, out);
                break;
            case Statement::Kind::Call: lex_call(s.call, out); break;
            case Statement::Kind::Assert:
                out.push_back("assert");
                lex_operand(s.cmp.lhs, out);
                out.push_back(cmp_op_text(s.cmp.op));
                lex_operand(s.cmp.rhs, out);
                break;
            case Statement::Kind::Comment: break;  // stripped
        }
    }
}

}  // namespace

std::vector<SemanticBlock> semantic_blocks(const TestScript& script)
{
    std::vector<SemanticBlock> blocks;
    if (!script.data.empty()) {
        SemanticBlock b;
        b.kind = SemanticBlock::Kind::Data;
        for (const auto& [name, value] : script.data) {
            b.tokens.push_back("let");
            b.tokens.push_back(name);
            b.tokens.push_back("=");
            b.tokens.push_back(to_source(value));
        }
        blocks.push_back(std::move(b));
    }
    if (!script.setup.empty()) {
        SemanticBlock b;
        b.kind = SemanticBlock::Kind::Setup;
        lex_statements(script.setup, b.tokens);
        blocks.push_back(std::move(b));
    }
    for (const StepBlock& step : script.steps) {
        SemanticBlock b;
        b.kind = SemanticBlock::Kind::Step;
        b.step_number = step.number;
        lex_statements(step.statements, b.tokens);
        blocks.push_back(std::move(b));
    }
    if (!script.teardown.empty()) {
        SemanticBlock b;
        b.kind = SemanticBlock::Kind::Teardown;
        lex_statements(script.teardown, b.tokens);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

std::string block_kind_name(SemanticBlock::Kind kind)
{
    switch (kind) {
        case SemanticBlock::Kind::Data: return "data";
        case SemanticBlock::Kind::Setup: return "setup";
        case SemanticBlock::Kind::Step: return "step";
        case SemanticBlock::Kind::Teardown: return "teardown";
    }
    return {};
}

std::string block_label(const SemanticBlock& block)
{
    if (block.kind == SemanticBlock::Kind::Step)
        return "step " + std::to_string(block.step_number);
    return block_kind_name(block.kind);
}

std::string grammar_text()
{
    return "script   := 'script' STRING NL [data] [setup] step+ [teardown]\n"
           "data     := 'data' NL (INDENT 'let' NAME '=' literal NL)+\n"
           "setup    := 'setup' NL stmt+\n"
           "step     := 'step' INT STRING NL stmt+\n"
           "teardown := 'teardown' NL stmt+\n"
           "stmt     := INDENT ('let' NAME '=' call | call | 'assert' cmp | '#' TEXT) NL\n"
           "call     := 'call' NAME '(' [arg (',' arg)*] ')'\n"
           "arg      := literal | NAME\n"
           "cmp      := operand OP operand        OP := '=='|'!='|'<'|'<='|'>'|'>='\n"
           "operand  := literal | NAME | NAME '.' NAME\n"
           "literal  := STRING | INT | 'true' | 'false'\n";
}

}  // namespace specpilot
