#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "specpilot/literal.hpp"

namespace specpilot {

// AST of the line-oriented test-script language.
//
//   script   := 'script' STRING NL [data] [setup] step+ [teardown]
//   data     := 'data' NL (INDENT 'let' NAME '=' literal NL)+
//   setup    := 'setup' NL stmt+
//   step     := 'step' INT STRING NL stmt+
//   teardown := 'teardown' NL stmt+
//   stmt     := INDENT ('let' NAME '=' call | call | 'assert' cmp | '#' TEXT) NL
//   call     := 'call' NAME '(' [arg (',' arg)*] ')'
//   arg      := literal | NAME
//   cmp      := operand OP operand        OP := '=='|'!='|'<'|'<='|'>'|'>='
//   operand  := literal | NAME | NAME '.' NAME
//   literal  := STRING | INT | 'true' | 'false'

struct CallArg {
    enum class Kind { Lit, Var };

    Kind kind = Kind::Lit;
    Literal lit;
    std::string var;

    static CallArg literal(Literal l)
    {
        CallArg a;
        a.kind = Kind::Lit;
        a.lit = std::move(l);
        return a;
    }

    static CallArg variable(std::string name)
    {
        CallArg a;
        a.kind = Kind::Var;
        a.var = std::move(name);
        return a;
    }

    bool operator==(const CallArg&) const = default;
};

struct CallExpr {
    std::string api;
    std::vector<CallArg> args;

    bool operator==(const CallExpr&) const = default;
};

struct Operand {
    enum class Kind { Lit, Var, Field };

    Kind kind = Kind::Lit;
    Literal lit;
    std::string var;
    std::string field;  // set for Kind::Field (var.field)

    static Operand literal(Literal l)
    {
        Operand o;
        o.kind = Kind::Lit;
        o.lit = std::move(l);
        return o;
    }

    static Operand variable(std::string name)
    {
        Operand o;
        o.kind = Kind::Var;
        o.var = std::move(name);
        return o;
    }

    static Operand field_access(std::string name, std::string field)
    {
        Operand o;
        o.kind = Kind::Field;
        o.var = std::move(name);
        o.field = std::move(field);
        return o;
    }

    bool operator==(const Operand&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Comparison {
    Operand lhs;
    CmpOp op = CmpOp::Eq;
    Operand rhs;

    bool operator==(const Comparison&) const = default;
};

struct Statement {
    enum class Kind { Let, Call, Assert, Comment };

    Kind kind = Kind::Call;
    std::string let_name;  // Let
    CallExpr call;         // Let, Call
    Comparison cmp;        // Assert
    std::string comment;   // Comment; trimmed, single line

    static Statement let(std::string name, CallExpr c)
    {
        Statement s;
        s.kind = Kind::Let;
        s.let_name = std::move(name);
        s.call = std::move(c);
        return s;
    }

    static Statement bare_call(CallExpr c)
    {
        Statement s;
        s.kind = Kind::Call;
        s.call = std::move(c);
        return s;
    }

    static Statement assertion(Comparison c)
    {
        Statement s;
        s.kind = Kind::Assert;
        s.cmp = std::move(c);
        return s;
    }

    static Statement comment_line(std::string text)
    {
        Statement s;
        s.kind = Kind::Comment;
        s.comment = std::move(text);
        return s;
    }

    bool operator==(const Statement&) const = default;
};

struct StepBlock {
    int number = 0;
    std::string title;
    std::vector<Statement> statements;

    bool operator==(const StepBlock&) const = default;
};

struct TestScript {
    std::string header_key;
    std::vector<std::pair<std::string, Literal>> data;  // empty == block absent
    std::vector<Statement> setup;                       // empty == block absent
    std::vector<StepBlock> steps;
    std::vector<Statement> teardown;                    // empty == block absent

    bool operator==(const TestScript&) const = default;
};

/// Structural unit of review and diffing. Tokens are the lexemes of the
/// block's statements with comments removed; insensitive to whitespace,
/// comments, step numbers, and titles.
struct SemanticBlock {
    enum class Kind { Data, Setup, Step, Teardown };

    Kind kind = Kind::Step;
    int step_number = 0;  // meaningful for Kind::Step only
    std::vector<std::string> tokens;
};

/// Parses source text into an AST. Throws ScriptParseError with the
/// 1-based line of the first error. Comments are kept as statements.
TestScript parse_script(std::string_view text);

/// Canonical rendering: two-space indentation, one statement per line,
/// stable quoting, empty optional blocks omitted. parse(render(x)) == x.
std::string render_script(const TestScript& script);

/// Canonical single-line rendering of one statement (no indentation).
std::string render_statement(const Statement& stmt);

std::vector<SemanticBlock> semantic_blocks(const TestScript& script);

std::string block_kind_name(SemanticBlock::Kind kind);

/// Display label, e.g. "data", "setup", "step 3", "teardown".
std::string block_label(const SemanticBlock& block);

/// The EBNF sketch of the language (documentation and prompt material).
std::string grammar_text();

}  // namespace specpilot
