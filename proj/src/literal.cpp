#include "specpilot/literal.hpp"

namespace specpilot {

namespace {

std::string quote(const std::string& s)
{
    std::string out;
    out.reserve(s.size() + 2);
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string to_source(const Literal& lit)
{
    switch (lit.kind) {
        case Literal::Kind::Str: return quote(lit.str);
        case Literal::Kind::Int: return std::to_string(lit.num);
        case Literal::Kind::Bool: return lit.flag ? "true" : "false";
    }
    return {};
}

std::string to_display(const Literal& lit)
{
    if (lit.kind == Literal::Kind::Str) return lit.str;
    return to_source(lit);
}

}  // namespace specpilot
