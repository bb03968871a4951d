#pragma once

#include <cstdint>
#include <string>

namespace specpilot {

/// Scalar value shared by spec test data and the script language:
/// a string, a 64-bit integer, or a boolean.
struct Literal {
    enum class Kind { Str, Int, Bool };

    Kind kind = Kind::Int;
    std::string str;
    std::int64_t num = 0;
    bool flag = false;

    static Literal of_string(std::string s)
    {
        Literal l;
        l.kind = Kind::Str;
        l.str = std::move(s);
        return l;
    }

    static Literal of_int(std::int64_t n)
    {
        Literal l;
        l.kind = Kind::Int;
        l.num = n;
        return l;
    }

    static Literal of_bool(bool b)
    {
        Literal l;
        l.kind = Kind::Bool;
        l.flag = b;
        return l;
    }

    bool operator==(const Literal&) const = default;
};

/// Renders the literal as script-language source text (strings quoted).
std::string to_source(const Literal& lit);

/// Renders the literal as a bare display value (strings unquoted).
std::string to_display(const Literal& lit);

}  // namespace specpilot
