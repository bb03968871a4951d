#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specpilot {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised by parse_spec. `kind` identifies the failure class; `position`
/// is the byte offset for Syntax errors, `field` the offending field
/// otherwise.
class SpecParseError : public Error {
  public:
    enum class Kind { Syntax, MissingField, InvalidField, InvalidClarity, BadStepIndices };

    SpecParseError(Kind k, std::string message, std::string field = {}, std::size_t position = 0)
        : Error(std::move(message)), kind(k), field(std::move(field)), position(position)
    {}

    Kind kind;
    std::string field;
    std::size_t position;
};

/// Raised by parse_script with a 1-based source line.
class ScriptParseError : public Error {
  public:
    ScriptParseError(int line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line(line)
    {}

    int line;
};

class InputFolderError : public Error {
  public:
    using Error::Error;
};

class DuplicateKeyError : public Error {
  public:
    using Error::Error;
};

class DocNotFoundError : public Error {
  public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
  public:
    using Error::Error;
};

class ArtifactNotFoundError : public Error {
  public:
    using Error::Error;
};

class AlreadyDecidedError : public Error {
  public:
    using Error::Error;
};

class EmptySuiteError : public Error {
  public:
    using Error::Error;
};

/// Remote backend or executor failed to deliver a response.
class TransportError : public Error {
  public:
    using Error::Error;
};

}  // namespace specpilot
