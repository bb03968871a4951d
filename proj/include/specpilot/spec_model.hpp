#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specpilot/literal.hpp"

namespace specpilot {

/// Pre-rated input clarity. An input annotation, never computed here.
/// A = clear & complete, B = minor gaps, C = vague expectations,
/// D = unclear or mixed actions.
enum class Clarity { A, B, C, D };

char clarity_letter(Clarity c);
Clarity clarity_from_letter(char letter);  // throws SpecParseError (InvalidClarity)

struct CiConfig {
    std::string job;
    std::int64_t timeout_s = 60;

    bool operator==(const CiConfig&) const = default;
};

struct SpecStep {
    int index = 0;
    std::string action;
    std::string expected;  // may be empty

    bool operator==(const SpecStep&) const = default;
};

struct SpecDocument {
    std::string key;  // matches [A-Z]+-[0-9]+
    std::string summary;
    std::string functional_area;
    std::int64_t story_points = 0;
    Clarity clarity = Clarity::A;
    CiConfig ci_config;
    std::vector<std::pair<std::string, Literal>> test_data;  // ordered, unique names
    std::vector<SpecStep> steps;                             // indices exactly 1..n
    std::string extra_json;  // unknown top-level keys, serialized; round-tripped

    bool operator==(const SpecDocument&) const = default;
};

struct ValidationFinding {
    enum class Level { Warning, Error };

    Level level = Level::Warning;
    std::string code;
    std::string message;
    std::string location;  // field path, e.g. "steps[2].expected"

    bool operator==(const ValidationFinding&) const = default;
};

/// Parses one Xray-style JSON export. Unknown top-level keys are
/// preserved and survive a serialize/parse round-trip. Throws
/// SpecParseError.
SpecDocument parse_spec(const std::string& json_text);

/// Canonical JSON rendering; parse_spec(serialize_spec(d)) == d.
std::string serialize_spec(const SpecDocument& doc);

/// Deterministic findings ordered by field path then code. Error-level
/// findings bar the document from the pipeline.
std::vector<ValidationFinding> validate_spec(const SpecDocument& doc);

bool has_errors(const std::vector<ValidationFinding>& findings);

struct SkippedFile {
    std::string file;    // filename within the folder
    std::string reason;

    bool operator==(const SkippedFile&) const = default;
};

struct BatchLoad {
    std::vector<SpecDocument> docs;  // sorted by key
    std::vector<SkippedFile> skipped;
};

/// Attempts every *.json file in the folder; a bad file never aborts the
/// batch. Throws InputFolderError when the folder is missing/unreadable.
BatchLoad load_spec_batch(const std::filesystem::path& folder);

}  // namespace specpilot
