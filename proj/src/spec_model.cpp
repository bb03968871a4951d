#include "specpilot/spec_model.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "specpilot/errors.hpp"

namespace specpilot {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::regex kKeyPattern("[A-Z]+-[0-9]+");
const std::regex kDataNamePattern("[a-z][a-z0-9_]*");

const char* kKnownKeys[] = {"key",     "summary",   "functional_area", "story_points",
                            "clarity", "ci_config", "test_data",       "steps"};

bool is_known_key(const std::string& k)
{
    for (const char* known : kKnownKeys)
        if (k == known) return true;
    return false;
}

const ordered_json& require(const ordered_json& obj, const char* name)
{
    auto it = obj.find(name);
    if (it == obj.end())
        throw SpecParseError(SpecParseError::Kind::MissingField,
                             std::string("missing required field '") + name + "'", name);
    return *it;
}

std::string require_string(const ordered_json& obj, const std::string& path, const char* name)
{
    const ordered_json& v = require(obj, name);
    if (!v.is_string())
        throw SpecParseError(SpecParseError::Kind::InvalidField,
                             "field '" + path + name + "' must be a string", path + name);
    return v.get<std::string>();
}

std::int64_t require_int(const ordered_json& obj, const std::string& path, const char* name)
{
    const ordered_json& v = require(obj, name);
    if (!v.is_number_integer())
        throw SpecParseError(SpecParseError::Kind::InvalidField,
                             "field '" + path + name + "' must be an integer", path + name);
    return v.get<std::int64_t>();
}

Literal literal_from_json(const ordered_json& v, const std::string& path)
{
    if (v.is_string()) return Literal::of_string(v.get<std::string>());
    if (v.is_boolean()) return Literal::of_bool(v.get<bool>());
    if (v.is_number_integer()) return Literal::of_int(v.get<std::int64_t>());
    throw SpecParseError(SpecParseError::Kind::InvalidField,
                         "field '" + path + "' must be a string, integer, or boolean", path);
}

ordered_json literal_to_json(const Literal& lit)
{
    switch (lit.kind) {
        case Literal::Kind::Str: return lit.str;
        case Literal::Kind::Int: return lit.num;
        case Literal::Kind::Bool: return lit.flag;
    }
    return nullptr;
}

std::string trim_copy(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

char clarity_letter(Clarity c)
{
    switch (c) {
        case Clarity::A: return 'A';
        case Clarity::B: return 'B';
        case Clarity::C: return 'C';
        case Clarity::D: return 'D';
    }
    return '?';
}

Clarity clarity_from_letter(char letter)
{
    switch (letter) {
        case 'A': return Clarity::A;
        case 'B': return Clarity::B;
        case 'C': return Clarity::C;
        case 'D': return Clarity::D;
        default:
            throw SpecParseError(SpecParseError::Kind::InvalidClarity,
                                 std::string("clarity must be one of A, B, C, D; got '") + letter +
                                     "'",
                                 "clarity");
    }
}

SpecDocument parse_spec(const std::string& json_text)
{
    ordered_json root;
    try {
        root = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecParseError(SpecParseError::Kind::Syntax, e.what(), {}, e.byte);
    }
    if (!root.is_object())
        throw SpecParseError(SpecParseError::Kind::Syntax, "document must be a JSON object");

    SpecDocument doc;
    doc.key = require_string(root, "", "key");
    doc.summary = require_string(root, "", "summary");
    doc.functional_area = require_string(root, "", "functional_area");
    doc.story_points = require_int(root, "", "story_points");

    std::string clarity = require_string(root, "", "clarity");
    if (clarity.size() != 1)
        throw SpecParseError(SpecParseError::Kind::InvalidClarity,
                             "clarity must be one of A, B, C, D; got '" + clarity + "'", "clarity");
    doc.clarity = clarity_from_letter(clarity[0]);

    const ordered_json& ci = require(root, "ci_config");
    if (!ci.is_object())
        throw SpecParseError(SpecParseError::Kind::InvalidField, "field 'ci_config' must be an object",
                             "ci_config");
    doc.ci_config.job = require_string(ci, "ci_config.", "job");
    doc.ci_config.timeout_s = require_int(ci, "ci_config.", "timeout_s");

    const ordered_json& data = require(root, "test_data");
    if (!data.is_object())
        throw SpecParseError(SpecParseError::Kind::InvalidField, "field 'test_data' must be an object",
                             "test_data");
    for (auto it = data.begin(); it != data.end(); ++it)
        doc.test_data.emplace_back(it.key(), literal_from_json(it.value(), "test_data." + it.key()));

    const ordered_json& steps = require(root, "steps");
    if (!steps.is_array())
        throw SpecParseError(SpecParseError::Kind::InvalidField, "field 'steps' must be an array",
                             "steps");
    if (steps.empty())
        throw SpecParseError(SpecParseError::Kind::BadStepIndices, "steps must not be empty",
                             "steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const ordered_json& s = steps[i];
        std::string path = "steps[" + std::to_string(i) + "].";
        if (!s.is_object())
            throw SpecParseError(SpecParseError::Kind::InvalidField,
                                 "field '" + path.substr(0, path.size() - 1) + "' must be an object",
                                 path.substr(0, path.size() - 1));
        SpecStep step;
        step.index = static_cast<int>(require_int(s, path, "index"));
        step.action = require_string(s, path, "action");
        if (s.contains("expected")) step.expected = require_string(s, path, "expected");
        if (step.index != static_cast<int>(i) + 1)
            throw SpecParseError(SpecParseError::Kind::BadStepIndices,
                                 "step indices must be exactly 1..n in order; position " +
                                     std::to_string(i + 1) + " has index " +
                                     std::to_string(step.index),
                                 path + "index");
        doc.steps.push_back(std::move(step));
    }

    ordered_json extra = ordered_json::object();
    for (auto it = root.begin(); it != root.end(); ++it)
        if (!is_known_key(it.key())) extra[it.key()] = it.value();
    if (!extra.empty()) doc.extra_json = extra.dump();

    return doc;
}

std::string serialize_spec(const SpecDocument& doc)
{
    ordered_json root = ordered_json::object();
    root["key"] = doc.key;
    root["summary"] = doc.summary;
    root["functional_area"] = doc.functional_area;
    root["story_points"] = doc.story_points;
    root["clarity"] = std::string(1, clarity_letter(doc.clarity));
    root["ci_config"] = {{"job", doc.ci_config.job}, {"timeout_s", doc.ci_config.timeout_s}};
    ordered_json data = ordered_json::object();
    for (const auto& [name, value] : doc.test_data) data[name] = literal_to_json(value);
    root["test_data"] = std::move(data);
    ordered_json steps = ordered_json::array();
    for (const SpecStep& s : doc.steps)
        steps.push_back({{"index", s.index}, {"action", s.action}, {"expected", s.expected}});
    root["steps"] = std::move(steps);
    if (!doc.extra_json.empty()) {
        ordered_json extra = ordered_json::parse(doc.extra_json);
        for (auto it = extra.begin(); it != extra.end(); ++it) root[it.key()] = it.value();
    }
    return root.dump(2) + "\n";
}

std::vector<ValidationFinding> validate_spec(const SpecDocument& doc)
{
    std::vector<ValidationFinding> findings;
    auto add = [&findings](ValidationFinding::Level level, std::string code, std::string location,
                           std::string message) {
        findings.push_back({level, std::move(code), std::move(message), std::move(location)});
    };

    if (!std::regex_match(doc.key, kKeyPattern))
        add(ValidationFinding::Level::Error, "E-KEY-PATTERN", "key",
            "key '" + doc.key + "' does not match [A-Z]+-[0-9]+");
    if (doc.story_points < 3 || doc.story_points > 8)
        add(ValidationFinding::Level::Warning, "W-SP-RANGE", "story_points",
            "story points " + std::to_string(doc.story_points) + " outside the nominal range 3-8");
    if (doc.ci_config.timeout_s < 1)
        add(ValidationFinding::Level::Error, "E-CI-TIMEOUT", "ci_config.timeout_s",
            "timeout_s must be at least 1");
    for (const auto& [name, value] : doc.test_data) {
        (void)value;
        if (!std::regex_match(name, kDataNamePattern))
            add(ValidationFinding::Level::Error, "E-DATA-NAME", "test_data." + name,
                "test data name '" + name + "' does not match [a-z][a-z0-9_]*");
    }
    for (std::size_t i = 0; i < doc.steps.size(); ++i) {
        const SpecStep& s = doc.steps[i];
        std::string path = "steps[" + std::to_string(i) + "]";
        if (trim_copy(s.action).empty())
            add(ValidationFinding::Level::Error, "E-EMPTY-ACTION", path + ".action",
                "step action must not be empty");
        if (trim_copy(s.expected).empty())
            add(ValidationFinding::Level::Warning, "W-NO-EXPECTED", path + ".expected",
                "step has no expected result");
    }

    std::stable_sort(findings.begin(), findings.end(),
                     [](const ValidationFinding& a, const ValidationFinding& b) {
                         if (a.location != b.location) return a.location < b.location;
                         return a.code < b.code;
                     });
    return findings;
}

bool has_errors(const std::vector<ValidationFinding>& findings)
{
    return std::any_of(findings.begin(), findings.end(), [](const ValidationFinding& f) {
        return f.level == ValidationFinding::Level::Error;
    });
}

BatchLoad load_spec_batch(const std::filesystem::path& folder)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(folder, ec) || ec)
        throw InputFolderError("input folder '" + folder.string() + "' is missing or unreadable");

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(folder)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    BatchLoad out;
    std::set<std::string> seen_keys;
    for (const auto& path : files) {
        std::string name = path.filename().string();
        if (path.extension() != ".json") {
            out.skipped.push_back({name, "not a .json file"});
            continue;
        }
        std::string text;
        {
            std::ifstream in(path, std::ios::binary);
            if (!in) {
                out.skipped.push_back({name, "unreadable"});
                continue;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        try {
            SpecDocument doc = parse_spec(text);
            if (!seen_keys.insert(doc.key).second) {
                out.skipped.push_back({name, "duplicate key '" + doc.key + "'"});
                continue;
            }
            out.docs.push_back(std::move(doc));
        } catch (const SpecParseError& e) {
            out.skipped.push_back({name, e.what()});
        }
    }
    std::sort(out.docs.begin(), out.docs.end(),
              [](const SpecDocument& a, const SpecDocument& b) { return a.key < b.key; });
    return out;
}

}  // namespace specpilot
