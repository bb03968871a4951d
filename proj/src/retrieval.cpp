#include "specpilot/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "specpilot/errors.hpp"
#include "specpilot/script_dsl.hpp"

namespace specpilot {

namespace {

constexpr double kK1 = 1.2;
constexpr double kB = 0.75;

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(current);
        current.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> indexable_tokens(const SpecDocument& spec)
{
    std::string text = spec.summary;
    for (const SpecStep& s : spec.steps) {
        text += ' ';
        text += s.action;
    }
    for (const SpecStep& s : spec.steps) {
        text += ' ';
        text += s.expected;
    }
    return tokenize(text);
}

CorpusIndex CorpusIndex::build(std::vector<HistoricalPair> pairs)
{
    std::sort(pairs.begin(), pairs.end(), [](const HistoricalPair& a, const HistoricalPair& b) {
        return a.spec.key < b.spec.key;
    });
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        if (pairs[i].spec.key == pairs[i - 1].spec.key)
            throw DuplicateKeyError("duplicate spec key '" + pairs[i].spec.key + "' in corpus");
    }

    CorpusIndex index;
    std::size_t total_length = 0;
    for (HistoricalPair& pair : pairs) {
        Doc doc;
        for (std::string& token : indexable_tokens(pair.spec)) ++doc.term_counts[std::move(token)];
        for (const auto& [token, count] : doc.term_counts) doc.length += count;
        total_length += doc.length;
        for (const auto& [token, count] : doc.term_counts) ++index.doc_frequency_[token];
        doc.pair = std::move(pair);
        index.docs_.push_back(std::move(doc));
    }
    index.avgdl_ = index.docs_.empty()
                       ? 0.0
                       : static_cast<double>(total_length) / static_cast<double>(index.docs_.size());
    return index;
}

std::size_t CorpusIndex::doc_length(std::size_t doc_id) const
{
    if (doc_id >= docs_.size())
        throw DocNotFoundError("document " + std::to_string(doc_id) + " not in index");
    return docs_[doc_id].length;
}

std::size_t CorpusIndex::doc_frequency(const std::string& token) const
{
    auto it = doc_frequency_.find(token);
    return it == doc_frequency_.end() ? 0 : it->second;
}

const HistoricalPair& CorpusIndex::pair(std::size_t doc_id) const
{
    if (doc_id >= docs_.size())
        throw DocNotFoundError("document " + std::to_string(doc_id) + " not in index");
    return docs_[doc_id].pair;
}

double CorpusIndex::bm25_score(const std::vector<std::string>& query_tokens,
                               std::size_t doc_id) const
{
    if (doc_id >= docs_.size())
        throw DocNotFoundError("document " + std::to_string(doc_id) + " not in index");
    const Doc& doc = docs_[doc_id];
    const double n = static_cast<double>(docs_.size());
    double score = 0.0;
    for (const std::string& token : query_tokens) {
        auto it = doc.term_counts.find(token);
        if (it == doc.term_counts.end()) continue;
        const double tf = static_cast<double>(it->second);
        const double df = static_cast<double>(doc_frequency(token));
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        const double dl = static_cast<double>(doc.length);
        score += idf * tf * (kK1 + 1.0) / (tf + kK1 * (1.0 - kB + kB * dl / avgdl_));
    }
    return score;
}

std::vector<RetrievedPair> CorpusIndex::retrieve(const SpecDocument& spec, int k) const
{
    if (k < 1) throw InvalidArgumentError("retrieve requires k >= 1");
    std::vector<std::string> query = indexable_tokens(spec);
    if (query.empty() || docs_.empty()) return {};

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) scored.emplace_back(bm25_score(query, i), i);
    std::sort(scored.begin(), scored.end(), [this](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return docs_[a.second].pair.spec.key < docs_[b.second].pair.spec.key;
    });

    std::vector<RetrievedPair> out;
    for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(k); ++i)
        out.push_back({docs_[scored[i].second].pair, scored[i].first});
    return out;
}

CorpusLoad load_corpus_dir(const std::filesystem::path& folder)
{
    CorpusLoad out;
    std::error_code ec;
    if (!std::filesystem::is_directory(folder, ec) || ec) return out;

    std::vector<std::filesystem::path> spec_files;
    for (const auto& entry : std::filesystem::directory_iterator(folder)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            spec_files.push_back(entry.path());
    }
    std::sort(spec_files.begin(), spec_files.end());

    for (const auto& spec_path : spec_files) {
        std::string name = spec_path.filename().string();
        std::filesystem::path script_path = spec_path;
        script_path.replace_extension(".ats");
        if (!std::filesystem::exists(script_path)) {
            out.skipped.push_back({name, "no matching .ats script"});
            continue;
        }
        HistoricalPair pair;
        try {
            pair.spec = parse_spec(read_file(spec_path));
        } catch (const SpecParseError& e) {
            out.skipped.push_back({name, e.what()});
            continue;
        }
        pair.script_text = read_file(script_path);
        try {
            parse_script(pair.script_text);
        } catch (const ScriptParseError& e) {
            out.skipped.push_back({script_path.filename().string(), e.what()});
            continue;
        }
        std::filesystem::path meta_path = spec_path;
        meta_path.replace_extension(".meta");
        if (std::filesystem::exists(meta_path)) {
            std::string tag = read_file(meta_path);
            while (!tag.empty() && (tag.back() == '\n' || tag.back() == '\r' || tag.back() == ' '))
                tag.pop_back();
            if (tag == "refactored")
                pair.outcome_tag = HistoricalPair::Outcome::Refactored;
            else if (!tag.empty() && tag != "accepted") {
                out.skipped.push_back({meta_path.filename().string(),
                                       "unknown outcome tag '" + tag + "'"});
                continue;
            }
        }
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

void write_corpus_dir(const std::filesystem::path& folder,
                      const std::vector<HistoricalPair>& pairs)
{
    std::filesystem::create_directories(folder);
    for (const HistoricalPair& pair : pairs) {
        const std::string& key = pair.spec.key;
        {
            std::ofstream out(folder / (key + ".json"), std::ios::binary);
            out << serialize_spec(pair.spec);
        }
        {
            std::ofstream out(folder / (key + ".ats"), std::ios::binary);
            out << pair.script_text;
        }
        {
            std::ofstream out(folder / (key + ".meta"), std::ios::binary);
            out << (pair.outcome_tag == HistoricalPair::Outcome::Refactored ? "refactored"
                                                                            : "accepted")
                << "\n";
        }
    }
}

}  // namespace specpilot
