#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "specpilot/spec_model.hpp"

namespace specpilot {

/// One historical specification together with the script that shipped
/// for it. script_text parses under the script grammar.
struct HistoricalPair {
    SpecDocument spec;
    std::string script_text;
    enum class Outcome { Accepted, Refactored } outcome_tag = Outcome::Accepted;
};

struct RetrievedPair {
    HistoricalPair pair;
    double score = 0.0;
};

/// Lowercases, splits on every non-alphanumeric character, and drops
/// tokens shorter than 2 characters. Order preserved.
std::vector<std::string> tokenize(std::string_view text);

/// The document text a pair is indexed under: summary, then every step
/// action, then every step expected. Script bodies are not indexed.
std::vector<std::string> indexable_tokens(const SpecDocument& spec);

/// Okapi BM25 index over historical pairs (k1 = 1.2, b = 0.75,
/// idf = ln((N - df + 0.5) / (df + 0.5) + 1)). Immutable after build;
/// documents ordered by spec key.
class CorpusIndex {
  public:
    /// Throws DuplicateKeyError when two pairs share a spec key.
    static CorpusIndex build(std::vector<HistoricalPair> pairs);

    std::size_t size() const { return docs_.size(); }
    double avgdl() const { return avgdl_; }
    std::size_t doc_length(std::size_t doc_id) const;
    std::size_t doc_frequency(const std::string& token) const;
    const HistoricalPair& pair(std::size_t doc_id) const;

    /// Throws DocNotFoundError for an out-of-range doc id.
    double bm25_score(const std::vector<std::string>& query_tokens, std::size_t doc_id) const;

    /// Top-k by score descending, ties by ascending spec key. Empty
    /// query retrieves nothing.
    std::vector<RetrievedPair> retrieve(const SpecDocument& spec, int k = 3) const;

  private:
    struct Doc {
        HistoricalPair pair;
        std::map<std::string, std::size_t> term_counts;
        std::size_t length = 0;
    };

    std::vector<Doc> docs_;
    std::map<std::string, std::size_t> doc_frequency_;
    double avgdl_ = 0.0;
};

struct CorpusLoad {
    std::vector<HistoricalPair> pairs;
    std::vector<SkippedFile> skipped;
};

/// Reads `<KEY>.json` + `<KEY>.ats` (+ optional `<KEY>.meta`) triples.
/// A missing folder yields an empty corpus.
CorpusLoad load_corpus_dir(const std::filesystem::path& folder);

/// Writes the triple files load_corpus_dir reads.
void write_corpus_dir(const std::filesystem::path& folder,
                      const std::vector<HistoricalPair>& pairs);

}  // namespace specpilot
