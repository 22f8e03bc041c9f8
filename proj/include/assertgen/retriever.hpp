// Lexical BM25 retrieval over specification chunks.
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/io.hpp"
#include "assertgen/spec_corpus.hpp"

namespace assertgen::retrieval {

/// A signal-description query. Only make_query builds one, so the text always
/// follows the fixed template.
class Query {
public:
    const std::string& target_signal() const { return target_signal_; }
    const std::string& text() const { return text_; }

private:
    Query(std::string signal, std::string text)
        : target_signal_(std::move(signal)), text_(std::move(text)) {}
    std::string target_signal_;
    std::string text_;
    friend Query make_query(std::string_view signal);
};

/// "What is the description of {signal}?"; throws EmptySignal.
Query make_query(std::string_view signal);

/// True iff text equals the query template instantiated with target_signal.
bool satisfies_template(const Query& query);

/// Lowercased runs of [A-Za-z0-9_]; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct RankedChunk {
    corpus::SpecChunk chunk;
    double score = 0.0;
};

class Index {
public:
    const std::vector<corpus::SpecChunk>& chunks() const { return chunks_; }
    const Bm25Params& params() const { return params_; }
    double average_length() const { return avgdl_; }
    std::size_t document_frequency(const std::string& term) const;

    /// Score of one chunk for the given query terms.
    double score(std::size_t chunk_index, const std::vector<std::string>& terms) const;

    /// term -> [[chunk_id, tf], ...]
    Json dump() const;

private:
    friend Index build_index(std::vector<corpus::SpecChunk> chunks, Bm25Params params);

    std::vector<corpus::SpecChunk> chunks_;
    std::vector<std::size_t> lengths_;
    double avgdl_ = 0.0;
    Bm25Params params_;
    // term -> (chunk index -> term frequency)
    std::map<std::string, std::map<std::size_t, std::size_t>> postings_;
};

/// Throws EmptyCorpus.
Index build_index(std::vector<corpus::SpecChunk> chunks, Bm25Params params = {});

/// Scores chunks against the tokens of the query's target signal. Results
/// have score > 0, sorted by descending score then ascending chunk_id.
std::vector<RankedChunk> retrieve(const Index& index, const Query& query, std::size_t k = 5);

} // namespace assertgen::retrieval
