// Specification ingestion: split plain-text documents into retrievable chunks.
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "assertgen/io.hpp"

namespace assertgen::corpus {

struct SpecDocument {
    std::string doc_id;
    std::string title;
    std::string body;
};

/// Half-open byte range into a document body.
struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct SpecChunk {
    std::string chunk_id;   // "<doc_id>#<ordinal>"
    std::string doc_id;
    std::size_t ordinal = 0;
    std::string text;
    CharSpan char_span;
    /// Start of the part of this chunk not shared with its predecessor.
    std::size_t core_begin = 0;

    friend bool operator==(const SpecChunk&, const SpecChunk&) = default;
};

struct ChunkPolicy {
    std::size_t max_chars = 1200;
    /// Upper bound on the trailing sentence repeated at the head of the next chunk.
    std::size_t overlap_chars = 200;
};

std::string make_chunk_id(const std::string& doc_id, std::size_t ordinal);

/// Splits on the last paragraph break that fits, else the last sentence break,
/// else a hard cut (never inside a UTF-8 sequence). Each chunk after the first
/// repeats the trailing sentence of its predecessor when that sentence fits in
/// overlap_chars.
std::vector<SpecChunk> ingest_document(const SpecDocument& doc, const ChunkPolicy& policy = {});

/// Immutable after construction.
class ChunkStore {
public:
    ChunkStore() = default;
    ChunkStore(std::vector<SpecDocument> documents, ChunkPolicy policy);

    const SpecChunk& get_chunk(const std::string& chunk_id) const;
    bool contains(const std::string& chunk_id) const { return by_id_.contains(chunk_id); }

    /// All chunks, ordered by document then ordinal.
    const std::vector<SpecChunk>& chunks() const { return chunks_; }
    const std::vector<SpecDocument>& documents() const { return documents_; }
    const ChunkPolicy& policy() const { return policy_; }

    /// Writes manifest.json plus one <doc_id>.json per document.
    void save(const std::filesystem::path& dir) const;
    static ChunkStore load(const std::filesystem::path& dir);

private:
    std::vector<SpecDocument> documents_;
    ChunkPolicy policy_;
    std::vector<SpecChunk> chunks_;
    std::map<std::string, std::size_t> by_id_;
};

inline const SpecChunk& get_chunk(const ChunkStore& store, const std::string& chunk_id) {
    return store.get_chunk(chunk_id);
}

Json chunk_to_json(const SpecChunk& chunk);

} // namespace assertgen::corpus
