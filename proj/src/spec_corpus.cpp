#include "assertgen/spec_corpus.hpp"

#include <set>

#include "assertgen/error.hpp"

namespace assertgen::corpus {

namespace {

bool is_paragraph_break(const std::string& body, std::size_t cut) {
    return cut >= 2 && body[cut - 1] == '\n' && body[cut - 2] == '\n';
}

bool is_sentence_break(const std::string& body, std::size_t cut) {
    if (cut < 2)
        return false;
    char ws = body[cut - 1];
    char punct = body[cut - 2];
    return (ws == ' ' || ws == '\n' || ws == '\t') && (punct == '.' || punct == '!' || punct == '?');
}

bool is_utf8_continuation(char c) {
    return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

// Best cut in (lo, hi].
std::size_t choose_cut(const std::string& body, std::size_t lo, std::size_t hi) {
    for (std::size_t c = hi; c > lo; --c)
        if (is_paragraph_break(body, c))
            return c;
    for (std::size_t c = hi; c > lo; --c)
        if (is_sentence_break(body, c))
            return c;
    std::size_t c = hi;
    while (c > lo + 1 && c < body.size() && is_utf8_continuation(body[c]))
        --c;
    return c;
}

// Start of the trailing sentence of [core_begin, end), if it fits the overlap budget.
std::size_t trailing_overlap(const std::string& body, std::size_t core_begin, std::size_t end,
                             std::size_t overlap_chars) {
    if (overlap_chars == 0)
        return end;
    for (std::size_t s = end - 1; s > core_begin; --s) {
        if (is_sentence_break(body, s) || is_paragraph_break(body, s))
            return end - s <= overlap_chars ? s : end;
    }
    return end;
}

} // namespace

std::string make_chunk_id(const std::string& doc_id, std::size_t ordinal) {
    return doc_id + "#" + std::to_string(ordinal);
}

std::vector<SpecChunk> ingest_document(const SpecDocument& doc, const ChunkPolicy& policy) {
    if (policy.max_chars < 200)
        fail(ErrorCode::PreconditionViolation, "max_chars must be at least 200");
    if (policy.overlap_chars >= policy.max_chars)
        fail(ErrorCode::PreconditionViolation, "overlap_chars must be below max_chars");
    if (doc.body.empty())
        fail(ErrorCode::EmptyDocument, "document '" + doc.doc_id + "' has an empty body");

    const std::string& body = doc.body;
    const std::size_t n = body.size();
    std::vector<SpecChunk> chunks;
    std::size_t core = 0;
    std::size_t span_begin = 0;
    while (core < n) {
        const std::size_t budget = policy.max_chars - (core - span_begin);
        const std::size_t limit = std::min(n, core + budget);
        const std::size_t end = limit == n ? n : choose_cut(body, core, limit);

        SpecChunk c;
        c.doc_id = doc.doc_id;
        c.ordinal = chunks.size();
        c.chunk_id = make_chunk_id(doc.doc_id, c.ordinal);
        c.char_span = {span_begin, end};
        c.core_begin = core;
        c.text = body.substr(span_begin, end - span_begin);
        chunks.push_back(std::move(c));

        span_begin = end == n ? n : trailing_overlap(body, core, end, policy.overlap_chars);
        core = end;
    }
    return chunks;
}

ChunkStore::ChunkStore(std::vector<SpecDocument> documents, ChunkPolicy policy)
    : documents_(std::move(documents)), policy_(policy) {
    std::set<std::string> ids;
    for (const auto& doc : documents_) {
        if (!ids.insert(doc.doc_id).second)
            fail(ErrorCode::PreconditionViolation, "duplicate doc_id '" + doc.doc_id + "'");
        for (auto& chunk : ingest_document(doc, policy_)) {
            by_id_[chunk.chunk_id] = chunks_.size();
            chunks_.push_back(std::move(chunk));
        }
    }
}

const SpecChunk& ChunkStore::get_chunk(const std::string& chunk_id) const {
    auto it = by_id_.find(chunk_id);
    if (it == by_id_.end())
        fail(ErrorCode::UnknownChunk, "unknown chunk '" + chunk_id + "'");
    return chunks_[it->second];
}

Json chunk_to_json(const SpecChunk& chunk) {
    return Json{
        {"chunk_id", chunk.chunk_id},
        {"ordinal", chunk.ordinal},
        {"char_span", Json::array({chunk.char_span.begin, chunk.char_span.end})},
        {"core_begin", chunk.core_begin},
        {"text", chunk.text},
    };
}

void ChunkStore::save(const std::filesystem::path& dir) const {
    Json docs = Json::array();
    for (const auto& doc : documents_) {
        docs.push_back({{"doc_id", doc.doc_id}, {"title", doc.title}, {"file", doc.doc_id + ".json"}});
        Json chunks = Json::array();
        for (const auto& c : chunks_)
            if (c.doc_id == doc.doc_id)
                chunks.push_back(chunk_to_json(c));
        write_json_file(dir / (doc.doc_id + ".json"),
                        Json{{"doc_id", doc.doc_id}, {"title", doc.title}, {"body", doc.body},
                             {"chunks", chunks}});
    }
    write_json_file(dir / "manifest.json",
                    Json{{"documents", docs},
                         {"policy", {{"max_chars", policy_.max_chars},
                                     {"overlap_chars", policy_.overlap_chars}}}});
}

ChunkStore ChunkStore::load(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir / "manifest.json"))
        fail(ErrorCode::MissingUpstreamArtifact, "no corpus manifest in " + dir.string());
    auto manifest = read_json_file(dir / "manifest.json");
    ChunkPolicy policy;
    policy.max_chars = manifest.at("policy").at("max_chars").get<std::size_t>();
    policy.overlap_chars = manifest.at("policy").at("overlap_chars").get<std::size_t>();
    std::vector<SpecDocument> docs;
    for (const auto& d : manifest.at("documents")) {
        auto j = read_json_file(dir / d.at("file").get<std::string>());
        docs.push_back({j.at("doc_id").get<std::string>(), j.at("title").get<std::string>(),
                        j.at("body").get<std::string>()});
    }
    // Chunking is deterministic, so re-ingesting reproduces the stored chunks.
    ChunkStore store(std::move(docs), policy);
    for (const auto& d : manifest.at("documents")) {
        auto j = read_json_file(dir / d.at("file").get<std::string>());
        for (const auto& c : j.at("chunks")) {
            const auto& stored = store.get_chunk(c.at("chunk_id").get<std::string>());
            if (stored.text != c.at("text").get<std::string>())
                fail(ErrorCode::IoError, "corpus chunk " + stored.chunk_id + " is stale");
        }
    }
    return store;
}

} // namespace assertgen::corpus
