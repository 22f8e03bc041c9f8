#include "assertgen/retriever.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "assertgen/error.hpp"

namespace assertgen::retrieval {

namespace {
constexpr std::string_view kTemplatePrefix = "What is the description of ";
constexpr std::string_view kTemplateSuffix = "?";

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
} // namespace

Query make_query(std::string_view signal) {
    auto s = trim(signal);
    if (s.empty())
        fail(ErrorCode::EmptySignal, "query signal is empty");
    std::string text = std::string(kTemplatePrefix) + s + std::string(kTemplateSuffix);
    return Query(std::move(s), std::move(text));
}

bool satisfies_template(const Query& query) {
    return !query.target_signal().empty() &&
           query.text() == std::string(kTemplatePrefix) + query.target_signal() +
                               std::string(kTemplateSuffix);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (is_token_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

Index build_index(std::vector<corpus::SpecChunk> chunks, Bm25Params params) {
    if (chunks.empty())
        fail(ErrorCode::EmptyCorpus, "cannot index an empty chunk collection");
    Index idx;
    idx.params_ = params;
    idx.chunks_ = std::move(chunks);
    std::size_t total = 0;
    for (std::size_t i = 0; i < idx.chunks_.size(); ++i) {
        auto toks = tokenize(idx.chunks_[i].text);
        idx.lengths_.push_back(toks.size());
        total += toks.size();
        for (auto& t : toks)
            ++idx.postings_[t][i];
    }
    idx.avgdl_ = static_cast<double>(total) / static_cast<double>(idx.chunks_.size());
    return idx;
}

std::size_t Index::document_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

double Index::score(std::size_t chunk_index, const std::vector<std::string>& terms) const {
    const double n = static_cast<double>(chunks_.size());
    const double dl = static_cast<double>(lengths_[chunk_index]);
    double s = 0.0;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end())
            continue;
        auto tf_it = it->second.find(chunk_index);
        if (tf_it == it->second.end())
            continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        const double tf = static_cast<double>(tf_it->second);
        const double norm = avgdl_ > 0.0 ? dl / avgdl_ : 0.0;
        s += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * (1.0 - params_.b + params_.b * norm));
    }
    return s;
}

Json Index::dump() const {
    Json terms = Json::object();
    for (const auto& [term, posting] : postings_) {
        Json list = Json::array();
        for (const auto& [i, tf] : posting)
            list.push_back(Json::array({chunks_[i].chunk_id, tf}));
        terms[term] = std::move(list);
    }
    return Json{{"k1", params_.k1}, {"b", params_.b}, {"avgdl", avgdl_},
                {"chunks", chunks_.size()}, {"postings", std::move(terms)}};
}

std::vector<RankedChunk> retrieve(const Index& index, const Query& query, std::size_t k) {
    if (k == 0)
        fail(ErrorCode::PreconditionViolation, "k must be at least 1");
    if (!satisfies_template(query))
        fail(ErrorCode::PreconditionViolation, "query text does not follow the template");

    // Repeated tokens in the signal name count once.
    auto toks = tokenize(query.target_signal());
    std::set<std::string> uniq(toks.begin(), toks.end());
    std::vector<std::string> terms(uniq.begin(), uniq.end());

    std::vector<RankedChunk> out;
    for (std::size_t i = 0; i < index.chunks().size(); ++i) {
        double s = index.score(i, terms);
        if (s > 0.0)
            out.push_back({index.chunks()[i], s});
    }
    std::sort(out.begin(), out.end(), [](const RankedChunk& a, const RankedChunk& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.chunk.chunk_id < b.chunk.chunk_id;
    });
    if (out.size() > k)
        out.resize(k);
    return out;
}

} // namespace assertgen::retrieval
