#include "assertgen/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <functional>
#include <future>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "assertgen/bridger.hpp"
#include "assertgen/chain_extractor.hpp"
#include "assertgen/entity_engine.hpp"
#include "assertgen/objective_engine.hpp"
#include "assertgen/retriever.hpp"
#include "assertgen/rtl/design.hpp"
#include "assertgen/spec_corpus.hpp"
#include "assertgen/sva_emitter.hpp"

namespace assertgen::pipeline {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

std::string where(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
}

std::size_t to_count(const std::string& v, const std::string& at) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument(v);
        auto n = std::stoull(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return static_cast<std::size_t>(n);
    }
    catch (const std::logic_error&) {
        fail(ErrorCode::ConfigError, at + ": '" + v + "' is not a non-negative integer");
    }
}

double to_real(const std::string& v, const std::string& at) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return d;
    }
    catch (const std::logic_error&) {
        fail(ErrorCode::ConfigError, at + ": '" + v + "' is not a number");
    }
}

bool to_bool(const std::string& v, const std::string& at) {
    if (v == "true" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "0")
        return false;
    fail(ErrorCode::ConfigError, at + ": '" + v + "' is not a boolean");
}

template <class T, class F>
auto parallel_map(const std::vector<T>& items, std::size_t width, F fn) {
    using R = decltype(fn(items.front()));
    std::vector<R> out;
    out.reserve(items.size());
    width = std::max<std::size_t>(1, width);
    for (std::size_t start = 0; start < items.size(); start += width) {
        std::vector<std::future<R>> batch;
        for (std::size_t i = start; i < std::min(items.size(), start + width); ++i)
            batch.push_back(std::async(std::launch::async, fn, std::cref(items[i])));
        for (auto& f : batch)
            out.push_back(f.get());
    }
    return out;
}

llm::GenerationParams generation(const RunConfig& c) {
    return {c.model_id, c.temperature, c.max_tokens};
}

Json read_artifact(const RunConfig& c, const char* name) {
    auto p = c.out_dir() / name;
    if (!fs::exists(p))
        fail(ErrorCode::MissingUpstreamArtifact, p.string() + " does not exist; run the stage that produces it first");
    return read_json_file(p);
}

rtl::RtlDesign load_design(const RunConfig& c) {
    std::vector<rtl::SourceFile> files;
    for (const auto& p : c.rtl_paths)
        files.push_back({p, read_text_file(c.resolve(p))});
    return rtl::parse_design(std::move(files), c.top_module);
}

std::vector<objective::VerificationObjective> load_objectives(const RunConfig& c) {
    std::vector<objective::VerificationObjective> out;
    const auto doc = read_artifact(c, artifacts::kObjectives);
    for (const auto& o : doc.at("objectives"))
        out.push_back(objective::objective_from_json(o));
    return out;
}

std::vector<chain::SignalChain> load_chains(const RunConfig& c) {
    std::vector<chain::SignalChain> out;
    const auto doc = read_artifact(c, artifacts::kChains);
    const auto table = chain::signal_table_from_json(doc.at("signals"));
    for (const auto& ch : doc.at("chains"))
        out.push_back(chain::chain_from_json(ch, table));
    return out;
}

std::string doc_title(const std::string& body, const std::string& fallback) {
    std::stringstream ss(body);
    std::string line;
    while (std::getline(ss, line)) {
        auto t = trim(line);
        if (t.empty())
            continue;
        if (t[0] == '#')
            return trim(t.substr(t.find_first_not_of('#')));
        break;
    }
    return fallback;
}

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

StageOutcome stage_ingest(const RunConfig& c) {
    std::vector<corpus::SpecDocument> docs;
    std::set<std::string> ids;
    for (const auto& p : c.spec_paths) {
        auto path = c.resolve(p);
        std::string id = path.stem().string();
        if (!ids.insert(id).second)
            fail(ErrorCode::ConfigError, "two specification files share the document id '" + id + "'");
        auto body = read_text_file(path);
        docs.push_back({id, doc_title(body, id), body});
    }
    corpus::ChunkStore store(std::move(docs), {c.chunk_chars, c.overlap_chars});
    auto dir = c.out_dir() / artifacts::kCorpusDir;
    fs::remove_all(dir);
    store.save(dir);
    StageOutcome out;
    out.counts = {{"documents", store.documents().size()}, {"chunks", store.chunks().size()}};
    return out;
}

StageOutcome stage_entities(const RunConfig& c, const llm::Session& session) {
    auto store = corpus::ChunkStore::load(c.out_dir() / artifacts::kCorpusDir);
    auto index = retrieval::build_index(store.chunks(), {c.k1, c.b});
    entity::ExpansionOptions opt;
    opt.max_rounds = c.max_rounds;
    opt.k = c.k;
    opt.generation = generation(c);
    auto result = entity::expand_worklist(entity::normalize_entity(c.seed_signal), index, session, opt);
    write_json_file(c.out_dir() / artifacts::kEntities, entity::to_json(result));
    StageOutcome out;
    out.counts = {{"rounds", result.rounds.size()}, {"visited", result.visited.size()},
                  {"round_limit_exceeded", result.round_limit_exceeded}};
    out.warnings = result.warnings;
    return out;
}

StageOutcome stage_objectives(const RunConfig& c, const llm::Session& session) {
    auto store = corpus::ChunkStore::load(c.out_dir() / artifacts::kCorpusDir);
    auto expansion = entity::expansion_from_json(read_artifact(c, artifacts::kEntities));
    auto design = load_design(c);
    StageOutcome out;

    std::vector<entity::EntitySets> jobs;
    for (const auto& r : expansion.rounds) {
        if (r.source_chunk_ids.empty())
            out.warnings.push_back("no chunks retrieved for '" + r.target_signal.canonical + "'; no objectives");
        else
            jobs.push_back(r);
    }
    struct Job {
        std::vector<objective::VerificationObjective> objectives;
        std::optional<std::string> warning;
    };
    objective::ObjectiveOptions opt;
    opt.context_budget = c.context_budget;
    opt.generation = generation(c);
    auto results = parallel_map(jobs, c.max_in_flight, [&](const entity::EntitySets& r) {
        std::vector<corpus::SpecChunk> chunks;
        for (const auto& id : r.source_chunk_ids)
            chunks.push_back(store.get_chunk(id));
        Job job;
        try {
            job.objectives = objective::generate_objectives(r.target_signal, chunks, session, opt);
        }
        catch (const Error& e) {
            if (e.code() != ErrorCode::NoObjectives)
                throw;
            job.warning = "'" + r.target_signal.canonical + "': " + e.what();
        }
        return job;
    });

    Json list = Json::array();
    std::size_t unresolved = 0;
    for (auto& job : results) {
        if (job.warning)
            out.warnings.push_back(*job.warning);
        for (auto& o : job.objectives) {
            try {
                o.layer_tags = objective::classify_layers(o, design);
            }
            catch (const Error& e) {
                if (e.code() != ErrorCode::UnresolvedSignals)
                    throw;
                o.resolved = false;
                ++unresolved;
                out.warnings.push_back(e.what());
            }
            list.push_back(objective::to_json(o));
        }
    }
    write_json_file(c.out_dir() / artifacts::kObjectives, Json{{"objectives", list}, {"warnings", out.warnings}});
    out.counts = {{"objectives", list.size()}, {"unresolved", unresolved}};
    return out;
}

StageOutcome stage_chains(const RunConfig& c, const llm::Session* session) {
    auto objectives = load_objectives(c);
    auto design = load_design(c);
    auto forward = rtl::build_connectivity(design);
    auto graph = c.reverse_chains ? forward.reversed() : forward;
    StageOutcome out;

    std::set<std::string> names;
    for (const auto& o : objectives)
        for (const auto& s : o.involved_signals)
            names.insert(s.canonical);

    Json chains = Json::array();
    Json checks = Json::array();
    chain::SignalTable table;
    std::size_t next_id = 1;
    for (const auto& name : names) {
        rtl::SignalLocation loc;
        try {
            loc = rtl::locate_signal(design, name);
        }
        catch (const Error& e) {
            if (e.code() != ErrorCode::SignalNotFound)
                throw;
            out.warnings.push_back(e.what());
            continue;
        }
        auto result = chain::extract_chains(graph, loc.module0, {c.max_depth, c.max_chains});
        if (result.capped)
            out.warnings.push_back("chain enumeration from '" + name + "' stopped at " +
                                   std::to_string(c.max_chains) + " chains");
        for (auto& ch : result.chains) {
            char id[16];
            std::snprintf(id, sizeof id, "c%04zu", next_id++);
            ch.chain_id = id;
            chain::collect_signals(ch, design.root_module(), table);
            chains.push_back(chain::to_json(ch, design.root_module()));
        }
        if (session) {
            Json check{{"origin", loc.module0.hierarchical_name(design.root_module())}};
            try {
                auto ch = chain::llm_chain(design, graph, loc.module0, *session, c.max_depth, generation(c));
                check["status"] = "consistent";
                chain::collect_signals(ch, design.root_module(), table);
                check["chain"] = chain::to_json(ch, design.root_module());
            }
            catch (const chain::ChainDivergenceError& e) {
                check["status"] = "divergent";
                check["message"] = e.what();
                chain::collect_signals(e.chain(), design.root_module(), table);
                check["chain"] = chain::to_json(e.chain(), design.root_module());
                out.warnings.push_back(e.what());
            }
            checks.push_back(check);
        }
    }
    Json doc{{"root_module", design.root_module()},
             {"direction", c.reverse_chains ? "reverse" : "forward"},
             {"signals", chain::to_json(table)},
             {"chains", chains},
             {"warnings", out.warnings}};
    if (session)
        doc["llm_checks"] = checks;
    write_json_file(c.out_dir() / artifacts::kChains, doc);
    out.counts = {{"origins", names.size()}, {"chains", chains.size()}};
    return out;
}

StageOutcome stage_bridge(const RunConfig& c, const llm::Session* session) {
    auto objectives = load_objectives(c);
    auto chains = load_chains(c);
    auto design = load_design(c);
    auto results = bridge::bridge(objectives, chains, design);
    StageOutcome out;
    if (session) {
        for (std::size_t i = 0; i < results.size(); ++i) {
            bridge::cross_check(results[i], objectives[i], chains, design, *session, generation(c));
            for (const auto& d : results[i].disagreements)
                out.warnings.push_back(results[i].objective_id + ": " + d);
        }
    }
    Json list = Json::array();
    std::size_t segments = 0;
    for (const auto& r : results) {
        segments += r.segments.size();
        list.push_back(bridge::to_json(r));
    }
    write_json_file(c.out_dir() / artifacts::kBridge, Json{{"results", list}});
    out.counts = {{"results", results.size()}, {"segments", segments}};
    return out;
}

StageOutcome stage_sva(const RunConfig& c, const llm::Session& session) {
    auto objectives = load_objectives(c);
    auto chains = load_chains(c);
    auto design = load_design(c);
    std::map<std::string, bridge::BridgeResult> bridged;
    const auto bridge_doc = read_artifact(c, artifacts::kBridge);
    for (const auto& r : bridge_doc.at("results")) {
        auto b = bridge::bridge_result_from_json(r);
        bridged.emplace(b.objective_id, std::move(b));
    }
    StageOutcome out;

    struct Job {
        std::vector<sva::SvaAssertion> assertions;
        std::optional<std::string> warning;
    };
    auto results = parallel_map(objectives, c.max_in_flight, [&](const objective::VerificationObjective& o) {
        std::vector<bridge::CodeSegment> segments;
        std::vector<chain::SignalChain> used;
        if (auto it = bridged.find(o.objective_id); it != bridged.end()) {
            segments = it->second.segments;
            for (const auto& ch : chains)
                if (std::find(it->second.chains_used.begin(), it->second.chains_used.end(), ch.chain_id) !=
                    it->second.chains_used.end())
                    used.push_back(ch);
        }
        auto exchange = session.complete(sva::build_sva_prompt(o, segments, used, design, generation(c), c.context_budget));
        Job job;
        try {
            job.assertions = sva::parse_sva_response(exchange.response_text, o.objective_id);
        }
        catch (const Error& e) {
            if (e.code() != ErrorCode::NoAssertionsFound)
                throw;
            job.warning = o.objective_id + ": " + e.what();
        }
        return job;
    });

    Json records = Json::array();
    Json diagnostics = Json::array();
    std::vector<sva::SvaAssertion> accepted;
    std::size_t parsed = 0;
    for (auto& job : results) {
        if (job.warning)
            out.warnings.push_back(*job.warning);
        for (auto& a : job.assertions) {
            ++parsed;
            auto diags = sva::validate_sva(a, design);
            for (const auto& d : diags)
                diagnostics.push_back(sva::to_json(d));
            bool ok = !sva::has_errors(diags);
            auto rec = sva::to_json(a);
            rec["emitted"] = ok;
            records.push_back(rec);
            if (ok)
                accepted.push_back(std::move(a));
        }
    }
    write_json_file(c.out_dir() / artifacts::kDiagnostics,
                    Json{{"assertions", records}, {"diagnostics", diagnostics}});
    auto sva_path = c.out_dir() / artifacts::kSva;
    sva::emit_file(accepted, design, sva_path, run_id(c));

    // the emitted file must read back to the same records and still validate
    auto reread = sva::parse_sva_file(read_text_file(sva_path));
    if (reread.assertions.size() != accepted.size())
        fail(ErrorCode::ValidationGate, "out.sva does not read back to the emitted assertions");
    for (const auto& a : reread.assertions)
        if (sva::has_errors(sva::validate_sva(a, design)))
            fail(ErrorCode::ValidationGate, "re-validation of emitted assertion " + a.assertion_id + " failed");

    out.counts = {{"parsed", parsed}, {"emitted", accepted.size()}, {"diagnostics", diagnostics.size()}};
    return out;
}

StageOutcome stage_mutate(const RunConfig& c) {
    auto design = load_design(c);
    auto ops = c.operators;
    if (ops.empty())
        ops.insert(mutation::all_operators().begin(), mutation::all_operators().end());
    auto result = mutation::generate_mutants(design, ops, c.mutation_seed, c.max_mutants);
    auto dir = c.out_dir() / artifacts::kMutantsDir;
    fs::remove_all(dir);
    mutation::write_mutants(result, design, dir);
    Json specs = Json::array();
    std::vector<std::string> ids;
    for (const auto& m : result.mutants) {
        specs.push_back(mutation::to_json(m.spec));
        ids.push_back(m.spec.mutant_id);
    }
    write_json_file(c.out_dir() / artifacts::kMutants,
                    Json{{"site_count", result.site_count}, {"seed", c.mutation_seed}, {"mutants", specs},
                         {"warnings", result.warnings}});
    StageOutcome out;
    out.warnings = result.warnings;
    out.counts = {{"sites", result.site_count}, {"mutants", result.mutants.size()}};

    std::optional<mutation::MetricsRecord> metrics;
    if (!c.verifier_command.empty()) {
        auto verdicts = mutation::collect_verdicts(ids, dir, {c.verifier_command, c.verifier_workers});
        metrics = mutation::compute_bdr(verdicts);
    }
    if (!c.fpv_report.empty()) {
        auto fpv = mutation::ingest_fpv_report(c.resolve(c.fpv_report));
        if (metrics) {
            fpv.bdr_percent = metrics->bdr_percent;
            fpv.detected_mutants = metrics->detected_mutants;
            fpv.total_mutants = metrics->total_mutants;
        }
        metrics = fpv;
    }
    if (metrics) {
        metrics->design_id = design.root_module();
        write_json_file(c.out_dir() / artifacts::kMetrics, mutation::to_json(*metrics));
    }
    return out;
}

} // namespace

fs::path RunConfig::resolve(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error& e) {
        fail(ErrorCode::ConfigError, std::string("config: ") + e.what());
    }
    RunConfig c;
    c.base_dir = base_dir;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, std::map<std::string, Setter>> schema{
        {"input",
         {{"spec", [&](auto& v, auto&) { c.spec_paths = split_list(v); }},
          {"rtl", [&](auto& v, auto&) { c.rtl_paths = split_list(v); }},
          {"seed_signal", [&](auto& v, auto&) { c.seed_signal = v; }},
          {"top", [&](auto& v, auto&) { if (!v.empty()) c.top_module = v; }}}},
        {"retrieval",
         {{"k", [&](auto& v, auto& at) { c.k = to_count(v, at); }},
          {"k1", [&](auto& v, auto& at) { c.k1 = to_real(v, at); }},
          {"b", [&](auto& v, auto& at) { c.b = to_real(v, at); }},
          {"chunk_chars", [&](auto& v, auto& at) { c.chunk_chars = to_count(v, at); }},
          {"overlap_chars", [&](auto& v, auto& at) { c.overlap_chars = to_count(v, at); }}}},
        {"limits",
         {{"max_rounds", [&](auto& v, auto& at) { c.max_rounds = to_count(v, at); }},
          {"max_depth", [&](auto& v, auto& at) { c.max_depth = to_count(v, at); }},
          {"max_chains", [&](auto& v, auto& at) { c.max_chains = to_count(v, at); }},
          {"max_mutants", [&](auto& v, auto& at) { c.max_mutants = to_count(v, at); }},
          {"context_budget", [&](auto& v, auto& at) { c.context_budget = to_count(v, at); }}}},
        {"llm",
         {{"mode",
           [&](auto& v, auto& at) {
               try {
                   c.mode = llm::session_mode_from_string(v);
               }
               catch (const Error&) {
                   fail(ErrorCode::ConfigError, at + ": mode must be live, record or replay");
               }
           }},
          {"fixtures", [&](auto& v, auto&) { c.fixture_path = v; }},
          {"model", [&](auto& v, auto&) { c.model_id = v; }},
          {"temperature", [&](auto& v, auto& at) { c.temperature = to_real(v, at); }},
          {"max_tokens", [&](auto& v, auto& at) { c.max_tokens = static_cast<int>(to_count(v, at)); }},
          {"max_in_flight", [&](auto& v, auto& at) { c.max_in_flight = to_count(v, at); }}}},
        {"output", {{"dir", [&](auto& v, auto&) { c.output_dir = v; }}}},
        {"chains",
         {{"reverse", [&](auto& v, auto& at) { c.reverse_chains = to_bool(v, at); }},
          {"llm_check", [&](auto& v, auto& at) { c.llm_chain_check = to_bool(v, at); }}}},
        {"bridge", {{"llm_check", [&](auto& v, auto& at) { c.llm_bridge_check = to_bool(v, at); }}}},
        {"mutation",
         {{"operators",
           [&](auto& v, auto&) {
               c.operators.clear();
               for (const auto& name : split_list(v))
                   c.operators.insert(mutation::operator_from_string(name));
           }},
          {"seed", [&](auto& v, auto& at) { c.mutation_seed = to_count(v, at); }},
          {"verifier", [&](auto& v, auto&) { c.verifier_command = v; }},
          {"workers", [&](auto& v, auto& at) { c.verifier_workers = to_count(v, at); }},
          {"fpv_report", [&](auto& v, auto&) { c.fpv_report = v; }}}},
    };
    for (const auto& [section, entries] : tree) {
        auto s = schema.find(section);
        if (s == schema.end()) {
            if (!entries.data().empty())
                fail(ErrorCode::ConfigError, "config: key '" + section + "' must be inside a section");
            fail(ErrorCode::ConfigError, "config: unknown section [" + section + "]");
        }
        for (const auto& [key, node] : entries) {
            auto k = s->second.find(key);
            if (k == s->second.end())
                fail(ErrorCode::ConfigError, "config: unknown key " + where(section, key));
            k->second(trim(node.data()), where(section, key));
        }
    }
    return c;
}

void validate_config(const RunConfig& c) {
    if (c.spec_paths.empty())
        fail(ErrorCode::ConfigError, "[input] spec lists no specification files");
    if (c.rtl_paths.empty())
        fail(ErrorCode::ConfigError, "[input] rtl lists no RTL files");
    for (const auto& p : c.spec_paths)
        if (!fs::is_regular_file(c.resolve(p)))
            fail(ErrorCode::ConfigError, "specification file not found: " + c.resolve(p).string());
    for (const auto& p : c.rtl_paths)
        if (!fs::is_regular_file(c.resolve(p)))
            fail(ErrorCode::ConfigError, "RTL file not found: " + c.resolve(p).string());
    if (trim(c.seed_signal).empty() || !entity::is_entity_identifier(trim(c.seed_signal)))
        fail(ErrorCode::ConfigError, "[input] seed_signal must be a signal name");
    if (c.k == 0 || c.max_rounds == 0 || c.max_depth == 0 || c.max_mutants == 0 || c.max_chains == 0 ||
        c.chunk_chars == 0 || c.max_in_flight == 0)
        fail(ErrorCode::ConfigError, "counts in [retrieval] and [limits] must be at least 1");
    if (c.overlap_chars >= c.chunk_chars)
        fail(ErrorCode::ConfigError, "[retrieval] overlap_chars must be below chunk_chars");
    if (c.temperature < 0.0 || c.temperature > 1.0)
        fail(ErrorCode::ConfigError, "[llm] temperature must lie in [0, 1]");
    if (c.max_tokens <= 0)
        fail(ErrorCode::ConfigError, "[llm] max_tokens must be positive");
    if (c.mode != llm::SessionMode::Live && c.fixture_path.empty())
        fail(ErrorCode::ConfigError, "[llm] fixtures is required in record and replay mode");
    if (c.mode == llm::SessionMode::Replay && !fs::is_regular_file(c.resolve(c.fixture_path)))
        fail(ErrorCode::ConfigError, "fixture file not found: " + c.resolve(c.fixture_path).string());
    if (!c.fpv_report.empty() && !fs::is_regular_file(c.resolve(c.fpv_report)))
        fail(ErrorCode::ConfigError, "FPV report not found: " + c.resolve(c.fpv_report).string());
}

RunConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path))
        fail(ErrorCode::ConfigError, "config file not found: " + path.string());
    std::string text;
    try {
        text = read_text_file(path);
    }
    catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
    auto c = parse_config(text, fs::absolute(path).parent_path());
    validate_config(c);
    return c;
}

Json config_to_json(const RunConfig& c) {
    Json ops = Json::array();
    for (auto op : c.operators)
        ops.push_back(mutation::to_string(op));
    return Json{{"input", {{"spec", c.spec_paths}, {"rtl", c.rtl_paths}, {"seed_signal", c.seed_signal},
                           {"top", c.top_module ? Json(*c.top_module) : Json(nullptr)}}},
                {"retrieval", {{"k", c.k}, {"k1", c.k1}, {"b", c.b}, {"chunk_chars", c.chunk_chars},
                               {"overlap_chars", c.overlap_chars}}},
                {"limits", {{"max_rounds", c.max_rounds}, {"max_depth", c.max_depth}, {"max_chains", c.max_chains},
                            {"max_mutants", c.max_mutants}, {"context_budget", c.context_budget}}},
                {"llm", {{"mode", llm::to_string(c.mode)}, {"model", c.model_id}, {"temperature", c.temperature},
                         {"max_tokens", c.max_tokens}}},
                {"chains", {{"reverse", c.reverse_chains}, {"llm_check", c.llm_chain_check}}},
                {"bridge", {{"llm_check", c.llm_bridge_check}}},
                {"mutation", {{"operators", ops}, {"seed", c.mutation_seed}}}};
}

std::string run_id(const RunConfig& c) {
    return sha256_hex(config_to_json(c).dump()).substr(0, 16);
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Ingest: return "ingest";
        case Stage::Entities: return "entities";
        case Stage::Objectives: return "objectives";
        case Stage::Chains: return "chains";
        case Stage::Bridge: return "bridge";
        case Stage::Sva: return "sva";
        case Stage::Mutate: return "mutate";
    }
    return "?";
}

Stage stage_from_string(std::string_view text) {
    for (auto s : {Stage::Ingest, Stage::Entities, Stage::Objectives, Stage::Chains, Stage::Bridge, Stage::Sva,
                   Stage::Mutate})
        if (to_string(s) == text)
            return s;
    fail(ErrorCode::ConfigError, "unknown stage '" + std::string(text) + "'");
}

const std::vector<Stage>& pipeline_stages() {
    static const std::vector<Stage> stages{Stage::Ingest, Stage::Entities, Stage::Objectives,
                                           Stage::Chains, Stage::Bridge, Stage::Sva};
    return stages;
}

Runner::Runner(RunConfig config, std::shared_ptr<llm::Backend> backend)
    : config_(std::move(config)), backend_(std::move(backend)) {}

const llm::Session& Runner::session() {
    if (!session_)
        session_ = llm::open_session(config_.mode, config_.resolve(config_.fixture_path), backend_,
                                     config_.max_in_flight);
    return *session_;
}

StageOutcome Runner::run(Stage stage) {
    try {
        fs::create_directories(config_.out_dir());
        switch (stage) {
            case Stage::Ingest: return stage_ingest(config_);
            case Stage::Entities: return stage_entities(config_, session());
            case Stage::Objectives: return stage_objectives(config_, session());
            case Stage::Chains: return stage_chains(config_, config_.llm_chain_check ? &session() : nullptr);
            case Stage::Bridge: return stage_bridge(config_, config_.llm_bridge_check ? &session() : nullptr);
            case Stage::Sva: return stage_sva(config_, session());
            case Stage::Mutate: return stage_mutate(config_);
        }
        fail(ErrorCode::PreconditionViolation, "unknown stage");
    }
    catch (const StageError&) {
        throw;
    }
    catch (const Error& e) {
        throw StageError(stage, e);
    }
    catch (const Json::exception& e) {
        throw StageError(stage, Error(ErrorCode::SchemaMismatch, e.what()));
    }
    catch (const fs::filesystem_error& e) {
        throw StageError(stage, Error(ErrorCode::IoError, e.what()));
    }
}

RunReport run_pipeline(const RunConfig& config, std::shared_ptr<llm::Backend> backend) {
    RunReport report;
    report.run_id = run_id(config);
    report.started_at = iso_now();
    Runner runner(config, std::move(backend));
    for (auto stage : pipeline_stages()) {
        StageRecord rec;
        rec.stage = stage;
        auto t0 = std::chrono::steady_clock::now();
        try {
            rec.outcome = runner.run(stage);
            rec.ok = true;
        }
        catch (const StageError& e) {
            rec.error = e.what();
        }
        rec.duration_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        report.stages.push_back(rec);
        if (!rec.ok) {
            report.ok = false;
            break;
        }
    }
    fs::create_directories(config.out_dir());
    write_json_file(config.out_dir() / artifacts::kRunReport, to_json(report));
    return report;
}

Json to_json(const RunReport& r) {
    Json stages = Json::array();
    Json timings = Json::object();
    Json warnings = Json::array();
    for (const auto& s : r.stages) {
        Json j{{"stage", to_string(s.stage)}, {"ok", s.ok}, {"counts", s.outcome.counts},
               {"warnings", s.outcome.warnings}};
        if (!s.ok)
            j["error"] = s.error;
        stages.push_back(j);
        timings[std::string(to_string(s.stage))] = s.duration_ms;
        for (const auto& w : s.outcome.warnings)
            warnings.push_back(std::string(to_string(s.stage)) + ": " + w);
    }
    return Json{{"run_id", r.run_id}, {"ok", r.ok},         {"stages", stages},
                {"warnings", warnings}, {"timings", timings}, {"started_at", r.started_at}};
}

} // namespace assertgen::pipeline
