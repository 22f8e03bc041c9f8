// assertgen command line: full runs and single stages from a config file.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "assertgen/error.hpp"
#include "assertgen/io.hpp"
#include "assertgen/pipeline.hpp"
#include "assertgen/rtl/design.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kStageFailure = 3;

struct Options {
    std::string config;
    std::string top;
    bool reverse_chains = false;
    std::string dump_design;
    std::string dump_graph;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "INI run configuration")->required();
    cmd->add_option("--top", o.top, "root module when several modules are never instantiated");
    cmd->add_flag("--reverse-chains", o.reverse_chains, "follow derivation edges load-to-driver");
    cmd->add_option("--dump-design", o.dump_design, "write the parsed module table as JSON");
    cmd->add_option("--dump-graph", o.dump_graph, "write the signal connectivity graph as JSON");
}

void dumps(const assertgen::pipeline::RunConfig& config, const Options& o) {
    if (o.dump_design.empty() && o.dump_graph.empty())
        return;
    std::vector<assertgen::rtl::SourceFile> files;
    for (const auto& p : config.rtl_paths)
        files.push_back({p, assertgen::read_text_file(config.resolve(p))});
    auto design = assertgen::rtl::parse_design(std::move(files), config.top_module);
    if (!o.dump_design.empty())
        assertgen::write_json_file(o.dump_design, assertgen::rtl::design_to_json(design));
    if (!o.dump_graph.empty())
        assertgen::write_json_file(o.dump_graph,
                                   assertgen::rtl::build_connectivity(design).to_json(design.root_module()));
}

void print_warnings(const std::string& stage, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings)
        std::cerr << "warning: " << stage << ": " << w << "\n";
}

} // namespace

int main(int argc, char** argv) {
    namespace pl = assertgen::pipeline;
    CLI::App app{"Generate SystemVerilog assertions from a specification and RTL"};
    app.require_subcommand(1);
    Options opts;
    auto* run = app.add_subcommand("run", "run every stage from ingest to sva");
    add_common(run, opts);
    std::vector<std::pair<CLI::App*, pl::Stage>> stage_cmds;
    for (auto stage : {pl::Stage::Ingest, pl::Stage::Entities, pl::Stage::Objectives, pl::Stage::Chains,
                       pl::Stage::Bridge, pl::Stage::Sva, pl::Stage::Mutate}) {
        auto* cmd = app.add_subcommand(std::string(pl::to_string(stage)), "re-run one stage from saved artifacts");
        add_common(cmd, opts);
        stage_cmds.emplace_back(cmd, stage);
    }
    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    pl::RunConfig config;
    try {
        config = pl::load_config(opts.config);
        if (!opts.top.empty())
            config.top_module = opts.top;
        if (opts.reverse_chains)
            config.reverse_chains = true;
    }
    catch (const assertgen::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        dumps(config, opts);
        if (run->parsed()) {
            auto report = pl::run_pipeline(config);
            for (const auto& s : report.stages) {
                print_warnings(std::string(pl::to_string(s.stage)), s.outcome.warnings);
                if (!s.ok)
                    std::cerr << "error: " << s.error << "\n";
            }
            std::cout << "run " << report.run_id << ": " << (report.ok ? "ok" : "failed") << ", artifacts in "
                      << config.out_dir().string() << "\n";
            return report.ok ? kOk : kStageFailure;
        }
        for (const auto& [cmd, stage] : stage_cmds) {
            if (!cmd->parsed())
                continue;
            pl::Runner runner(config);
            auto outcome = runner.run(stage);
            print_warnings(std::string(pl::to_string(stage)), outcome.warnings);
            std::cout << pl::to_string(stage) << ": " << outcome.counts.dump() << "\n";
        }
        return kOk;
    }
    catch (const assertgen::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == assertgen::ErrorCode::ConfigError ? kConfigError : kStageFailure;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kStageFailure;
    }
}
