// Error type shared by every stage of the assertion generation pipeline.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace assertgen {

enum class ErrorCode {
    PreconditionViolation,
    // llm gateway
    MissingFixture,
    BackendUnavailable,
    EmptyResponse,
    FixtureUnreadable,
    FixtureCorrupt,
    // corpus / retrieval
    EmptyDocument,
    UnknownChunk,
    EmptySignal,
    EmptyCorpus,
    // entities / objectives
    UnparseableResponse,
    EmptyEntity,
    NoObjectives,
    UnresolvedSignals,
    // rtl
    SyntaxError,
    DuplicateModule,
    UnresolvedInstance,
    AmbiguousTop,
    SignalNotFound,
    // chains
    OriginNotInGraph,
    ChainDivergence,
    // sva
    NoAssertionsFound,
    ValidationGate,
    // mutation
    NoApplicableSites,
    EmptyVerdicts,
    DuplicateMutant,
    SchemaMismatch,
    // pipeline
    ConfigError,
    MissingUpstreamArtifact,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace assertgen
