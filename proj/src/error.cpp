#include "assertgen/error.hpp"

namespace assertgen {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::PreconditionViolation: return "PreconditionViolation";
        case ErrorCode::MissingFixture: return "MissingFixture";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::EmptyResponse: return "EmptyResponse";
        case ErrorCode::FixtureUnreadable: return "FixtureUnreadable";
        case ErrorCode::FixtureCorrupt: return "FixtureCorrupt";
        case ErrorCode::EmptyDocument: return "EmptyDocument";
        case ErrorCode::UnknownChunk: return "UnknownChunk";
        case ErrorCode::EmptySignal: return "EmptySignal";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::UnparseableResponse: return "UnparseableResponse";
        case ErrorCode::EmptyEntity: return "EmptyEntity";
        case ErrorCode::NoObjectives: return "NoObjectives";
        case ErrorCode::UnresolvedSignals: return "UnresolvedSignals";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::DuplicateModule: return "DuplicateModule";
        case ErrorCode::UnresolvedInstance: return "UnresolvedInstance";
        case ErrorCode::AmbiguousTop: return "AmbiguousTop";
        case ErrorCode::SignalNotFound: return "SignalNotFound";
        case ErrorCode::OriginNotInGraph: return "OriginNotInGraph";
        case ErrorCode::ChainDivergence: return "ChainDivergence";
        case ErrorCode::NoAssertionsFound: return "NoAssertionsFound";
        case ErrorCode::ValidationGate: return "ValidationGate";
        case ErrorCode::NoApplicableSites: return "NoApplicableSites";
        case ErrorCode::EmptyVerdicts: return "EmptyVerdicts";
        case ErrorCode::DuplicateMutant: return "DuplicateMutant";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::MissingUpstreamArtifact: return "MissingUpstreamArtifact";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace assertgen
