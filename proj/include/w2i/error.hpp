#pragma once

#include <stdexcept>
#include <string>

namespace w2i {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration. Always raised before any backend call.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ContractViolation : public Error {
public:
    using Error::Error;
};

class EmptyHistory : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class WeightError : public Error {
public:
    using Error::Error;
};

class EmptyKeywordSet : public Error {
public:
    using Error::Error;
};

/// Base for every failure to interpret model output. Keeps the raw reply so
/// the retry loop and transcript can show what the model actually said.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

#define W2I_PARSE_ERROR(Name)                                                \
    class Name : public ParseError {                                         \
    public:                                                                  \
        using ParseError::ParseError;                                        \
    }

W2I_PARSE_ERROR(NoJsonFound);
W2I_PARSE_ERROR(MalformedJson);
W2I_PARSE_ERROR(DecisionParseError);
W2I_PARSE_ERROR(DecisionValidationError);
W2I_PARSE_ERROR(PromptParseError);
W2I_PARSE_ERROR(SelectionParseError);
W2I_PARSE_ERROR(KeywordExtractionError);
W2I_PARSE_ERROR(GradeParseError);
W2I_PARSE_ERROR(GraderParseError);
W2I_PARSE_ERROR(RewriteFailed);

#undef W2I_PARSE_ERROR

/// Retrieval produced nothing usable for any query.
class ExemplarsUnavailable : public Error {
public:
    using Error::Error;
};

/// Generator request violates the mode / positional-image contract.
class ModeError : public Error {
public:
    using Error::Error;
};

/// A backend could not serve a request even after retries. Ends the run with
/// termination=fatal_error.
class FatalBackendError : public Error {
public:
    using Error::Error;
};

class TransportError : public FatalBackendError {
public:
    using FatalBackendError::FatalBackendError;
};

class RateLimited : public TransportError {
public:
    using TransportError::TransportError;
};

class AuthError : public FatalBackendError {
public:
    using FatalBackendError::FatalBackendError;
};

class GenerationError : public FatalBackendError {
public:
    using FatalBackendError::FatalBackendError;
};

/// Search quota hit. Fatal for the query, not for the run.
class QuotaExceeded : public FatalBackendError {
public:
    using FatalBackendError::FatalBackendError;
};

}  // namespace w2i
