#pragma once

#include <stdexcept>
#include <string>

namespace taxoforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};
struct MissingKey : ConfigError {
    explicit MissingKey(const std::string& key)
        : ConfigError("missing required config key: " + key), key(key) {}
    std::string key;
};
struct ParseError : ConfigError {
    using ConfigError::ConfigError;
};
struct InvalidValue : ConfigError {
    using ConfigError::ConfigError;
};

struct HttpError : Error {
    HttpError(int status, const std::string& url)
        : Error("HTTP " + std::to_string(status) + " for " + url), status(status) {}
    int status;
};
struct TooManyRedirects : Error {
    using Error::Error;
};
struct Timeout : Error {
    using Error::Error;
};
struct DecodeError : Error {
    using Error::Error;
};

struct GroupMissing : Error {
    explicit GroupMissing(long long species_key)
        : Error("no group-rank ancestor for species " + std::to_string(species_key)),
          species_key(species_key) {}
    long long species_key;
};

struct Unconvertible : Error {
    using Error::Error;
};

struct BackendFailure : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};
struct CorruptLog : Error {
    CorruptLog(long long offset)
        : Error("corrupt log record at offset " + std::to_string(offset)), offset(offset) {}
    long long offset;
};
struct SanitizeEmpty : Error {
    using Error::Error;
};
struct MissingHoldout : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};

}  // namespace taxoforge
