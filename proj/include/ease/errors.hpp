#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ease {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated an operation's precondition.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

/// A TaskConfig failed validation; carries the individual violations.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid task config";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }
    std::vector<std::string> violations_;
};

/// Transport-level generator failure (after retries were exhausted).
class ConnectorError : public Error {
public:
    explicit ConnectorError(const std::string& what) : Error(what) {}
};

/// A scripted generator ran out of responses. Distinct from ConnectorError
/// because it aborts the task instead of recording an invalid iteration.
class ScriptExhaustedError : public Error {
public:
    explicit ScriptExhaustedError(const std::string& what) : Error(what) {}
};

/// Structured text (judge reply, metric output, config file) did not match
/// its expected shape.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// Filesystem/process-level failure, with path or command context in what().
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace ease
