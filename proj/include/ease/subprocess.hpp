#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ease/clock.hpp"

namespace ease {

struct CommandResult {
    int exit_code = -1;       // WEXITSTATUS, or -signal when killed
    std::string output;       // stdout + stderr, interleaved
    bool timed_out = false;
    bool spawn_failed = false;
};

/// Splits a command template into argv tokens, honoring single and double
/// quotes the way a POSIX shell would (no globbing, no expansion).
std::vector<std::string> split_command(const std::string& command);

/// Replaces {name} placeholders inside each token.
std::vector<std::string> substitute_placeholders(
    std::vector<std::string> tokens,
    const std::map<std::string, std::string>& values);

/// Runs argv to completion (or timeout, then SIGKILL), capturing its output.
CommandResult run_command(const std::vector<std::string>& argv, Duration timeout,
                          const std::map<std::string, std::string>& extra_env = {});

/// A child process spoken to over line-oriented stdin/stdout, one exchange at
/// a time. Used for external policies. Kills the child on destruction.
class LineProcess {
public:
    LineProcess(const std::vector<std::string>& argv,
                const std::map<std::string, std::string>& extra_env = {});
    ~LineProcess();

    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    bool alive() const;

    /// Writes one line (newline appended). Returns false if the child is gone.
    bool write_line(const std::string& line);

    /// Reads one line within the deadline; nullopt on timeout or EOF.
    std::optional<std::string> read_line(Duration timeout);

    /// True when the last read_line returned nullopt because of a timeout
    /// rather than the child closing its end.
    bool last_read_timed_out() const { return last_read_timed_out_; }

private:
    void shutdown();

    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool last_read_timed_out_ = false;
};

}  // namespace ease
