#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ease/clock.hpp"

namespace ease {

struct TaskState;

struct StoppingSpec {
    enum class Kind {
        max_iterations,
        max_tokens,
        max_valid_iterations,
        max_consecutive_invalid,
        score_threshold,
        time_limit
    };

    Kind kind = Kind::max_iterations;
    long n = 1;             // counter-based kinds, >= 1
    double threshold = 0;   // score_threshold
    Duration limit{};       // time_limit, > 0

    bool operator==(const StoppingSpec&) const = default;
};

std::string to_string(StoppingSpec::Kind kind);
StoppingSpec::Kind stopping_kind_from_string(const std::string& s);

/// Evaluated after every iteration, valid or not. Returns the name of the
/// first satisfied condition in list order, or nullopt. Pure.
std::optional<std::string> should_stop(const TaskState& state,
                                       const std::vector<StoppingSpec>& conditions,
                                       Timestamp now);

}  // namespace ease
