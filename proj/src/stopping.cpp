#include "ease/stopping.hpp"

#include "ease/errors.hpp"
#include "ease/task.hpp"

namespace ease {

std::string to_string(StoppingSpec::Kind kind) {
    switch (kind) {
        case StoppingSpec::Kind::max_iterations: return "max_iterations";
        case StoppingSpec::Kind::max_tokens: return "max_tokens";
        case StoppingSpec::Kind::max_valid_iterations: return "max_valid_iterations";
        case StoppingSpec::Kind::max_consecutive_invalid: return "max_consecutive_invalid";
        case StoppingSpec::Kind::score_threshold: return "score_threshold";
        case StoppingSpec::Kind::time_limit: return "time_limit";
    }
    return "max_iterations";
}

StoppingSpec::Kind stopping_kind_from_string(const std::string& s) {
    if (s == "max_iterations") return StoppingSpec::Kind::max_iterations;
    if (s == "max_tokens") return StoppingSpec::Kind::max_tokens;
    if (s == "max_valid_iterations") return StoppingSpec::Kind::max_valid_iterations;
    if (s == "max_consecutive_invalid") return StoppingSpec::Kind::max_consecutive_invalid;
    if (s == "score_threshold") return StoppingSpec::Kind::score_threshold;
    if (s == "time_limit") return StoppingSpec::Kind::time_limit;
    throw ParseError("unknown stopping kind: " + s);
}

std::optional<std::string> should_stop(const TaskState& state,
                                       const std::vector<StoppingSpec>& conditions,
                                       Timestamp now) {
    if (conditions.empty()) throw UsageError("should_stop: conditions must be non-empty");
    for (const auto& condition : conditions) {
        bool hit = false;
        switch (condition.kind) {
            case StoppingSpec::Kind::max_iterations:
                hit = state.counters.total >= condition.n;
                break;
            case StoppingSpec::Kind::max_tokens:
                hit = state.counters.tokens_used >= condition.n;
                break;
            case StoppingSpec::Kind::max_valid_iterations:
                hit = state.counters.valid >= condition.n;
                break;
            case StoppingSpec::Kind::max_consecutive_invalid:
                hit = state.counters.consecutive_invalid >= condition.n;
                break;
            case StoppingSpec::Kind::score_threshold:
                hit = state.incumbent_best && state.incumbent_best->second.score &&
                      *state.incumbent_best->second.score >= condition.threshold;
                break;
            case StoppingSpec::Kind::time_limit:
                hit = (now - state.started_at) > condition.limit;
                break;
        }
        if (hit) return to_string(condition.kind);
    }
    return std::nullopt;
}

}  // namespace ease
