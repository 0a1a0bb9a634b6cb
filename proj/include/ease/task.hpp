#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ease/analysis.hpp"
#include "ease/domain.hpp"
#include "ease/evaluation.hpp"
#include "ease/generator.hpp"
#include "ease/prompt.hpp"
#include "ease/stopping.hpp"
#include "ease/validation.hpp"

namespace ease {

struct PromptsSpec {
    std::optional<std::string> system;
    std::string initial;
    RepeatingSpec repeating;

    bool operator==(const PromptsSpec&) const = default;
};

/// Declarative definition of one task: everything the loop needs.
struct TaskConfig {
    PromptsSpec prompts;
    GeneratorSpec generator;
    std::optional<std::size_t> context_window;  // nullopt = unbounded, 0 = stateless
    std::vector<TestSpec> tests;
    std::vector<AnalyzerSpec> analyzers;
    EvaluatorSpec evaluator;
    std::vector<StoppingSpec> stopping;  // non-empty
    std::optional<std::uint64_t> seed;
    bool include_analysis_in_feedback = false;

    bool operator==(const TaskConfig&) const = default;
};

/// Empty result means the config satisfies every invariant; each violation
/// names the field and the broken rule.
std::vector<std::string> validate_config(const TaskConfig& config);

struct Counters {
    int total = 0;
    int valid = 0;
    int consecutive_invalid = 0;
    long tokens_used = 0;

    bool operator==(const Counters&) const = default;
};

struct TaskStatus {
    enum class Phase { created, running, stopped, finished };

    Phase phase = Phase::created;
    std::string reason;  // stop reason / finish reason, empty while created|running

    bool operator==(const TaskStatus&) const = default;
};

std::string to_string(TaskStatus::Phase phase);

struct TaskState {
    std::vector<IterationRecord> iterations;
    Counters counters;
    Timestamp started_at{};
    std::optional<std::pair<std::string, EvaluationResult>> incumbent_best;  // artifact id
    TaskStatus status;

    /// Full logged conversation (feedback chaining is verified from it).
    std::vector<Message> conversation;
};

/// Recomputes counters from the iteration list (the checked property that
/// counters never drift from history).
Counters recompute_counters(const std::vector<IterationRecord>& iterations);

}  // namespace ease
