#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "ease/domain.hpp"
#include "ease/generator.hpp"

namespace ease {

struct EvaluatorSpec {
    enum class Kind { external_metric, llm_judge, game2048 };

    Kind kind = Kind::llm_judge;

    // Rendered into EvaluationResult.feedback_text; placeholders {score},
    // {metrics}, {suggestion}. Empty selects a per-kind default.
    std::string feedback_render;

    // external_metric: command prints "<metric_key>=<real>" lines on stdout
    std::string command;  // template with {file} and {language}
    std::string metric_key = "SCORE";
    Duration timeout = std::chrono::milliseconds(60000);

    // llm_judge
    std::string prompt_template;  // must contain {solution}
    GeneratorSpec generator;

    // game2048: the artifact is run as an external policy
    int n_games = 5;
    std::uint64_t base_seed = 0;
    Duration move_time_limit = std::chrono::milliseconds(5000);
    Duration search_time_budget = std::chrono::milliseconds(5000);
    std::string policy_command;  // template with {file}
    int move_cap = 20000;

    bool operator==(const EvaluatorSpec&) const = default;
};

struct JudgeVerdict {
    int rating = 1;  // in [1, 10]
    std::string suggestion;

    bool operator==(const JudgeVerdict&) const = default;
};

/// Extracts the first "Rating: <int>" and the first "Suggestion: …"
/// (running to the end of the text). Labels are case-insensitive and
/// whitespace-tolerant. Throws ParseError on missing or out-of-range parts.
JudgeVerdict parse_judge_reply(const std::string& reply);

/// Strict improvement: candidate displaces the incumbent only with a higher
/// score; ties keep the incumbent. Both results must carry a score.
bool better(const EvaluationResult& candidate, const EvaluationResult& incumbent);

/// "key: value, key: value" in key order.
std::string render_metrics(const std::map<std::string, double>& metrics);

/// Scores valid artifacts. Owns the judge generator so a scripted judge
/// advances through its replies across iterations.
class Evaluator {
public:
    explicit Evaluator(EvaluatorSpec spec);

    /// Throws an ease::Error subclass on judge parse failures, command
    /// failures, and connector failures; the caller records those as
    /// evaluation_failed iterations.
    EvaluationResult evaluate(const SolutionArtifact& artifact, const AnalysisReport& analysis);

    const EvaluatorSpec& spec() const { return spec_; }

private:
    EvaluationResult evaluate_external(const SolutionArtifact& artifact);
    EvaluationResult evaluate_judge(const SolutionArtifact& artifact);
    EvaluationResult evaluate_game(const SolutionArtifact& artifact);
    std::string render_feedback(const EvaluationResult& result,
                                const std::string& suggestion) const;

    EvaluatorSpec spec_;
    std::unique_ptr<Generator> judge_;
};

}  // namespace ease
