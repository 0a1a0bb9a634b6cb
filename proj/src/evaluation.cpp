#include "ease/evaluation.hpp"

#include <cstdlib>
#include <filesystem>
#include <regex>
#include <sstream>

#include "ease/errors.hpp"
#include "ease/game2048.hpp"
#include "ease/subprocess.hpp"
#include "ease/validation.hpp"

namespace ease {
namespace {

std::string trim(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string default_render(EvaluatorSpec::Kind kind) {
    switch (kind) {
        case EvaluatorSpec::Kind::llm_judge: return "Rating: {score} Suggestion: {suggestion}";
        case EvaluatorSpec::Kind::game2048: return "Score: {score}. Metrics: {metrics}";
        case EvaluatorSpec::Kind::external_metric: return "Score: {score}";
    }
    return "Score: {score}";
}

}  // namespace

JudgeVerdict parse_judge_reply(const std::string& reply) {
    static const std::regex rating_re(R"(rating\s*:\s*(-?\d+))", std::regex::icase);
    static const std::regex suggestion_re(R"(suggestion\s*:)", std::regex::icase);

    std::smatch rating_match;
    if (!std::regex_search(reply, rating_match, rating_re))
        throw ParseError("judge reply has no \"Rating: <integer>\"");
    const long rating = std::strtol(rating_match[1].str().c_str(), nullptr, 10);
    if (rating < 1 || rating > 10)
        throw ParseError("judge rating out of range [1,10]: " + rating_match[1].str());

    std::smatch suggestion_match;
    if (!std::regex_search(reply, suggestion_match, suggestion_re))
        throw ParseError("judge reply has no \"Suggestion:\"");
    const std::string suggestion =
        trim(reply.substr(suggestion_match.position(0) + suggestion_match.length(0)));
    if (suggestion.empty()) throw ParseError("judge suggestion is empty");

    return JudgeVerdict{static_cast<int>(rating), suggestion};
}

bool better(const EvaluationResult& candidate, const EvaluationResult& incumbent) {
    if (!candidate.score || !incumbent.score)
        throw UsageError("better: both results must carry a score");
    return *candidate.score > *incumbent.score;
}

std::string render_metrics(const std::map<std::string, double>& metrics) {
    std::string out;
    for (const auto& [key, value] : metrics) {
        if (!out.empty()) out += ", ";
        out += key + ": " + format_score(value);
    }
    return out;
}

Evaluator::Evaluator(EvaluatorSpec spec) : spec_(std::move(spec)) {
    if (spec_.kind == EvaluatorSpec::Kind::llm_judge) judge_ = make_generator(spec_.generator);
}

std::string Evaluator::render_feedback(const EvaluationResult& result,
                                       const std::string& suggestion) const {
    std::string tmpl =
        spec_.feedback_render.empty() ? default_render(spec_.kind) : spec_.feedback_render;
    tmpl = render_template(tmpl, "score", result.score ? format_score(*result.score) : "");
    tmpl = render_template(tmpl, "metrics", render_metrics(result.metrics));
    tmpl = render_template(tmpl, "suggestion", suggestion);
    return tmpl;
}

EvaluationResult Evaluator::evaluate_external(const SolutionArtifact& artifact) {
    const auto path = write_artifact_file(artifact);
    CommandResult run;
    try {
        auto argv = substitute_placeholders(
            split_command(spec_.command),
            {{"file", path.string()}, {"language", artifact.language_id}});
        run = run_command(argv, spec_.timeout);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw;
    }
    std::error_code ec;
    std::filesystem::remove(path, ec);

    if (run.timed_out)
        throw IoError("metric command timed out after " + std::to_string(spec_.timeout.count()) +
                      " ms");
    if (run.spawn_failed) throw IoError("metric command could not be started: " + spec_.command);
    if (run.exit_code != 0)
        throw IoError("metric command exited with code " + std::to_string(run.exit_code));

    EvaluationResult result;
    std::istringstream lines(run.output);
    std::string line;
    while (std::getline(lines, line)) {
        line = trim(line);
        const size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value_text = trim(line.substr(eq + 1));
        char* end = nullptr;
        const double value = std::strtod(value_text.c_str(), &end);
        if (end == value_text.c_str() || *end != '\0') continue;
        result.metrics[key] = value;
        if (key == spec_.metric_key) result.score = value;
    }
    if (!result.score)
        throw ParseError("metric command output has no \"" + spec_.metric_key +
                         "=<real>\" line");
    result.metrics.erase(spec_.metric_key);  // the score line is not a partial metric
    result.feedback_text = render_feedback(result, "");
    return result;
}

EvaluationResult Evaluator::evaluate_judge(const SolutionArtifact& artifact) {
    if (spec_.prompt_template.find("{solution}") == std::string::npos)
        throw UsageError("llm_judge template must contain {solution}");
    const std::string prompt =
        render_template(spec_.prompt_template, "solution", artifact.content);
    const Message turn = make_message(Role::user, MessageKind::repeating, prompt);
    const GeneratorResponse reply = judge_->generate({turn});
    const JudgeVerdict verdict = parse_judge_reply(reply.message.content);

    EvaluationResult result;
    result.score = static_cast<double>(verdict.rating);
    result.feedback_text = render_feedback(result, verdict.suggestion);
    return result;
}

EvaluationResult Evaluator::evaluate_game(const SolutionArtifact& artifact) {
    if (spec_.policy_command.find("{file}") == std::string::npos)
        throw UsageError("game2048 policy_command must contain {file}");
    const auto path = write_artifact_file(artifact);
    g2048::PolicySpec policy;
    policy.kind = g2048::PolicySpec::Kind::external_process;
    policy.command = render_template(spec_.policy_command, "file", path.string());
    policy.move_timeout = spec_.move_time_limit;
    policy.search_budget = spec_.search_time_budget;

    g2048::SolverMetrics metrics;
    try {
        metrics = g2048::evaluate_solver(policy, spec_.n_games, spec_.base_seed, spec_.move_cap);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw;
    }
    std::error_code ec;
    std::filesystem::remove(path, ec);

    EvaluationResult result;
    result.score = metrics.avg_score;
    result.metrics["avg_max_tile"] = metrics.avg_max_tile;
    result.metrics["avg_valid_moves"] = metrics.avg_valid_moves;
    result.metrics["wins"] = metrics.wins;
    result.feedback_text = render_feedback(result, "");
    return result;
}

EvaluationResult Evaluator::evaluate(const SolutionArtifact& artifact, const AnalysisReport&) {
    switch (spec_.kind) {
        case EvaluatorSpec::Kind::external_metric: return evaluate_external(artifact);
        case EvaluatorSpec::Kind::llm_judge: return evaluate_judge(artifact);
        case EvaluatorSpec::Kind::game2048: return evaluate_game(artifact);
    }
    throw UsageError("unknown evaluator kind");
}

}  // namespace ease
