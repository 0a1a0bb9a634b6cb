#include "ease/task.hpp"

#include <regex>

namespace ease {
namespace {

void validate_generator(const GeneratorSpec& spec, const std::string& prefix,
                        std::vector<std::string>& out) {
    if (spec.kind == GeneratorSpec::Kind::scripted) {
        if (spec.responses.empty()) out.push_back(prefix + ".responses: must be non-empty");
        if (spec.delay.count() < 0) out.push_back(prefix + ".delay_ms: must be >= 0");
        return;
    }
    static const std::regex url_re(R"(^https?://[^/]+(/.*)?$)");
    if (!std::regex_match(spec.endpoint, url_re))
        out.push_back(prefix + ".endpoint: must be a http(s) URL");
    if (spec.model.empty()) out.push_back(prefix + ".model: must be non-empty");
    if (spec.request_timeout.count() <= 0)
        out.push_back(prefix + ".request_timeout_ms: must be > 0");
    if (spec.max_retries < 0) out.push_back(prefix + ".max_retries: must be >= 0");
    if (spec.retry_backoff.count() <= 0) out.push_back(prefix + ".retry_backoff_ms: must be > 0");
}

}  // namespace

std::vector<std::string> validate_config(const TaskConfig& config) {
    std::vector<std::string> out;

    if (config.prompts.initial.empty()) out.push_back("prompts.initial: must be non-empty");
    if (config.prompts.system && config.prompts.system->empty())
        out.push_back("prompts.system: must be non-empty when given");

    const RepeatingSpec& rep = config.prompts.repeating;
    if (rep.messages.empty()) out.push_back("repeating.messages: must be non-empty");
    for (const auto& m : rep.messages)
        if (m.empty()) {
            out.push_back("repeating.messages: entries must be non-empty");
            break;
        }
    if (!rep.weights.empty()) {
        if (rep.weights.size() != rep.messages.size())
            out.push_back("repeating.weights: must match message count");
        for (double w : rep.weights)
            if (w <= 0) {
                out.push_back("repeating.weights: must be positive");
                break;
            }
    } else if (rep.strategy == RepeatingSpec::Strategy::random_weighted) {
        out.push_back("repeating.weights: required for the random_weighted strategy");
    }
    if (!rep.messages.empty() && rep.cursor >= rep.messages.size())
        out.push_back("repeating.cursor: must be smaller than the message count");

    validate_generator(config.generator, "generator", out);

    for (size_t i = 0; i < config.tests.size(); ++i) {
        const TestSpec& test = config.tests[i];
        const std::string prefix = "tests[" + std::to_string(i) + "]";
        if (test.name.empty()) out.push_back(prefix + ".name: must be non-empty");
        if (test.feedback_template.empty())
            out.push_back(prefix + ".feedback_template: must be non-empty");
        switch (test.kind) {
            case TestSpec::Kind::keyword:
                if (test.required.empty() && test.forbidden.empty())
                    out.push_back(prefix + ": keyword test needs required or forbidden entries");
                break;
            case TestSpec::Kind::external_check:
                if (test.command.empty()) out.push_back(prefix + ".command: must be non-empty");
                if (test.timeout.count() <= 0)
                    out.push_back(prefix + ".timeout_ms: must be > 0");
                break;
            case TestSpec::Kind::code_extraction:
                break;
        }
        for (size_t j = 0; j < i; ++j)
            if (config.tests[j].name == test.name && !test.name.empty()) {
                out.push_back(prefix + ".name: duplicates \"" + test.name + "\"");
                break;
            }
    }

    for (size_t i = 0; i < config.analyzers.size(); ++i) {
        const AnalyzerSpec& analyzer = config.analyzers[i];
        const std::string prefix = "analyzers[" + std::to_string(i) + "]";
        if (analyzer.output_key.empty()) out.push_back(prefix + ".output_key: must be non-empty");
        for (size_t j = 0; j < i; ++j)
            if (config.analyzers[j].output_key == analyzer.output_key &&
                !analyzer.output_key.empty()) {
                out.push_back(prefix + ".output_key: duplicates \"" + analyzer.output_key + "\"");
                break;
            }
        if (analyzer.kind == AnalyzerSpec::Kind::keyword_presence && analyzer.keywords.empty())
            out.push_back(prefix + ".keywords: must be non-empty");
        if (analyzer.kind == AnalyzerSpec::Kind::llm_analysis) {
            if (analyzer.prompt_template.find("{solution}") == std::string::npos)
                out.push_back(prefix + ".prompt_template: must contain {solution}");
            validate_generator(analyzer.generator, prefix + ".generator", out);
        }
    }

    switch (config.evaluator.kind) {
        case EvaluatorSpec::Kind::llm_judge:
            if (config.evaluator.prompt_template.find("{solution}") == std::string::npos)
                out.push_back("evaluator.prompt_template: must contain {solution}");
            validate_generator(config.evaluator.generator, "evaluator.generator", out);
            break;
        case EvaluatorSpec::Kind::external_metric:
            if (config.evaluator.command.empty())
                out.push_back("evaluator.command: must be non-empty");
            if (config.evaluator.metric_key.empty())
                out.push_back("evaluator.metric_key: must be non-empty");
            if (config.evaluator.timeout.count() <= 0)
                out.push_back("evaluator.timeout_ms: must be > 0");
            break;
        case EvaluatorSpec::Kind::game2048:
            if (config.evaluator.n_games < 1) out.push_back("evaluator.n_games: must be >= 1");
            if (config.evaluator.move_time_limit.count() <= 0)
                out.push_back("evaluator.move_time_limit_ms: must be > 0");
            if (config.evaluator.search_time_budget.count() <= 0)
                out.push_back("evaluator.search_time_budget_ms: must be > 0");
            if (config.evaluator.policy_command.find("{file}") == std::string::npos)
                out.push_back("evaluator.policy_command: must contain {file}");
            if (config.evaluator.move_cap < 1) out.push_back("evaluator.move_cap: must be >= 1");
            break;
    }

    if (config.stopping.empty()) {
        out.push_back("stopping: must contain at least one condition");
    } else {
        for (size_t i = 0; i < config.stopping.size(); ++i) {
            const StoppingSpec& s = config.stopping[i];
            const std::string prefix = "stopping[" + std::to_string(i) + "]";
            switch (s.kind) {
                case StoppingSpec::Kind::max_iterations:
                case StoppingSpec::Kind::max_tokens:
                case StoppingSpec::Kind::max_valid_iterations:
                case StoppingSpec::Kind::max_consecutive_invalid:
                    if (s.n < 1) out.push_back(prefix + ".n: must be >= 1");
                    break;
                case StoppingSpec::Kind::score_threshold:
                    break;
                case StoppingSpec::Kind::time_limit:
                    if (s.limit.count() <= 0) out.push_back(prefix + ".ms: must be > 0");
                    break;
            }
        }
    }
    return out;
}

std::string to_string(TaskStatus::Phase phase) {
    switch (phase) {
        case TaskStatus::Phase::created: return "created";
        case TaskStatus::Phase::running: return "running";
        case TaskStatus::Phase::stopped: return "stopped";
        case TaskStatus::Phase::finished: return "finished";
    }
    return "created";
}

Counters recompute_counters(const std::vector<IterationRecord>& iterations) {
    Counters out;
    out.total = static_cast<int>(iterations.size());
    for (const auto& record : iterations) {
        if (record.valid) ++out.valid;
        out.tokens_used += record.generator_meta.tokens_prompt +
                           record.generator_meta.tokens_completion;
    }
    for (auto it = iterations.rbegin(); it != iterations.rend() && !it->valid; ++it)
        ++out.consecutive_invalid;
    return out;
}

}  // namespace ease
