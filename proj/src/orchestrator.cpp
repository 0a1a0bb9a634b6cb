#include "ease/orchestrator.hpp"

#include <algorithm>
#include <memory>
#include <random>
#include <thread>

#include "ease/errors.hpp"

namespace ease {
namespace {

constexpr size_t kErrorTurnArtifactLimit = 8192;  // bytes of failing artifact echoed back

std::string render_analysis_lines(const AnalysisReport& report) {
    std::string out;
    for (const auto& [key, value] : report.entries) {
        if (!out.empty()) out += "\n";
        out += key + ": ";
        if (std::holds_alternative<double>(value)) {
            out += format_score(std::get<double>(value));
        } else if (std::holds_alternative<bool>(value)) {
            out += std::get<bool>(value) ? "true" : "false";
        } else {
            out += std::get<std::string>(value);
        }
    }
    return out;
}

uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

/// The wired module set plus loop state for one task; step() is the Fig. 1
/// single-pass body (exactly one generate call per invocation).
class TaskLoop {
public:
    TaskLoop(const TaskConfig& config, TaskState& state)
        : config_(config),
          state_(state),
          deterministic_(fully_scripted(config) && config.seed.has_value()),
          split_(config.seed ? *config.seed : fresh_seed()),
          prompt_rng_(split_.stream("prompt")),
          ulid_rng_(split_.stream("ulid")),
          generator_(make_generator(config.generator)),
          analyzers_(config.analyzers),
          evaluator_(config.evaluator),
          repeating_(config.prompts.repeating) {
        if (deterministic_) {
            clock_ = std::make_unique<VirtualClock>();
        } else {
            clock_ = std::make_unique<SystemClock>();
        }
        state_.started_at = clock_->now();
        state_.status = {TaskStatus::Phase::running, ""};
        if (config_.prompts.system)
            state_.conversation.push_back(make_message(Role::system, MessageKind::system,
                                                       *config_.prompts.system, clock_->now()));
        pending_ = make_message(Role::user, MessageKind::initial, config_.prompts.initial,
                                clock_->now());
    }

    /// Runs one iteration. Returns false when the script was exhausted (the
    /// task is marked stopped and no record is appended).
    bool step() {
        const int index = state_.counters.total + 1;
        std::vector<Message> outgoing = trim_context(state_.conversation, config_.context_window);
        outgoing.push_back(pending_);
        state_.conversation.push_back(pending_);

        const auto real_start = std::chrono::steady_clock::now();
        GeneratorResponse response;
        bool generator_failed = false;
        std::string failure_detail;
        try {
            response = generator_->generate(outgoing);
        } catch (const ScriptExhaustedError&) {
            state_.status = {TaskStatus::Phase::stopped, "script exhausted"};
            return false;
        } catch (const ConnectorError& e) {
            generator_failed = true;
            failure_detail = e.what();
        }
        // Virtual time: every iteration costs exactly one second.
        clock_->advance(Duration(1000));
        const Duration wall =
            deterministic_ ? Duration(1000)
                           : std::chrono::duration_cast<Duration>(
                                 std::chrono::steady_clock::now() - real_start);

        IterationRecord record;
        record.index = index;
        record.wall_time = wall;

        if (generator_failed) {
            record.valid = false;
            record.test.passed = false;
            record.test.failures = {
                TestFailure{"generator", "generator_failure", failure_detail}};
            pending_ = make_message(Role::user, MessageKind::feedback,
                                    feedback_for(record.test, config_.tests), clock_->now());
        } else {
            response.message.timestamp = clock_->now();
            record.generator_meta = response;
            state_.conversation.push_back(response.message);

            SolutionArtifact artifact =
                make_artifact(response.message.content, config_.tests, index,
                              make_ulid(clock_->now(), ulid_rng_), clock_->now());
            record.test = run_tests(artifact, config_.tests);
            record.valid = record.test.passed;
            record.artifact = std::move(artifact);

            if (!record.valid) {
                // Error-correction turn: templates plus the failing artifact,
                // bypassing the repeating machinery.
                std::string turn = feedback_for(record.test, config_.tests);
                turn += "\n\nYour previous reply was:\n";
                turn += record.artifact->content.substr(0, kErrorTurnArtifactLimit);
                pending_ = make_message(Role::user, MessageKind::feedback, turn, clock_->now());
            } else {
                record.analysis = analyzers_.analyze(*record.artifact);
                std::vector<std::string> feedback_items;
                try {
                    EvaluationResult result = evaluator_.evaluate(*record.artifact,
                                                                  record.analysis);
                    if (result.score &&
                        (!state_.incumbent_best || better(result, state_.incumbent_best->second)))
                        state_.incumbent_best = {record.artifact->id, result};
                    if (result.feedback_text && !result.feedback_text->empty())
                        feedback_items.push_back(*result.feedback_text);
                    record.evaluation = std::move(result);
                } catch (const Error& e) {
                    record.evaluation_error = e.what();
                }
                if (config_.include_analysis_in_feedback && !record.analysis.entries.empty())
                    feedback_items.push_back(render_analysis_lines(record.analysis));
                auto [repeating_message, updated] = select_repeating(repeating_, prompt_rng_);
                repeating_ = std::move(updated);
                pending_ = compose_iteration_prompt(repeating_message, feedback_items,
                                                    clock_->now());
            }
        }

        state_.counters.total += 1;
        if (record.valid) {
            state_.counters.valid += 1;
            state_.counters.consecutive_invalid = 0;
        } else {
            state_.counters.consecutive_invalid += 1;
        }
        state_.counters.tokens_used +=
            record.generator_meta.tokens_prompt + record.generator_meta.tokens_completion;
        state_.iterations.push_back(std::move(record));
        return true;
    }

    Timestamp now() const { return clock_->now(); }

private:
    const TaskConfig& config_;
    TaskState& state_;
    bool deterministic_;
    SeedSplitter split_;
    Rng prompt_rng_;
    Rng ulid_rng_;
    std::unique_ptr<Clock> clock_;
    std::unique_ptr<Generator> generator_;
    AnalyzerSet analyzers_;
    Evaluator evaluator_;
    RepeatingSpec repeating_;
    Message pending_;
};

}  // namespace

bool fully_scripted(const TaskConfig& config) {
    if (config.generator.kind != GeneratorSpec::Kind::scripted) return false;
    if (config.evaluator.kind == EvaluatorSpec::Kind::llm_judge &&
        config.evaluator.generator.kind != GeneratorSpec::Kind::scripted)
        return false;
    for (const auto& analyzer : config.analyzers)
        if (analyzer.kind == AnalyzerSpec::Kind::llm_analysis &&
            analyzer.generator.kind != GeneratorSpec::Kind::scripted)
            return false;
    return true;
}

RunResult run_task(const TaskConfig& config, TaskHandle* handle,
                   const IterationCallback& on_iteration) {
    if (auto violations = validate_config(config); !violations.empty())
        throw ConfigError(violations);

    RunResult out;
    TaskLoop loop(config, out.state);
    while (true) {
        if (!loop.step()) break;  // script exhausted; status already set
        if (on_iteration) on_iteration(out.state);
        if (handle && handle->stop_requested()) {
            out.state.status = {TaskStatus::Phase::stopped, "user"};
            break;
        }
        if (auto reason = should_stop(out.state, config.stopping, loop.now())) {
            out.state.status = {TaskStatus::Phase::finished, *reason};
            break;
        }
    }
    out.statistics = summarize(out.state);
    return out;
}

std::vector<RunResult> run_many(const std::vector<TaskConfig>& configs, int max_parallel,
                                const std::function<IterationCallback(std::size_t)>& callbacks) {
    if (max_parallel < 1) throw UsageError("run_many: max_parallel must be >= 1");
    std::vector<RunResult> results(configs.size());
    std::atomic<size_t> next{0};

    auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            try {
                results[i] = run_task(configs[i], nullptr, callbacks ? callbacks(i) : IterationCallback{});
            } catch (const std::exception& e) {
                results[i].error = e.what();
                results[i].state.status = {TaskStatus::Phase::stopped, "error"};
            }
        }
    };

    const size_t n_threads = std::min(static_cast<size_t>(max_parallel), configs.size());
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return results;
}

}  // namespace ease
