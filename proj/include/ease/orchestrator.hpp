#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ease/statistics.hpp"
#include "ease/task.hpp"

namespace ease {

/// Cooperative stop flag; honored at iteration boundaries only.
class TaskHandle {
public:
    void request_stop() { stop_.store(true, std::memory_order_relaxed); }
    bool stop_requested() const { return stop_.load(std::memory_order_relaxed); }

private:
    std::atomic<bool> stop_{false};
};

struct RunResult {
    TaskState state;
    StatisticsReport statistics;
    std::optional<std::string> error;  // set when the task aborted exceptionally
};

using IterationCallback = std::function<void(const TaskState&)>;

/// True when every generator in the config (main, judge, analysis) is
/// scripted. Scripted + seeded tasks run on a virtual clock, which is what
/// makes their exports byte-identical.
bool fully_scripted(const TaskConfig& config);

/// Runs the loop to completion: compose prompt -> generate -> test ->
/// analyze -> evaluate -> update incumbent -> stopping check. Throws
/// ConfigError before the first iteration when validation fails.
RunResult run_task(const TaskConfig& config, TaskHandle* handle = nullptr,
                   const IterationCallback& on_iteration = {});

/// Runs tasks with at most max_parallel in flight; results are positional
/// and failures stay inside their own slot. `callbacks`, when set, maps a
/// task index to that task's per-iteration observer.
std::vector<RunResult> run_many(const std::vector<TaskConfig>& configs, int max_parallel,
                                const std::function<IterationCallback(std::size_t)>& callbacks = {});

}  // namespace ease
