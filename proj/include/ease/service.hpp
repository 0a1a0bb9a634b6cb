#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "ease/orchestrator.hpp"

namespace ease {

/// In-memory task registry: creates tasks from config documents, runs them
/// on a bounded pool, snapshots state per iteration, and answers the REST
/// queries. Thread-safe; request handlers never block on task completion.
class TaskService {
public:
    explicit TaskService(int max_parallel = 4);
    ~TaskService();

    TaskService(const TaskService&) = delete;
    TaskService& operator=(const TaskService&) = delete;

    /// Parses + validates the config and starts the task asynchronously.
    /// Throws ParseError / ConfigError.
    std::string create_task(const nlohmann::json& config_doc);

    nlohmann::ordered_json list_tasks() const;
    std::optional<nlohmann::ordered_json> task_summary(const std::string& id) const;
    std::optional<nlohmann::ordered_json> task_iterations(const std::string& id) const;

    enum class StatsOutcome { ok, not_found, not_finished };
    StatsOutcome task_statistics(const std::string& id, nlohmann::ordered_json& out) const;

    /// Requests a cooperative stop at the next iteration boundary.
    bool stop_task(const std::string& id);

    /// Blocks until every submitted task's loop has returned.
    void wait_all();

private:
    struct Entry {
        std::string id;
        TaskConfig config;
        std::shared_ptr<TaskHandle> handle = std::make_shared<TaskHandle>();
        std::thread worker;

        mutable std::mutex mutex;  // guards snapshot + result
        TaskState snapshot;
        std::optional<RunResult> result;
    };

    nlohmann::ordered_json summary_locked(const Entry& entry) const;

    mutable std::mutex registry_mutex_;
    std::map<std::string, std::unique_ptr<Entry>> entries_;
    int next_id_ = 1;
    std::counting_semaphore<256> slots_;
};

/// HTTP front for a TaskService. Routes:
///   POST /tasks               -> 201 {"id": ...} | 400 {"error": ...}
///   GET  /tasks               -> 200 [summary...]
///   GET  /tasks/{id}          -> 200 summary | 404
///   GET  /tasks/{id}/iterations -> 200 [iteration...] | 404
///   GET  /tasks/{id}/statistics -> 200 report | 404 | 409 until the run ends
///   POST /tasks/{id}/stop     -> 202 {"id": ...} | 404
class HttpFront {
public:
    explicit HttpFront(TaskService& service);
    ~HttpFront();

    /// Binds to host:port (port 0 picks a free one). Returns false when the
    /// port is taken.
    bool bind(const std::string& host, int port);
    int port() const { return port_; }

    void run();    // blocking
    void start();  // serve on a background thread
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
    std::thread server_thread_;
};

}  // namespace ease
