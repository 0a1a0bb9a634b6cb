#include "ease/service.hpp"

#include <httplib.h>

#include "ease/config_io.hpp"
#include "ease/errors.hpp"
#include "ease/statistics.hpp"

namespace ease {

TaskService::TaskService(int max_parallel)
    : slots_(std::max(1, std::min(max_parallel, 256))) {}

TaskService::~TaskService() {
    {
        std::lock_guard lock(registry_mutex_);
        for (auto& [id, entry] : entries_) entry->handle->request_stop();
    }
    wait_all();
}

void TaskService::wait_all() {
    std::lock_guard lock(registry_mutex_);
    for (auto& [id, entry] : entries_)
        if (entry->worker.joinable()) entry->worker.join();
}

std::string TaskService::create_task(const nlohmann::json& config_doc) {
    TaskConfig config = parse_config(config_doc);
    if (auto violations = validate_config(config); !violations.empty())
        throw ConfigError(violations);

    std::lock_guard lock(registry_mutex_);
    auto entry = std::make_unique<Entry>();
    entry->id = "t" + std::to_string(next_id_++);
    entry->config = std::move(config);
    Entry* raw = entry.get();
    entry->worker = std::thread([this, raw] {
        slots_.acquire();
        RunResult result;
        try {
            result = run_task(raw->config, raw->handle.get(), [raw](const TaskState& state) {
                std::lock_guard guard(raw->mutex);
                raw->snapshot = state;
            });
        } catch (const std::exception& e) {
            result.error = e.what();
            result.state.status = {TaskStatus::Phase::stopped, "error"};
        }
        {
            std::lock_guard guard(raw->mutex);
            raw->snapshot = result.state;
            raw->result = std::move(result);
        }
        slots_.release();
    });
    const std::string id = entry->id;
    entries_.emplace(id, std::move(entry));
    return id;
}

nlohmann::ordered_json TaskService::summary_locked(const Entry& entry) const {
    const TaskState& state = entry.result ? entry.result->state : entry.snapshot;
    nlohmann::ordered_json out;
    out["id"] = entry.id;
    out["status"] = to_string(state.status.phase);
    out["reason"] = state.status.reason;
    out["iterations"] = state.counters.total;
    out["valid"] = state.counters.valid;
    out["tokens_used"] = state.counters.tokens_used;
    out["started_at"] = format_timestamp(state.started_at);
    if (state.incumbent_best) {
        out["best"] = {{"artifact_id", state.incumbent_best->first},
                       {"score", state.incumbent_best->second.score.value_or(0)}};
    } else {
        out["best"] = nullptr;
    }
    if (entry.result && entry.result->error) {
        out["error"] = *entry.result->error;
    } else {
        out["error"] = nullptr;
    }
    return out;
}

nlohmann::ordered_json TaskService::list_tasks() const {
    std::lock_guard lock(registry_mutex_);
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& [id, entry] : entries_) {
        std::lock_guard guard(entry->mutex);
        out.push_back(summary_locked(*entry));
    }
    return out;
}

std::optional<nlohmann::ordered_json> TaskService::task_summary(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    std::lock_guard guard(it->second->mutex);
    return summary_locked(*it->second);
}

std::optional<nlohmann::ordered_json> TaskService::task_iterations(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    std::lock_guard guard(it->second->mutex);
    const TaskState& state =
        it->second->result ? it->second->result->state : it->second->snapshot;
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& record : state.iterations)
        out.push_back(iteration_summary_to_json(summarize_iteration(record)));
    return out;
}

TaskService::StatsOutcome TaskService::task_statistics(const std::string& id,
                                                       nlohmann::ordered_json& out) const {
    std::lock_guard lock(registry_mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return StatsOutcome::not_found;
    std::lock_guard guard(it->second->mutex);
    if (!it->second->result) return StatsOutcome::not_finished;
    out = report_to_json(it->second->result->statistics);
    return StatsOutcome::ok;
}

bool TaskService::stop_task(const std::string& id) {
    std::lock_guard lock(registry_mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return false;
    it->second->handle->request_stop();
    return true;
}

// ---------------------------------------------------------------------------
// HTTP front
// ---------------------------------------------------------------------------

struct HttpFront::Impl {
    explicit Impl(TaskService& service) : service(service) {
        // SO_REUSEADDR only: the library default adds SO_REUSEPORT, which
        // would let two fronts listen on one port instead of failing bind().
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                       reinterpret_cast<const void*>(&yes), sizeof(yes));
        });
        wire();
    }

    void wire() {
        static const std::string kJson = "application/json";
        auto send = [](httplib::Response& res, int status, const nlohmann::ordered_json& body) {
            res.status = status;
            res.set_content(body.dump(2) + "\n", kJson);
        };
        auto not_found = [send](httplib::Response& res) {
            send(res, 404, {{"error", "unknown task id"}});
        };

        server.Post("/tasks", [this, send](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json doc = nlohmann::json::parse(req.body, nullptr, false);
            if (doc.is_discarded()) {
                send(res, 400, {{"error", "request body is not valid JSON"}});
                return;
            }
            try {
                send(res, 201, {{"id", service.create_task(doc)}});
            } catch (const Error& e) {
                send(res, 400, {{"error", e.what()}});
            }
        });

        server.Get("/tasks", [this, send](const httplib::Request&, httplib::Response& res) {
            send(res, 200, service.list_tasks());
        });

        server.Get(R"(/tasks/([^/]+)/iterations)",
                   [this, send, not_found](const httplib::Request& req, httplib::Response& res) {
                       if (auto doc = service.task_iterations(req.matches[1])) {
                           send(res, 200, *doc);
                       } else {
                           not_found(res);
                       }
                   });

        server.Get(R"(/tasks/([^/]+)/statistics)",
                   [this, send, not_found](const httplib::Request& req, httplib::Response& res) {
                       nlohmann::ordered_json doc;
                       switch (service.task_statistics(req.matches[1], doc)) {
                           case TaskService::StatsOutcome::ok:
                               send(res, 200, doc);
                               break;
                           case TaskService::StatsOutcome::not_finished:
                               send(res, 409, {{"error", "task is still running"}});
                               break;
                           case TaskService::StatsOutcome::not_found:
                               not_found(res);
                               break;
                       }
                   });

        server.Post(R"(/tasks/([^/]+)/stop)",
                    [this, send, not_found](const httplib::Request& req, httplib::Response& res) {
                        if (service.stop_task(req.matches[1])) {
                            send(res, 202, {{"id", std::string(req.matches[1])}});
                        } else {
                            not_found(res);
                        }
                    });

        server.Get(R"(/tasks/([^/]+))",
                   [this, send, not_found](const httplib::Request& req, httplib::Response& res) {
                       if (auto doc = service.task_summary(req.matches[1])) {
                           send(res, 200, *doc);
                       } else {
                           not_found(res);
                       }
                   });
    }

    TaskService& service;
    httplib::Server server;
};

HttpFront::HttpFront(TaskService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpFront::~HttpFront() { stop(); }

bool HttpFront::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        return port_ > 0;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

void HttpFront::run() { impl_->server.listen_after_bind(); }

void HttpFront::start() {
    server_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpFront::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace ease
