#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ease/config_io.hpp"
#include "ease/errors.hpp"
#include "ease/orchestrator.hpp"
#include "ease/service.hpp"
#include "ease/statistics.hpp"

namespace fs = std::filesystem;

namespace {

fs::path task_dir(const fs::path& out_dir, std::size_t index, std::size_t n_tasks) {
    if (n_tasks == 1) return out_dir;
    return out_dir / ("task-" + std::to_string(index + 1));
}

void write_iteration_snapshot(const fs::path& dir, const ease::TaskState& state) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& record : state.iterations)
        doc.push_back(ease::iteration_summary_to_json(ease::summarize_iteration(record)));
    std::ofstream out(dir / "iterations.json", std::ios::trunc);
    out << doc.dump(2) << "\n";
}

std::string describe(const ease::RunResult& result) {
    const auto& state = result.state;
    std::string line = to_string(state.status.phase);
    if (!state.status.reason.empty()) line += " (" + state.status.reason + ")";
    line += " iterations=" + std::to_string(state.counters.total);
    line += " valid=" + std::to_string(state.counters.valid);
    line += " tokens=" + std::to_string(state.counters.tokens_used);
    if (state.incumbent_best && state.incumbent_best->second.score)
        line += " best=" + ease::format_score(*state.incumbent_best->second.score);
    return line;
}

int run_tasks(const std::vector<std::string>& config_paths, const std::string& out_dir,
              std::optional<std::uint64_t> seed, int max_parallel) {
    std::vector<ease::TaskConfig> configs;
    configs.reserve(config_paths.size());
    for (const auto& path : config_paths) {
        try {
            configs.push_back(ease::load_config(path));
        } catch (const ease::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        if (seed) configs.back().seed = *seed;
    }

    std::function<ease::IterationCallback(std::size_t)> callbacks;
    if (!out_dir.empty()) {
        for (std::size_t i = 0; i < configs.size(); ++i)
            fs::create_directories(task_dir(out_dir, i, configs.size()));
        callbacks = [&](std::size_t i) -> ease::IterationCallback {
            const fs::path dir = task_dir(out_dir, i, configs.size());
            return [dir](const ease::TaskState& state) { write_iteration_snapshot(dir, state); };
        };
    }

    const auto results = ease::run_many(configs, max_parallel, callbacks);

    bool all_finished = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& result = results[i];
        std::cout << config_paths[i] << ": " << describe(result) << "\n";
        if (result.error) std::cerr << config_paths[i] << ": error: " << *result.error << "\n";
        if (result.state.status.phase != ease::TaskStatus::Phase::finished) all_finished = false;
        if (!out_dir.empty()) {
            const fs::path dir = task_dir(out_dir, i, configs.size());
            ease::export_report(result.statistics, ease::ExportFormat::json, dir / "statistics.json");
            ease::export_report(result.statistics, ease::ExportFormat::csv, dir / "statistics.csv");
        }
    }
    return all_finished ? 0 : 2;
}

int serve_api(const std::string& host, int port, int max_parallel) {
    ease::TaskService service(max_parallel);
    ease::HttpFront front(service);
    if (!front.bind(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    std::cout << "listening on http://" << host << ":" << front.port() << "\n";
    front.run();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ease: iterative generate-test-evaluate refinement engine"};
    app.require_subcommand(1);

    std::vector<std::string> config_paths;
    std::string out_dir;
    std::uint64_t seed = 0;
    int max_parallel = 4;

    auto* run = app.add_subcommand("run", "Run task configs to completion and export statistics");
    run->add_option("config", config_paths, "Task config file(s)")->required();
    run->add_option("--out", out_dir, "Directory for statistics exports");
    auto* seed_opt = run->add_option("--seed", seed, "Override every task's seed");
    run->add_option("--max-parallel", max_parallel, "Concurrent task limit")
        ->check(CLI::PositiveNumber);

    std::string host = "127.0.0.1";
    int port = 8080;
    int serve_parallel = 4;
    auto* serve = app.add_subcommand("serve", "Serve the REST task API");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--max-parallel", serve_parallel, "Concurrent task limit")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            std::optional<std::uint64_t> seed_override;
            if (seed_opt->count() > 0) seed_override = seed;
            return run_tasks(config_paths, out_dir, seed_override, max_parallel);
        }
        return serve_api(host, port, serve_parallel);
    } catch (const ease::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
