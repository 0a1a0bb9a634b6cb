#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ease/task.hpp"

namespace ease {

struct IterationSummary {
    int index = 1;
    bool valid = false;
    std::optional<std::string> artifact_id;
    std::optional<double> score;
    std::optional<std::string> evaluation_error;
    std::vector<TestFailure> errors;
    long tokens = 0;
    long wall_ms = 0;

    bool operator==(const IterationSummary&) const = default;
};

struct BestSummary {
    std::string artifact_id;
    double score = 0;
    int iteration = 1;

    bool operator==(const BestSummary&) const = default;
};

struct ProgressionPoint {
    int iteration = 1;
    std::optional<double> score;  // absent for unscored iterations

    bool operator==(const ProgressionPoint&) const = default;
};

struct UsageRow {
    int iteration = 1;
    long tokens = 0;
    long wall_ms = 0;

    bool operator==(const UsageRow&) const = default;
};

struct StatisticsReport {
    std::vector<IterationSummary> history;
    std::optional<BestSummary> best;
    std::vector<ProgressionPoint> progression;  // length == counters.total
    std::map<std::string, long> error_distribution;
    long tokens_total = 0;
    long wall_ms_total = 0;
    std::vector<UsageRow> per_iteration;

    bool operator==(const StatisticsReport&) const = default;
};

/// Deterministic aggregation of a finished (or stopped) task's history.
StatisticsReport summarize(const TaskState& state);

enum class ExportFormat { json, csv };

/// Stable-key-order JSON document for the report.
nlohmann::ordered_json report_to_json(const StatisticsReport& report);

/// Inverse of report_to_json (round-trip checked property).
StatisticsReport report_from_json(const nlohmann::json& doc);

/// Progression table: header "iteration,valid,score,tokens,wall_ms", one row
/// per iteration, empty score cell when unscored.
std::string report_to_csv(const StatisticsReport& report);

/// Writes the report; errors carry the destination path.
void export_report(const StatisticsReport& report, ExportFormat format,
                   const std::filesystem::path& destination);

/// One-record summary, shared by the report and the REST iterations listing.
IterationSummary summarize_iteration(const IterationRecord& record);

nlohmann::ordered_json iteration_summary_to_json(const IterationSummary& summary);

}  // namespace ease
