#include "ease/statistics.hpp"

#include <fstream>

#include "ease/errors.hpp"

namespace ease {

IterationSummary summarize_iteration(const IterationRecord& record) {
    IterationSummary out;
    out.index = record.index;
    out.valid = record.valid;
    if (record.artifact) out.artifact_id = record.artifact->id;
    if (record.evaluation && record.evaluation->score) out.score = *record.evaluation->score;
    out.evaluation_error = record.evaluation_error;
    out.errors = record.test.failures;
    out.tokens = record.generator_meta.tokens_prompt + record.generator_meta.tokens_completion;
    out.wall_ms = record.wall_time.count();
    return out;
}

StatisticsReport summarize(const TaskState& state) {
    StatisticsReport report;
    for (const auto& record : state.iterations) {
        IterationSummary summary = summarize_iteration(record);
        report.progression.push_back({summary.index, summary.score});
        report.per_iteration.push_back({summary.index, summary.tokens, summary.wall_ms});
        report.tokens_total += summary.tokens;
        report.wall_ms_total += summary.wall_ms;
        if (!record.valid)
            for (const auto& failure : record.test.failures)
                ++report.error_distribution[failure.error_class];
        if (summary.score && summary.artifact_id &&
            (!report.best || *summary.score > report.best->score))
            report.best = BestSummary{*summary.artifact_id, *summary.score, summary.index};
        report.history.push_back(std::move(summary));
    }
    return report;
}

namespace {

nlohmann::ordered_json nullable_number(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

nlohmann::ordered_json nullable_text(const std::optional<std::string>& v) {
    if (v) return *v;
    return nullptr;
}

}  // namespace

nlohmann::ordered_json iteration_summary_to_json(const IterationSummary& summary) {
    nlohmann::ordered_json errors = nlohmann::ordered_json::array();
    for (const auto& failure : summary.errors)
        errors.push_back({{"test", failure.test_name},
                          {"class", failure.error_class},
                          {"detail", failure.detail}});
    return {{"index", summary.index},
            {"valid", summary.valid},
            {"artifact_id", nullable_text(summary.artifact_id)},
            {"score", nullable_number(summary.score)},
            {"evaluation_error", nullable_text(summary.evaluation_error)},
            {"errors", std::move(errors)},
            {"tokens", summary.tokens},
            {"wall_ms", summary.wall_ms}};
}

nlohmann::ordered_json report_to_json(const StatisticsReport& report) {
    nlohmann::ordered_json doc;

    if (report.best) {
        doc["best"] = {{"artifact_id", report.best->artifact_id},
                       {"score", report.best->score},
                       {"iteration", report.best->iteration}};
    } else {
        doc["best"] = nullptr;
    }

    doc["error_distribution"] = nlohmann::ordered_json::object();
    for (const auto& [error_class, count] : report.error_distribution)
        doc["error_distribution"][error_class] = count;

    doc["history"] = nlohmann::ordered_json::array();
    for (const auto& item : report.history) doc["history"].push_back(iteration_summary_to_json(item));

    doc["progression"] = nlohmann::ordered_json::array();
    for (const auto& point : report.progression)
        doc["progression"].push_back(
            {{"iteration", point.iteration}, {"score", nullable_number(point.score)}});

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : report.per_iteration)
        rows.push_back(
            {{"iteration", row.iteration}, {"tokens", row.tokens}, {"wall_ms", row.wall_ms}});
    doc["usage"] = {{"tokens_total", report.tokens_total},
                    {"wall_ms_total", report.wall_ms_total},
                    {"per_iteration", std::move(rows)}};
    return doc;
}

StatisticsReport report_from_json(const nlohmann::json& doc) {
    StatisticsReport report;
    try {
        if (!doc.at("best").is_null()) {
            const auto& best = doc.at("best");
            report.best = BestSummary{best.at("artifact_id").get<std::string>(),
                                      best.at("score").get<double>(),
                                      best.at("iteration").get<int>()};
        }
        for (const auto& [error_class, count] : doc.at("error_distribution").items())
            report.error_distribution[error_class] = count.get<long>();
        for (const auto& item : doc.at("history")) {
            IterationSummary summary;
            summary.index = item.at("index").get<int>();
            summary.valid = item.at("valid").get<bool>();
            if (!item.at("artifact_id").is_null())
                summary.artifact_id = item.at("artifact_id").get<std::string>();
            if (!item.at("score").is_null()) summary.score = item.at("score").get<double>();
            if (!item.at("evaluation_error").is_null())
                summary.evaluation_error = item.at("evaluation_error").get<std::string>();
            for (const auto& failure : item.at("errors"))
                summary.errors.push_back(TestFailure{failure.at("test").get<std::string>(),
                                                     failure.at("class").get<std::string>(),
                                                     failure.at("detail").get<std::string>()});
            summary.tokens = item.at("tokens").get<long>();
            summary.wall_ms = item.at("wall_ms").get<long>();
            report.history.push_back(std::move(summary));
        }
        for (const auto& point : doc.at("progression")) {
            ProgressionPoint p;
            p.iteration = point.at("iteration").get<int>();
            if (!point.at("score").is_null()) p.score = point.at("score").get<double>();
            report.progression.push_back(p);
        }
        const auto& usage = doc.at("usage");
        report.tokens_total = usage.at("tokens_total").get<long>();
        report.wall_ms_total = usage.at("wall_ms_total").get<long>();
        for (const auto& row : usage.at("per_iteration"))
            report.per_iteration.push_back(UsageRow{row.at("iteration").get<int>(),
                                                    row.at("tokens").get<long>(),
                                                    row.at("wall_ms").get<long>()});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("statistics document malformed: ") + e.what());
    }
    return report;
}

std::string report_to_csv(const StatisticsReport& report) {
    std::string out = "iteration,valid,score,tokens,wall_ms\n";
    for (size_t i = 0; i < report.progression.size(); ++i) {
        const auto& point = report.progression[i];
        const auto& item = report.history[i];
        out += std::to_string(point.iteration);
        out += item.valid ? ",true," : ",false,";
        if (point.score) out += format_score(*point.score);
        out += "," + std::to_string(item.tokens);
        out += "," + std::to_string(item.wall_ms);
        out += "\n";
    }
    return out;
}

void export_report(const StatisticsReport& report, ExportFormat format,
                   const std::filesystem::path& destination) {
    std::string payload;
    if (format == ExportFormat::json) {
        payload = report_to_json(report).dump(2);
        payload += "\n";
    } else {
        payload = report_to_csv(report);
    }
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + destination.string());
    out << payload;
    if (!out.good()) throw IoError("write failed: " + destination.string());
}

}  // namespace ease
