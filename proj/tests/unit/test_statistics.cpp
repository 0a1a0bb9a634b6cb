#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ease/errors.hpp"
#include "ease/statistics.hpp"

using namespace ease;

namespace {
IterationRecord scored(int index, double score, long tokens = 10, long wall_ms = 1000) {
    IterationRecord r;
    r.index = index;
    r.valid = true;
    SolutionArtifact a;
    a.id = "artifact-" + std::to_string(index);
    r.artifact = a;
    EvaluationResult e;
    e.score = score;
    r.evaluation = e;
    r.generator_meta.tokens_prompt = tokens / 2;
    r.generator_meta.tokens_completion = tokens - tokens / 2;
    r.wall_time = Duration(wall_ms);
    return r;
}

IterationRecord failed(int index, std::vector<TestFailure> failures, long tokens = 4) {
    IterationRecord r;
    r.index = index;
    r.valid = false;
    r.test.passed = false;
    r.test.failures = std::move(failures);
    r.generator_meta.tokens_completion = tokens;
    r.wall_time = Duration(500);
    return r;
}

TaskState state_of(std::vector<IterationRecord> records) {
    TaskState state;
    state.iterations = std::move(records);
    state.counters = recompute_counters(state.iterations);
    return state;
}
}  // namespace

TEST_CASE("summarize: best is the first maximum and ties keep the earlier iteration") {
    const auto report = summarize(state_of({scored(1, 7), scored(2, 8), scored(3, 7),
                                            scored(4, 8)}));
    REQUIRE(report.best.has_value());
    CHECK(report.best->score == 8);
    CHECK(report.best->iteration == 2);
    CHECK(report.best->artifact_id == "artifact-2");
}

TEST_CASE("summarize: no scored iteration means no best") {
    const auto report = summarize(state_of({failed(1, {{"t", "c", "d"}})}));
    CHECK_FALSE(report.best.has_value());
}

TEST_CASE("summarize: progression has one point per iteration, null when unscored") {
    const auto report =
        summarize(state_of({scored(1, 5), failed(2, {{"syntax", "syntax", "boom"}}),
                            scored(3, 6)}));
    REQUIRE(report.progression.size() == 3);
    CHECK(report.progression[0].score == 5.0);
    CHECK_FALSE(report.progression[1].score.has_value());
    CHECK(report.progression[2].score == 6.0);
    CHECK(report.progression[1].iteration == 2);
}

TEST_CASE("summarize: error distribution counts failure classes of invalid iterations") {
    const auto report = summarize(state_of({
        failed(1, {{"syntax", "syntax", "a"}, {"keywords", "missing_keyword", "b"}}),
        failed(2, {{"syntax", "syntax", "c"}}),
        scored(3, 1),
    }));
    CHECK(report.error_distribution.at("syntax") == 2);
    CHECK(report.error_distribution.at("missing_keyword") == 1);
    CHECK(report.error_distribution.size() == 2);
}

TEST_CASE("summarize: usage totals add up") {
    const auto report = summarize(state_of({scored(1, 5, 100, 1000), failed(2, {{"t", "c", "d"}}, 50)}));
    CHECK(report.tokens_total == 150);
    CHECK(report.wall_ms_total == 1500);
    REQUIRE(report.per_iteration.size() == 2);
    CHECK(report.per_iteration[0].tokens == 100);
    CHECK(report.per_iteration[1].tokens == 50);
    CHECK(report.per_iteration[1].wall_ms == 500);
}

TEST_CASE("summarize_iteration carries failures and evaluation errors") {
    auto bad = failed(2, {{"syntax", "syntax", "boom"}});
    auto s = summarize_iteration(bad);
    CHECK(s.index == 2);
    CHECK_FALSE(s.valid);
    CHECK_FALSE(s.artifact_id.has_value());
    REQUIRE(s.errors.size() == 1);
    CHECK(s.errors[0].error_class == "syntax");

    auto good = scored(3, 9);
    good.evaluation_error = "judge exhausted";
    good.evaluation.reset();
    auto gs = summarize_iteration(good);
    CHECK(gs.valid);
    CHECK(gs.artifact_id == "artifact-3");
    CHECK_FALSE(gs.score.has_value());
    CHECK(gs.evaluation_error == "judge exhausted");
}

TEST_CASE("report JSON has the documented stable key order") {
    const auto report = summarize(state_of({scored(1, 7)}));
    const auto doc = report_to_json(report);
    std::vector<std::string> keys;
    for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"best", "error_distribution", "history",
                                           "progression", "usage"});
    CHECK(doc["usage"]["tokens_total"] == 10);
    CHECK(doc["usage"]["per_iteration"].size() == 1);
    CHECK(doc["best"]["iteration"] == 1);
}

TEST_CASE("report JSON round-trips") {
    const auto report = summarize(state_of({
        scored(1, 7),
        failed(2, {{"syntax", "syntax", "boom"}}),
        scored(3, 8.25),
    }));
    const auto doc = report_to_json(report);
    const auto back = report_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back == report);
}

TEST_CASE("report_from_json rejects malformed documents") {
    CHECK_THROWS_AS(report_from_json(nlohmann::json::parse("{\"best\": 5}")), ParseError);
    CHECK_THROWS_AS(report_from_json(nlohmann::json::parse("[]")), ParseError);
}

TEST_CASE("CSV export renders the documented header and empty score cells") {
    const auto report =
        summarize(state_of({scored(1, 7, 10, 1000), failed(2, {{"t", "c", "d"}}, 4)}));
    const std::string csv = report_to_csv(report);
    CHECK(csv ==
          "iteration,valid,score,tokens,wall_ms\n"
          "1,true,7,10,1000\n"
          "2,false,,4,500\n");
}

TEST_CASE("export_report writes files and names the path on failure") {
    const auto report = summarize(state_of({scored(1, 7)}));
    const auto dir = std::filesystem::temp_directory_path() / "ease-stats-test";
    std::filesystem::create_directories(dir);

    export_report(report, ExportFormat::json, dir / "statistics.json");
    std::ifstream in(dir / "statistics.json");
    nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc["best"]["score"] == 7.0);

    export_report(report, ExportFormat::csv, dir / "statistics.csv");
    CHECK(std::filesystem::file_size(dir / "statistics.csv") > 0);

    CHECK_THROWS_AS(
        export_report(report, ExportFormat::json, dir / "no-such-dir" / "statistics.json"),
        IoError);
    try {
        export_report(report, ExportFormat::json, dir / "no-such-dir" / "statistics.json");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("statistics.json") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}
