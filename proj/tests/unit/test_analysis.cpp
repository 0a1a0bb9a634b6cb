#include <doctest.h>

#include "ease/analysis.hpp"
#include "ease/errors.hpp"

using namespace ease;

namespace {
SolutionArtifact artifact_of(std::string content) {
    SolutionArtifact a;
    a.id = "a1";
    a.content = std::move(content);
    return a;
}

AnalyzerSpec simple(AnalyzerSpec::Kind kind, std::string key) {
    AnalyzerSpec spec;
    spec.kind = kind;
    spec.output_key = std::move(key);
    return spec;
}

GeneratorSpec scripted(std::vector<std::string> responses) {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::scripted;
    spec.responses = std::move(responses);
    return spec;
}
}  // namespace

TEST_CASE("line_count counts newline-separated lines") {
    const auto spec = simple(AnalyzerSpec::Kind::line_count, "lines");
    CHECK(std::get<double>(analyze(artifact_of("a\nb\nc\n"), {spec}).entries.at("lines")) == 3);
    CHECK(std::get<double>(analyze(artifact_of("a\nb\nc"), {spec}).entries.at("lines")) == 3);
    CHECK(std::get<double>(analyze(artifact_of(""), {spec}).entries.at("lines")) == 0);
    CHECK(std::get<double>(analyze(artifact_of("one"), {spec}).entries.at("lines")) == 1);
}

TEST_CASE("char_count and token_estimate") {
    const auto chars = simple(AnalyzerSpec::Kind::char_count, "chars");
    const auto tokens = simple(AnalyzerSpec::Kind::token_estimate, "tokens");
    const auto report = analyze(artifact_of("abcdefgh"), {chars, tokens});
    CHECK(std::get<double>(report.entries.at("chars")) == 8);
    CHECK(std::get<double>(report.entries.at("tokens")) == 2);
}

TEST_CASE("keyword_presence is true only when every keyword occurs") {
    AnalyzerSpec spec = simple(AnalyzerSpec::Kind::keyword_presence, "has_both");
    spec.keywords = {"def", "return"};
    CHECK(std::get<bool>(
        analyze(artifact_of("def f(): return 1"), {spec}).entries.at("has_both")));
    CHECK_FALSE(std::get<bool>(
        analyze(artifact_of("def f(): pass"), {spec}).entries.at("has_both")));
}

TEST_CASE("llm_analysis sends the substituted template and stores the reply") {
    AnalyzerSpec spec = simple(AnalyzerSpec::Kind::llm_analysis, "critique");
    spec.prompt_template = "Describe briefly:\n{solution}";
    spec.generator = scripted({"tight prose"});

    const auto report = analyze(artifact_of("story text"), {spec});
    CHECK(std::get<std::string>(report.entries.at("critique")) == "tight prose");
}

TEST_CASE("run_llm_analysis substitutes the artifact into the template") {
    ScriptedGenerator gen(scripted({"fine"}));
    const auto out = run_llm_analysis(artifact_of("BODY"), "Look: {solution} end", gen);
    CHECK(out == "fine");
    CHECK_THROWS_AS(run_llm_analysis(artifact_of("x"), "no placeholder", gen), UsageError);
}

TEST_CASE("AnalyzerSet keeps scripted generators advancing across calls") {
    AnalyzerSpec spec = simple(AnalyzerSpec::Kind::llm_analysis, "note");
    spec.prompt_template = "{solution}";
    spec.generator = scripted({"first", "second"});

    AnalyzerSet set({spec});
    CHECK(std::get<std::string>(set.analyze(artifact_of("a")).entries.at("note")) == "first");
    CHECK(std::get<std::string>(set.analyze(artifact_of("b")).entries.at("note")) == "second");
    // Third call exhausts the script; the analyzer soft-fails instead of
    // aborting the iteration.
    CHECK(std::get<std::string>(set.analyze(artifact_of("c")).entries.at("note")) ==
          "error:generator_failure");
}

TEST_CASE("multiple analyzers produce one entry each") {
    const auto report = analyze(artifact_of("x = 1\ny = 2\n"),
                                {simple(AnalyzerSpec::Kind::line_count, "lines"),
                                 simple(AnalyzerSpec::Kind::char_count, "chars")});
    CHECK(report.entries.size() == 2);
    CHECK(std::get<double>(report.entries.at("lines")) == 2);
    CHECK(std::get<double>(report.entries.at("chars")) == 12);
}
