#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ease/errors.hpp"
#include "ease/validation.hpp"

using namespace ease;

namespace {
SolutionArtifact text_artifact(std::string content) {
    SolutionArtifact a;
    a.id = "test-artifact";
    a.type = SolutionType::text;
    a.content = std::move(content);
    return a;
}

SolutionArtifact python_artifact(std::string content) {
    SolutionArtifact a = text_artifact(std::move(content));
    a.type = SolutionType::code;
    a.language_id = "python";
    return a;
}

TestSpec keyword_test(std::vector<std::string> required, std::vector<std::string> forbidden) {
    TestSpec t;
    t.name = "keywords";
    t.kind = TestSpec::Kind::keyword;
    t.required = std::move(required);
    t.forbidden = std::move(forbidden);
    t.feedback_template = "Keyword problem: {detail}";
    return t;
}

TestSpec syntax_check() {
    TestSpec t;
    t.name = "syntax";
    t.kind = TestSpec::Kind::external_check;
    t.command = "python3 -c \"import ast,sys; ast.parse(open(sys.argv[1]).read())\" {file}";
    t.timeout = std::chrono::milliseconds(10000);
    t.feedback_template = "The code does not parse as Python: {detail}";
    return t;
}

TestSpec extraction_test() {
    TestSpec t;
    t.name = "has_code";
    t.kind = TestSpec::Kind::code_extraction;
    t.language_id = "python";
    t.feedback_template = "Reply with a single code block. {detail}";
    return t;
}
}  // namespace

TEST_CASE("extract_code prefers the tagged fence") {
    const std::string raw =
        "Intro.\n```\nplain\n```\nMore.\n```python\nprint('hi')\n```\nBye.\n";
    CHECK(extract_code(raw, "python") == "print('hi')");
}

TEST_CASE("extract_code falls back to the first untagged fence") {
    const std::string raw = "Text\n```\nbody line\n```\ntail";
    CHECK(extract_code(raw, "python") == "body line");
}

TEST_CASE("extract_code falls back to the raw text when no fences exist") {
    CHECK(extract_code("no fences here", "python") == "no fences here");
}

TEST_CASE("extract_code picks the first of several tagged fences") {
    const std::string raw = "```python\nfirst\n```\n```python\nsecond\n```\n";
    CHECK(extract_code(raw, "python") == "first");
}

TEST_CASE("extract_code ignores fences tagged with other languages") {
    const std::string raw = "```js\nlet x;\n```\n";
    CHECK(extract_code(raw, "python") == raw);
    CHECK(extract_code(raw, "js") == "let x;");
}

TEST_CASE("make_artifact types the reply as code when extraction is configured") {
    const std::string raw = "Here you go:\n```python\nx = 1\n```\n";
    const auto artifact = make_artifact(raw, {extraction_test()}, 3, "id-1",
                                        Timestamp(std::chrono::milliseconds(7)));
    CHECK(artifact.type == SolutionType::code);
    CHECK(artifact.language_id == "python");
    CHECK(artifact.content == "x = 1");
    CHECK(artifact.id == "id-1");
    CHECK(artifact.iteration_index == 3);

    const auto text = make_artifact(raw, {keyword_test({"x"}, {})}, 1, "id-2", {});
    CHECK(text.type == SolutionType::text);
    CHECK(text.content == raw);
}

TEST_CASE("keyword test aggregates all missing keywords into one failure") {
    const auto artifact = text_artifact("the quick brown fox");
    const auto outcome = run_tests(artifact, {keyword_test({"quick", "slow", "lazy"}, {})});
    CHECK_FALSE(outcome.passed);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].test_name == "keywords");
    CHECK(outcome.failures[0].error_class == "missing_keyword");
    CHECK(outcome.failures[0].detail.find("slow") != std::string::npos);
    CHECK(outcome.failures[0].detail.find("lazy") != std::string::npos);
    CHECK(outcome.failures[0].detail.find("quick") == std::string::npos);
}

TEST_CASE("keyword test reports forbidden keywords") {
    const auto artifact = text_artifact("uses eval() here");
    const auto outcome = run_tests(artifact, {keyword_test({}, {"eval", "exec"})});
    CHECK_FALSE(outcome.passed);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].error_class == "forbidden_keyword");
    CHECK(outcome.failures[0].detail.find("eval") != std::string::npos);
    CHECK(outcome.failures[0].detail.find("exec") == std::string::npos);
}

TEST_CASE("keyword test passes when all constraints hold") {
    const auto artifact = text_artifact("def move(): return 'left'");
    const auto outcome = run_tests(artifact, {keyword_test({"def", "return"}, {"eval"})});
    CHECK(outcome.passed);
    CHECK(outcome.failures.empty());
}

TEST_CASE("external check passes and fails by exit code") {
    const auto good = run_tests(python_artifact("x = 1\n"), {syntax_check()});
    CHECK(good.passed);

    const auto bad = run_tests(python_artifact("def broken(:\n"), {syntax_check()});
    CHECK_FALSE(bad.passed);
    REQUIRE(bad.failures.size() == 1);
    CHECK(bad.failures[0].test_name == "syntax");
    CHECK(bad.failures[0].error_class == "syntax");
    CHECK_FALSE(bad.failures[0].detail.empty());
}

TEST_CASE("external check classifies timeouts") {
    TestSpec t;
    t.name = "slowpoke";
    t.kind = TestSpec::Kind::external_check;
    t.command = "sleep 30";
    t.timeout = std::chrono::milliseconds(150);
    t.feedback_template = "check timed out: {detail}";
    const auto outcome = run_tests(python_artifact("x = 1\n"), {t});
    CHECK_FALSE(outcome.passed);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].error_class == "timeout");
}

TEST_CASE("external check classifies unlaunchable tools") {
    TestSpec t;
    t.name = "missing_tool";
    t.kind = TestSpec::Kind::external_check;
    t.command = "/definitely/not/a/binary {file}";
    t.feedback_template = "tool failed: {detail}";
    const auto outcome = run_tests(python_artifact("x = 1\n"), {t});
    CHECK_FALSE(outcome.passed);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].error_class == "tool_unavailable");
}

TEST_CASE("external check honors pass_exit_code") {
    TestSpec t;
    t.name = "wants_one";
    t.kind = TestSpec::Kind::external_check;
    t.command = "sh -c \"exit 1\"";
    t.pass_exit_code = 1;
    t.feedback_template = "{detail}";
    CHECK(run_tests(python_artifact("x\n"), {t}).passed);
}

TEST_CASE("code_extraction fails with no_code when nothing was extracted") {
    SolutionArtifact empty = python_artifact("   \n");
    const auto outcome = run_tests(empty, {extraction_test()});
    CHECK_FALSE(outcome.passed);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].error_class == "no_code");
}

TEST_CASE("tests run in order without short-circuiting") {
    const auto artifact = python_artifact("x = 1\n");
    const auto outcome =
        run_tests(artifact, {keyword_test({"not_present"}, {}), syntax_check()});
    CHECK_FALSE(outcome.passed);
    CHECK(outcome.failures.size() == 1);  // syntax passes, keyword fails

    const auto both =
        run_tests(python_artifact("def broken(:\n"),
                  {keyword_test({"not_present"}, {}), syntax_check()});
    REQUIRE(both.failures.size() == 2);
    CHECK(both.failures[0].test_name == "keywords");
    CHECK(both.failures[1].test_name == "syntax");
}

TEST_CASE("feedback_for renders each failing template once, joined by blank lines") {
    const auto suite = std::vector<TestSpec>{keyword_test({"needle"}, {}), syntax_check()};
    const auto outcome = run_tests(python_artifact("def broken(:\n"), suite);
    REQUIRE(outcome.failures.size() == 2);

    const std::string feedback = feedback_for(outcome, suite);
    CHECK(feedback.find("Keyword problem: ") != std::string::npos);
    CHECK(feedback.find("The code does not parse as Python: ") != std::string::npos);
    CHECK(feedback.find("\n\n") != std::string::npos);
    // Each template appears exactly once.
    CHECK(feedback.find("Keyword problem") == feedback.rfind("Keyword problem"));
}

TEST_CASE("feedback_for rejects passing outcomes") {
    const auto suite = std::vector<TestSpec>{keyword_test({"x"}, {})};
    const auto outcome = run_tests(text_artifact("x"), suite);
    CHECK(outcome.passed);
    CHECK_THROWS_AS(feedback_for(outcome, suite), UsageError);
}

TEST_CASE("feedback_for falls back to the bare detail for unknown tests") {
    TestOutcome outcome;
    outcome.passed = false;
    outcome.failures = {{"generator", "generator_failure", "connection refused"}};
    CHECK(feedback_for(outcome, {}) == "connection refused");
}

TEST_CASE("render_template replaces every placeholder occurrence") {
    CHECK(render_template("{x} and {x}", "x", "y") == "y and y");
    CHECK(render_template("no placeholder", "{x}", "y") == "no placeholder");
}

TEST_CASE("write_artifact_file picks an extension from the language") {
    const auto py = write_artifact_file(python_artifact("x = 1\n"));
    CHECK(py.extension() == ".py");
    std::ifstream in(py);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(body == "x = 1\n");
    std::filesystem::remove(py);

    const auto txt = write_artifact_file(text_artifact("hello"));
    CHECK(txt.extension() == ".txt");
    std::filesystem::remove(txt);
}

TEST_CASE("write_artifact_file produces unique paths for identical ids") {
    const auto a = write_artifact_file(python_artifact("x\n"));
    const auto b = write_artifact_file(python_artifact("x\n"));
    CHECK(a != b);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}
