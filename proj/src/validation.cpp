#include "ease/validation.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "ease/errors.hpp"
#include "ease/subprocess.hpp"

namespace ease {
namespace {

struct Fence {
    std::string tag;
    std::string body;
};

std::vector<Fence> parse_fences(const std::string& raw) {
    std::vector<Fence> fences;
    std::istringstream in(raw);
    std::string line;
    std::optional<Fence> open;
    while (std::getline(in, line)) {
        std::string stripped = line;
        if (!stripped.empty() && stripped.back() == '\r') stripped.pop_back();
        if (stripped.rfind("```", 0) == 0) {
            if (open) {
                if (!open->body.empty() && open->body.back() == '\n') open->body.pop_back();
                fences.push_back(std::move(*open));
                open.reset();
            } else {
                std::string tag = stripped.substr(3);
                while (!tag.empty() && (tag.back() == ' ' || tag.back() == '\t')) tag.pop_back();
                open = Fence{tag, ""};
            }
        } else if (open) {
            open->body += stripped;
            open->body += '\n';
        }
    }
    return fences;
}

std::string trim(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string file_extension(const std::string& language_id) {
    if (language_id == "python") return ".py";
    if (language_id == "javascript") return ".js";
    if (language_id.empty()) return ".txt";
    return "." + language_id;
}

std::string quote_list(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += "\"" + items[i] + "\"";
    }
    return out;
}

std::optional<TestFailure> run_keyword_test(const SolutionArtifact& artifact,
                                            const TestSpec& test) {
    std::vector<std::string> missing;
    for (const auto& keyword : test.required)
        if (artifact.content.find(keyword) == std::string::npos) missing.push_back(keyword);
    std::vector<std::string> present;
    for (const auto& keyword : test.forbidden)
        if (artifact.content.find(keyword) != std::string::npos) present.push_back(keyword);
    if (missing.empty() && present.empty()) return std::nullopt;

    std::string detail;
    if (!missing.empty()) detail = "missing required keyword(s): " + quote_list(missing);
    if (!present.empty()) {
        if (!detail.empty()) detail += "; ";
        detail += "found forbidden keyword(s): " + quote_list(present);
    }
    return TestFailure{test.name, missing.empty() ? "forbidden_keyword" : "missing_keyword",
                       detail};
}

std::optional<TestFailure> run_external_check(const SolutionArtifact& artifact,
                                              const TestSpec& test) {
    namespace fs = std::filesystem;
    fs::path path;
    try {
        path = write_artifact_file(artifact);
    } catch (const IoError& e) {
        return TestFailure{test.name, "tool_unavailable", e.what()};
    }
    std::optional<TestFailure> failure;
    try {
        auto argv = substitute_placeholders(split_command(test.command),
                                            {{"file", path.string()},
                                             {"language", artifact.language_id}});
        CommandResult result = run_command(argv, test.timeout);
        if (result.timed_out) {
            failure = TestFailure{test.name, "timeout",
                                  "check timed out after " +
                                      std::to_string(test.timeout.count()) + " ms"};
        } else if (result.spawn_failed) {
            failure = TestFailure{test.name, "tool_unavailable",
                                  "cannot run check command: " + (argv.empty() ? "" : argv[0])};
        } else if (result.exit_code != test.pass_exit_code) {
            std::string detail = trim(result.output);
            if (detail.empty())
                detail = "check exited with code " + std::to_string(result.exit_code);
            failure = TestFailure{test.name, test.name, detail};
        }
    } catch (const Error& e) {
        failure = TestFailure{test.name, "tool_unavailable", e.what()};
    }
    std::error_code ec;
    fs::remove(path, ec);
    return failure;
}

}  // namespace

std::filesystem::path write_artifact_file(const SolutionArtifact& artifact) {
    namespace fs = std::filesystem;
    // The counter keeps concurrently running tasks from colliding: identically
    // seeded tasks produce identical artifact ids by design.
    static std::atomic<unsigned> counter{0};
    const std::string name = "ease-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter.fetch_add(1)) +
                             (artifact.id.empty() ? "" : "-" + artifact.id) +
                             file_extension(artifact.language_id);
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write artifact to " + path.string());
    out << artifact.content;
    if (!out.good()) throw IoError("short write to " + path.string());
    return path;
}

std::string extract_code(const std::string& raw, const std::string& language_id) {
    const auto fences = parse_fences(raw);
    for (const auto& fence : fences)
        if (fence.tag == language_id && !language_id.empty()) return fence.body;
    for (const auto& fence : fences)
        if (fence.tag.empty()) return fence.body;
    return raw;
}

SolutionArtifact make_artifact(const std::string& raw, const std::vector<TestSpec>& suite,
                               int iteration_index, std::string id, Timestamp created_at) {
    SolutionArtifact artifact;
    artifact.id = std::move(id);
    artifact.iteration_index = iteration_index;
    artifact.created_at = created_at;
    artifact.type = SolutionType::text;
    artifact.content = raw;
    for (const auto& test : suite) {
        if (test.kind == TestSpec::Kind::code_extraction) {
            artifact.type = SolutionType::code;
            artifact.language_id = test.language_id;
            artifact.content = extract_code(raw, test.language_id);
            break;
        }
    }
    return artifact;
}

TestOutcome run_tests(const SolutionArtifact& artifact, const std::vector<TestSpec>& suite) {
    TestOutcome outcome;
    for (const auto& test : suite) {
        std::optional<TestFailure> failure;
        switch (test.kind) {
            case TestSpec::Kind::keyword:
                failure = run_keyword_test(artifact, test);
                break;
            case TestSpec::Kind::external_check:
                failure = run_external_check(artifact, test);
                break;
            case TestSpec::Kind::code_extraction:
                if (trim(artifact.content).empty())
                    failure = TestFailure{test.name, "no_code",
                                          "reply contains no extractable code"};
                break;
        }
        if (failure) outcome.failures.push_back(std::move(*failure));
    }
    outcome.passed = outcome.failures.empty();
    return outcome;
}

std::string render_template(const std::string& tmpl, const std::string& placeholder,
                            const std::string& value) {
    std::string out = tmpl;
    const std::string needle = "{" + placeholder + "}";
    size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
        out.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return out;
}

std::string feedback_for(const TestOutcome& outcome, const std::vector<TestSpec>& suite) {
    if (outcome.passed) throw UsageError("feedback_for: outcome has no failures");
    std::string out;
    for (const auto& failure : outcome.failures) {
        std::string tmpl = "{detail}";
        for (const auto& test : suite)
            if (test.name == failure.test_name && !test.feedback_template.empty()) {
                tmpl = test.feedback_template;
                break;
            }
        if (!out.empty()) out += "\n\n";
        out += render_template(tmpl, "detail", failure.detail);
    }
    return out;
}

}  // namespace ease
