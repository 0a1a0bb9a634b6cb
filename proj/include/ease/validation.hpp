#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ease/domain.hpp"

namespace ease {

struct TestSpec {
    enum class Kind { keyword, external_check, code_extraction };

    std::string name;
    Kind kind = Kind::keyword;

    // keyword
    std::vector<std::string> required;
    std::vector<std::string> forbidden;

    // external_check
    std::string command;  // template with {file} and {language} placeholders
    Duration timeout = std::chrono::milliseconds(10000);
    int pass_exit_code = 0;

    // code_extraction
    std::string language_id;

    std::string feedback_template;  // must contain {detail}? not required, but non-empty

    bool operator==(const TestSpec&) const = default;
};

/// First fenced block tagged `language_id`; else the first untagged fence;
/// else the raw text verbatim.
std::string extract_code(const std::string& raw, const std::string& language_id);

/// Builds the iteration's artifact from the generator's raw reply. A
/// code_extraction test in the suite types the artifact as code (with that
/// test's language) and stores the extracted body; otherwise it stays text.
SolutionArtifact make_artifact(const std::string& raw, const std::vector<TestSpec>& suite,
                               int iteration_index, std::string id, Timestamp created_at);

/// Runs every test in list order (no short-circuit); one failure entry per
/// failing test.
TestOutcome run_tests(const SolutionArtifact& artifact, const std::vector<TestSpec>& suite);

/// Concatenates the failing tests' feedback templates ({detail} substituted),
/// separated by blank lines, in failure order.
std::string feedback_for(const TestOutcome& outcome, const std::vector<TestSpec>& suite);

std::string render_template(const std::string& tmpl, const std::string& placeholder,
                            const std::string& value);

/// Writes the artifact body to a uniquely named temp file (extension chosen
/// from its language). Caller removes the file when done.
std::filesystem::path write_artifact_file(const SolutionArtifact& artifact);

}  // namespace ease
