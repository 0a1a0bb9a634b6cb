#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ease/domain.hpp"
#include "ease/generator.hpp"

namespace ease {

struct AnalyzerSpec {
    enum class Kind { line_count, char_count, token_estimate, keyword_presence, llm_analysis };

    Kind kind = Kind::line_count;
    std::string output_key;  // unique within a task's analyzer list

    // keyword_presence: true iff every keyword occurs in the artifact
    std::vector<std::string> keywords;

    // llm_analysis
    std::string prompt_template;  // must contain {solution}
    GeneratorSpec generator;

    bool operator==(const AnalyzerSpec&) const = default;
};

/// Sends one user turn (template with the artifact content substituted)
/// through a generator and returns the raw reply text.
std::string run_llm_analysis(const SolutionArtifact& artifact, const std::string& prompt_template,
                             Generator& generator);

/// Owns the analyzer list plus the persistent generator instances behind any
/// llm_analysis entries (so a scripted analysis generator advances across
/// iterations like a real conversation would).
class AnalyzerSet {
public:
    explicit AnalyzerSet(std::vector<AnalyzerSpec> specs);

    /// One entry per analyzer under its output_key; a failing analyzer
    /// records "error:<class>" instead of aborting.
    AnalysisReport analyze(const SolutionArtifact& artifact);

    const std::vector<AnalyzerSpec>& specs() const { return specs_; }

private:
    std::vector<AnalyzerSpec> specs_;
    std::vector<std::unique_ptr<Generator>> generators_;  // parallel to specs_, null if unused
};

/// Convenience for one-off analysis with fresh generator instances.
AnalysisReport analyze(const SolutionArtifact& artifact, const std::vector<AnalyzerSpec>& specs);

}  // namespace ease
