#include "ease/analysis.hpp"

#include "ease/errors.hpp"
#include "ease/validation.hpp"

namespace ease {
namespace {

double count_lines(const std::string& text) {
    if (text.empty()) return 0;
    double lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    if (text.back() != '\n') ++lines;
    return lines;
}

}  // namespace

std::string run_llm_analysis(const SolutionArtifact& artifact, const std::string& prompt_template,
                             Generator& generator) {
    if (prompt_template.find("{solution}") == std::string::npos)
        throw UsageError("llm_analysis template must contain {solution}");
    const std::string prompt = render_template(prompt_template, "solution", artifact.content);
    const Message turn = make_message(Role::user, MessageKind::repeating, prompt);
    return generator.generate({turn}).message.content;
}

AnalyzerSet::AnalyzerSet(std::vector<AnalyzerSpec> specs) : specs_(std::move(specs)) {
    for (const auto& spec : specs_) {
        generators_.push_back(spec.kind == AnalyzerSpec::Kind::llm_analysis
                                  ? make_generator(spec.generator)
                                  : nullptr);
    }
}

AnalysisReport AnalyzerSet::analyze(const SolutionArtifact& artifact) {
    AnalysisReport report;
    for (size_t i = 0; i < specs_.size(); ++i) {
        const auto& spec = specs_[i];
        AnalysisValue value;
        switch (spec.kind) {
            case AnalyzerSpec::Kind::line_count:
                value = count_lines(artifact.content);
                break;
            case AnalyzerSpec::Kind::char_count:
                value = static_cast<double>(artifact.content.size());
                break;
            case AnalyzerSpec::Kind::token_estimate:
                value = static_cast<double>(estimate_tokens(artifact.content));
                break;
            case AnalyzerSpec::Kind::keyword_presence: {
                bool all = true;
                for (const auto& keyword : spec.keywords)
                    if (artifact.content.find(keyword) == std::string::npos) all = false;
                value = all;
                break;
            }
            case AnalyzerSpec::Kind::llm_analysis:
                try {
                    value = run_llm_analysis(artifact, spec.prompt_template, *generators_[i]);
                } catch (const ConnectorError&) {
                    value = std::string("error:generator_failure");
                } catch (const ScriptExhaustedError&) {
                    value = std::string("error:generator_failure");
                }
                break;
        }
        report.entries[spec.output_key] = std::move(value);
    }
    return report;
}

AnalysisReport analyze(const SolutionArtifact& artifact, const std::vector<AnalyzerSpec>& specs) {
    AnalyzerSet set(specs);
    return set.analyze(artifact);
}

}  // namespace ease
