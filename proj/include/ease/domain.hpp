#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ease/clock.hpp"
#include "ease/rng.hpp"

namespace ease {

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

enum class Role { system, user, assistant };

enum class MessageKind { initial, system, repeating, feedback, generated };

/// One chat turn; the unit of all generator I/O.
struct Message {
    Role role = Role::user;
    MessageKind kind = MessageKind::initial;
    std::string content;
    Timestamp timestamp{};

    bool operator==(const Message&) const = default;
};

/// Builds a Message and enforces its invariants: non-empty content for every
/// kind except generated, and role=system implies kind=system.
Message make_message(Role role, MessageKind kind, std::string content,
                     Timestamp timestamp = {});

std::string to_string(Role role);
std::string to_string(MessageKind kind);
Role role_from_string(const std::string& s);
MessageKind message_kind_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

enum class SolutionType { text, code, image_blob };

/// Typed generated output plus iteration metadata.
struct SolutionArtifact {
    std::string id;  // ULID-style sortable unique string
    SolutionType type = SolutionType::text;
    std::string language_id;  // non-empty iff type == code
    std::string content;      // raw bytes for image_blob
    int iteration_index = 1;
    Timestamp created_at{};

    bool operator==(const SolutionArtifact&) const = default;
};

std::string to_string(SolutionType type);

/// 26-character Crockford-base32 ULID: 48-bit timestamp + 80 random bits.
/// Sortable by creation time; uniqueness comes from the random tail.
std::string make_ulid(Timestamp at, Rng& rng);

// ---------------------------------------------------------------------------
// Generator metadata
// ---------------------------------------------------------------------------

struct GeneratorResponse {
    Message message;  // role=assistant, kind=generated
    std::string model_identity;
    Duration latency{};
    long tokens_prompt = 0;
    long tokens_completion = 0;
    int attempts = 1;

    bool operator==(const GeneratorResponse&) const = default;
};

/// Fallback token estimate when a backend reports no usage: ceil(chars / 4).
long estimate_tokens(const std::string& text);

// ---------------------------------------------------------------------------
// Test / analysis / evaluation results
// ---------------------------------------------------------------------------

struct TestFailure {
    std::string test_name;
    std::string error_class;
    std::string detail;

    bool operator==(const TestFailure&) const = default;
};

struct TestOutcome {
    bool passed = true;
    std::vector<TestFailure> failures;  // empty iff passed

    bool operator==(const TestOutcome&) const = default;
};

using AnalysisValue = std::variant<double, std::string, bool>;

/// Dictionary of structured data extracted from an artifact. May be empty.
struct AnalysisReport {
    std::map<std::string, AnalysisValue> entries;

    bool operator==(const AnalysisReport&) const = default;
};

/// Score scalar and/or metric map and/or rank list, plus feedback text for
/// the next prompt. Scores are always oriented higher-is-better.
struct EvaluationResult {
    std::optional<double> score;
    std::map<std::string, double> metrics;
    std::optional<std::vector<std::string>> ranked;  // artifact ids
    std::optional<std::string> feedback_text;

    bool operator==(const EvaluationResult&) const = default;

    bool has_payload() const {
        return score.has_value() || !metrics.empty() || ranked.has_value();
    }
};

// ---------------------------------------------------------------------------
// Iteration record
// ---------------------------------------------------------------------------

struct IterationRecord {
    int index = 1;
    bool valid = false;  // == test.passed
    std::optional<SolutionArtifact> artifact;
    TestOutcome test;
    AnalysisReport analysis;
    std::optional<EvaluationResult> evaluation;     // present only when valid
    std::optional<std::string> evaluation_error;    // evaluation ran and failed
    GeneratorResponse generator_meta;
    Duration wall_time{};

    bool operator==(const IterationRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Small shared helpers
// ---------------------------------------------------------------------------

/// "2024-05-01T12:00:00.250Z"-style UTC rendering, millisecond precision.
std::string format_timestamp(Timestamp t);

/// Compact float rendering used in feedback text: integers lose the ".0",
/// everything else keeps shortest round-trip form.
std::string format_score(double v);

}  // namespace ease
