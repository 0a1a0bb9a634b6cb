#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ease/domain.hpp"
#include "ease/rng.hpp"

namespace ease {

/// User-defined repeating prompt: one or more messages plus the strategy that
/// picks which one opens each post-success feedback turn.
struct RepeatingSpec {
    enum class Strategy { single, random, random_weighted, circular };

    std::vector<std::string> messages;  // non-empty
    Strategy strategy = Strategy::single;
    std::vector<double> weights;  // random_weighted: one positive weight per message
    std::size_t cursor = 0;       // circular state, always < messages.size()

    bool operator==(const RepeatingSpec&) const = default;
};

std::string to_string(RepeatingSpec::Strategy s);
RepeatingSpec::Strategy repeating_strategy_from_string(const std::string& s);

/// Picks the repeating message for this iteration. Circular advances the
/// cursor modulo the list length; the other strategies leave it untouched.
std::pair<std::string, RepeatingSpec> select_repeating(const RepeatingSpec& spec, Rng& rng);

/// Builds the single user turn for an iteration: repeating message first,
/// then each feedback item, separated by exactly one blank line.
/// kind=repeating when feedback is empty, kind=feedback otherwise.
/// Errors when both inputs are empty.
Message compose_iteration_prompt(const std::string& repeating_message,
                                 const std::vector<std::string>& feedback_items,
                                 Timestamp at = {});

/// Window of prior context re-sent to the generator: the system message (if
/// any) followed by the last `window` non-system messages. std::nullopt means
/// unbounded; 0 keeps only the system message.
std::vector<Message> trim_context(const std::vector<Message>& history,
                                  std::optional<std::size_t> window);

}  // namespace ease
