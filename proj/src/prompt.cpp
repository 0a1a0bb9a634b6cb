#include "ease/prompt.hpp"

#include <numeric>

#include "ease/errors.hpp"

namespace ease {

std::string to_string(RepeatingSpec::Strategy s) {
    switch (s) {
        case RepeatingSpec::Strategy::single: return "single";
        case RepeatingSpec::Strategy::random: return "random";
        case RepeatingSpec::Strategy::random_weighted: return "random_weighted";
        case RepeatingSpec::Strategy::circular: return "circular";
    }
    return "single";
}

RepeatingSpec::Strategy repeating_strategy_from_string(const std::string& s) {
    if (s == "single") return RepeatingSpec::Strategy::single;
    if (s == "random") return RepeatingSpec::Strategy::random;
    if (s == "random_weighted") return RepeatingSpec::Strategy::random_weighted;
    if (s == "circular") return RepeatingSpec::Strategy::circular;
    throw ParseError("unknown repeating strategy: " + s);
}

std::pair<std::string, RepeatingSpec> select_repeating(const RepeatingSpec& spec, Rng& rng) {
    if (spec.messages.empty()) throw UsageError("repeating spec has no messages");
    if (spec.cursor >= spec.messages.size()) throw UsageError("repeating cursor out of range");

    RepeatingSpec next = spec;
    std::size_t pick = 0;
    switch (spec.strategy) {
        case RepeatingSpec::Strategy::single:
            pick = 0;
            break;
        case RepeatingSpec::Strategy::random:
            pick = rng.next_index(spec.messages.size());
            break;
        case RepeatingSpec::Strategy::random_weighted: {
            if (spec.weights.size() != spec.messages.size()) {
                throw UsageError("random_weighted requires one weight per message");
            }
            const double total = std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
            double mark = rng.next_real() * total;
            pick = spec.weights.size() - 1;
            for (std::size_t i = 0; i < spec.weights.size(); ++i) {
                mark -= spec.weights[i];
                if (mark < 0) {
                    pick = i;
                    break;
                }
            }
            break;
        }
        case RepeatingSpec::Strategy::circular:
            pick = spec.cursor;
            next.cursor = (spec.cursor + 1) % spec.messages.size();
            break;
    }
    return {spec.messages[pick], next};
}

Message compose_iteration_prompt(const std::string& repeating_message,
                                 const std::vector<std::string>& feedback_items,
                                 Timestamp at) {
    if (repeating_message.empty() && feedback_items.empty()) {
        throw UsageError("cannot compose an empty iteration prompt");
    }
    std::string content = repeating_message;
    for (const auto& item : feedback_items) {
        if (item.empty()) continue;
        if (!content.empty()) content += "\n\n";
        content += item;
    }
    const MessageKind kind =
        feedback_items.empty() ? MessageKind::repeating : MessageKind::feedback;
    return make_message(Role::user, kind, std::move(content), at);
}

std::vector<Message> trim_context(const std::vector<Message>& history,
                                  std::optional<std::size_t> window) {
    std::vector<Message> out;
    std::vector<const Message*> rest;
    rest.reserve(history.size());
    for (const auto& m : history) {
        if (m.role == Role::system) {
            if (out.empty()) out.push_back(m);  // system message is exempt from trimming
        } else {
            rest.push_back(&m);
        }
    }
    const std::size_t keep = window ? std::min(*window, rest.size()) : rest.size();
    for (std::size_t i = rest.size() - keep; i < rest.size(); ++i) {
        out.push_back(*rest[i]);
    }
    return out;
}

}  // namespace ease
