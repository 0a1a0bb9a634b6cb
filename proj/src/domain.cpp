#include "ease/domain.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#include "ease/errors.hpp"

namespace ease {

Message make_message(Role role, MessageKind kind, std::string content,
                     Timestamp timestamp) {
    if (kind != MessageKind::generated && content.empty()) {
        throw UsageError("message content must be non-empty for kind " + to_string(kind));
    }
    if (role == Role::system && kind != MessageKind::system) {
        throw UsageError("system-role messages must have kind=system");
    }
    return Message{role, kind, std::move(content), timestamp};
}

std::string to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

std::string to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::initial: return "initial";
        case MessageKind::system: return "system";
        case MessageKind::repeating: return "repeating";
        case MessageKind::feedback: return "feedback";
        case MessageKind::generated: return "generated";
    }
    return "initial";
}

Role role_from_string(const std::string& s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    throw ParseError("unknown role: " + s);
}

MessageKind message_kind_from_string(const std::string& s) {
    if (s == "initial") return MessageKind::initial;
    if (s == "system") return MessageKind::system;
    if (s == "repeating") return MessageKind::repeating;
    if (s == "feedback") return MessageKind::feedback;
    if (s == "generated") return MessageKind::generated;
    throw ParseError("unknown message kind: " + s);
}

std::string to_string(SolutionType type) {
    switch (type) {
        case SolutionType::text: return "text";
        case SolutionType::code: return "code";
        case SolutionType::image_blob: return "image_blob";
    }
    return "text";
}

std::string make_ulid(Timestamp at, Rng& rng) {
    static constexpr char alphabet[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
    const auto ms = static_cast<std::uint64_t>(at.time_since_epoch().count());

    std::string out(26, '0');
    // 48-bit timestamp -> 10 base32 characters, most significant first.
    std::uint64_t t = ms & 0xFFFFFFFFFFFFull;
    for (int i = 9; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = alphabet[t & 0x1F];
        t >>= 5;
    }
    // 80 random bits -> 16 characters.
    std::uint64_t hi = rng.next_u64();
    std::uint64_t lo = rng.next_u64();
    for (int i = 0; i < 16; ++i) {
        unsigned bits = (i < 12) ? static_cast<unsigned>((hi >> (5 * i)) & 0x1F)
                                 : static_cast<unsigned>((lo >> (5 * (i - 12))) & 0x1F);
        out[static_cast<std::size_t>(10 + i)] = alphabet[bits];
    }
    return out;
}

long estimate_tokens(const std::string& text) {
    return static_cast<long>((text.size() + 3) / 4);
}

std::string format_timestamp(Timestamp t) {
    const auto ms_total = t.time_since_epoch().count();
    const std::time_t secs = static_cast<std::time_t>(ms_total / 1000);
    const int ms = static_cast<int>(ms_total % 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec, ms);
    return buf;
}

std::string format_score(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
}

}  // namespace ease
