#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ease/domain.hpp"

namespace ease {

struct GeneratorSpec {
    enum class Kind { chat_http, scripted };

    Kind kind = Kind::scripted;

    // chat_http
    std::string endpoint;
    std::string model;
    double temperature = 1.0;
    std::string auth_env = "EASE_API_KEY";
    Duration request_timeout = std::chrono::milliseconds(30000);
    int max_retries = 3;
    Duration retry_backoff = std::chrono::milliseconds(500);

    // scripted
    std::vector<std::string> responses;
    Duration delay = std::chrono::milliseconds(0);

    bool operator==(const GeneratorSpec&) const = default;
};

/// One generator instance serves exactly one caller loop at a time.
class Generator {
public:
    virtual ~Generator() = default;
    virtual GeneratorResponse generate(const std::vector<Message>& conversation) = 0;
    virtual bool deterministic() const = 0;
};

/// Replays a fixed list of responses in order; throws ScriptExhaustedError
/// once the list runs out. `delay` throttles each call in real time (used to
/// keep a task observable mid-run) without affecting recorded metadata.
class ScriptedGenerator : public Generator {
public:
    explicit ScriptedGenerator(GeneratorSpec spec);
    GeneratorResponse generate(const std::vector<Message>& conversation) override;
    bool deterministic() const override { return true; }

private:
    GeneratorSpec spec_;
    size_t next_ = 0;
};

/// Chat-completion HTTP client with exponential-backoff retries.
class HttpGenerator : public Generator {
public:
    explicit HttpGenerator(GeneratorSpec spec);
    GeneratorResponse generate(const std::vector<Message>& conversation) override;
    bool deterministic() const override { return false; }

private:
    GeneratorSpec spec_;
};

/// The chat-completion request body: model, temperature, messages[{role,content}].
nlohmann::json render_wire_request(const std::vector<Message>& conversation,
                                   const GeneratorSpec& spec);

/// Pulls content/model/usage out of a chat-completion response body. Token
/// counts fall back to estimate_tokens when the backend omits usage.
GeneratorResponse parse_wire_response(const nlohmann::json& body,
                                      const std::vector<Message>& conversation,
                                      const GeneratorSpec& spec);

std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec);

}  // namespace ease
