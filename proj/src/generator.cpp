#include "ease/generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>

#include "ease/errors.hpp"

namespace ease {
namespace {

void check_conversation(const std::vector<Message>& conversation) {
    if (conversation.empty()) throw UsageError("generate: conversation must be non-empty");
    if (conversation.back().role != Role::user)
        throw UsageError("generate: last message must have role=user");
}

long prompt_token_estimate(const std::vector<Message>& conversation) {
    long total = 0;
    for (const auto& m : conversation) total += estimate_tokens(m.content);
    return total;
}

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path;
};

ParsedUrl parse_url(const std::string& endpoint) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(endpoint, m, re))
        throw ConfigError({"generator.endpoint: not a valid http(s) URL: " + endpoint});
    ParsedUrl out;
    out.scheme_host_port = m[1].str();
    out.path = m[2].matched && !m[2].str().empty() ? m[2].str() : "/";
    return out;
}

}  // namespace

nlohmann::json render_wire_request(const std::vector<Message>& conversation,
                                   const GeneratorSpec& spec) {
    if (spec.kind != GeneratorSpec::Kind::chat_http)
        throw UsageError("render_wire_request: spec is not chat_http");
    check_conversation(conversation);
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : conversation)
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    return nlohmann::json{
        {"model", spec.model}, {"temperature", spec.temperature}, {"messages", messages}};
}

GeneratorResponse parse_wire_response(const nlohmann::json& body,
                                      const std::vector<Message>& conversation,
                                      const GeneratorSpec& spec) {
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw ConnectorError("response body has no choices");
    const auto& choice = body["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content"))
        throw ConnectorError("response choice has no message content");

    GeneratorResponse out;
    out.message.role = Role::assistant;
    out.message.kind = MessageKind::generated;
    out.message.content = choice["message"]["content"].get<std::string>();
    out.model_identity =
        body.contains("model") && body["model"].is_string() ? body["model"].get<std::string>()
                                                            : spec.model;

    const long prompt_est = prompt_token_estimate(conversation);
    const long completion_est = estimate_tokens(out.message.content);
    out.tokens_prompt = prompt_est;
    out.tokens_completion = completion_est;
    if (body.contains("usage") && body["usage"].is_object()) {
        const auto& usage = body["usage"];
        if (usage.contains("prompt_tokens")) out.tokens_prompt = usage["prompt_tokens"].get<long>();
        if (usage.contains("completion_tokens"))
            out.tokens_completion = usage["completion_tokens"].get<long>();
        if (usage.contains("total_tokens") && !usage.contains("prompt_tokens")) {
            const long total = usage["total_tokens"].get<long>();
            out.tokens_completion = std::min(completion_est, total);
            out.tokens_prompt = total - out.tokens_completion;
        }
    }
    return out;
}

ScriptedGenerator::ScriptedGenerator(GeneratorSpec spec) : spec_(std::move(spec)) {
    if (spec_.responses.empty())
        throw UsageError("scripted generator: responses list must be non-empty");
}

GeneratorResponse ScriptedGenerator::generate(const std::vector<Message>& conversation) {
    check_conversation(conversation);
    if (next_ >= spec_.responses.size())
        throw ScriptExhaustedError("scripted generator exhausted after " +
                                   std::to_string(spec_.responses.size()) + " responses");
    if (spec_.delay.count() > 0) std::this_thread::sleep_for(spec_.delay);
    GeneratorResponse out;
    out.message.role = Role::assistant;
    out.message.kind = MessageKind::generated;
    out.message.content = spec_.responses[next_++];
    out.model_identity = "scripted";
    out.latency = Duration(0);
    out.tokens_prompt = prompt_token_estimate(conversation);
    out.tokens_completion = estimate_tokens(out.message.content);
    out.attempts = 1;
    return out;
}

HttpGenerator::HttpGenerator(GeneratorSpec spec) : spec_(std::move(spec)) {
    parse_url(spec_.endpoint);  // fail fast on malformed endpoints
}

GeneratorResponse HttpGenerator::generate(const std::vector<Message>& conversation) {
    check_conversation(conversation);
    const auto url = parse_url(spec_.endpoint);
    const auto payload = render_wire_request(conversation, spec_).dump();

    httplib::Headers headers;
    if (!spec_.auth_env.empty()) {
        if (const char* key = std::getenv(spec_.auth_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_error;
    Duration backoff = spec_.retry_backoff;
    const Duration backoff_cap = std::chrono::milliseconds(8000);
    for (int attempt = 1; attempt <= spec_.max_retries + 1; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff = std::min(backoff * 2, backoff_cap);
        }
        httplib::Client client(url.scheme_host_port);
        client.set_connection_timeout(spec_.request_timeout);
        client.set_read_timeout(spec_.request_timeout);
        client.set_write_timeout(spec_.request_timeout);

        const auto start = std::chrono::steady_clock::now();
        auto res = client.Post(url.path, headers, payload, "application/json");
        const auto elapsed = std::chrono::duration_cast<Duration>(
            std::chrono::steady_clock::now() - start);

        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed response JSON: ") + e.what();
            continue;
        }
        GeneratorResponse out = parse_wire_response(body, conversation, spec_);
        out.latency = elapsed;
        out.attempts = attempt;
        return out;
    }
    throw ConnectorError("generator unreachable after " + std::to_string(spec_.max_retries + 1) +
                         " attempts: " + last_error);
}

std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec) {
    if (spec.kind == GeneratorSpec::Kind::scripted)
        return std::make_unique<ScriptedGenerator>(spec);
    return std::make_unique<HttpGenerator>(spec);
}

}  // namespace ease
