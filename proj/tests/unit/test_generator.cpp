#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "ease/errors.hpp"
#include "ease/generator.hpp"

using namespace ease;
using namespace std::chrono_literals;

namespace {
std::vector<Message> small_conversation() {
    return {
        make_message(Role::system, MessageKind::system, "be brief"),
        make_message(Role::user, MessageKind::initial, "write a story"),
    };
}

GeneratorSpec scripted(std::vector<std::string> responses) {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::scripted;
    spec.responses = std::move(responses);
    return spec;
}

/// In-process chat-completion stub. Each test configures its handler.
struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit StubServer(httplib::Server::Handler handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~StubServer() {
        server.stop();
        thread.join();
    }

    GeneratorSpec spec() const {
        GeneratorSpec s;
        s.kind = GeneratorSpec::Kind::chat_http;
        s.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
        s.model = "stub-model";
        s.temperature = 0.5;
        s.max_retries = 3;
        s.retry_backoff = 10ms;
        s.request_timeout = 2000ms;
        return s;
    }
};
}  // namespace

TEST_CASE("render_wire_request carries model, temperature, and messages") {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::chat_http;
    spec.endpoint = "http://localhost/v1/chat/completions";
    spec.model = "m1";
    spec.temperature = 0.25;

    const auto body = render_wire_request(small_conversation(), spec);
    CHECK(body["model"] == "m1");
    CHECK(body["temperature"] == 0.25);
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][0]["content"] == "be brief");
    CHECK(body["messages"][1]["role"] == "user");
}

TEST_CASE("render_wire_request rejects empty or misordered conversations") {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::chat_http;
    spec.model = "m";
    CHECK_THROWS_AS(render_wire_request({}, spec), UsageError);
    const auto assistant_last = std::vector<Message>{
        make_message(Role::assistant, MessageKind::generated, "hm")};
    CHECK_THROWS_AS(render_wire_request(assistant_last, spec), UsageError);
}

TEST_CASE("parse_wire_response reads content and usage") {
    const auto body = nlohmann::json::parse(R"({
        "model": "served-model",
        "choices": [{"message": {"role": "assistant", "content": "once upon"}}],
        "usage": {"prompt_tokens": 12, "completion_tokens": 3}
    })");
    const auto response = parse_wire_response(body, small_conversation(), GeneratorSpec{});
    CHECK(response.message.role == Role::assistant);
    CHECK(response.message.kind == MessageKind::generated);
    CHECK(response.message.content == "once upon");
    CHECK(response.model_identity == "served-model");
    CHECK(response.tokens_prompt == 12);
    CHECK(response.tokens_completion == 3);
}

TEST_CASE("parse_wire_response falls back to char/4 estimates without usage") {
    const auto body = nlohmann::json::parse(R"({
        "choices": [{"message": {"content": "abcdefgh"}}]
    })");
    const auto convo = small_conversation();  // "be brief" + "write a story" = 21 chars
    GeneratorSpec spec;
    spec.model = "configured";
    const auto response = parse_wire_response(body, convo, spec);
    CHECK(response.model_identity == "configured");
    CHECK(response.tokens_completion == estimate_tokens("abcdefgh"));
    CHECK(response.tokens_prompt ==
          estimate_tokens("be brief") + estimate_tokens("write a story"));
}

TEST_CASE("parse_wire_response rejects bodies without content") {
    // Malformed bodies are transport-level failures: they count against the
    // retry budget, so they surface as ConnectorError.
    CHECK_THROWS_AS(
        parse_wire_response(nlohmann::json::parse(R"({"choices": []})"),
                            small_conversation(), GeneratorSpec{}),
        ConnectorError);
    CHECK_THROWS_AS(parse_wire_response(nlohmann::json::parse(R"({"error": "nope"})"),
                                        small_conversation(), GeneratorSpec{}),
                    ConnectorError);
}

TEST_CASE("ScriptedGenerator replays responses in order and then exhausts") {
    ScriptedGenerator gen(scripted({"one", "two"}));
    const auto convo = small_conversation();

    auto first = gen.generate(convo);
    CHECK(first.message.content == "one");
    CHECK(first.message.role == Role::assistant);
    CHECK(first.model_identity == "scripted");
    CHECK(first.attempts == 1);
    CHECK(first.latency == Duration(0));
    CHECK(first.tokens_completion == estimate_tokens("one"));

    CHECK(gen.generate(convo).message.content == "two");
    CHECK_THROWS_AS(gen.generate(convo), ScriptExhaustedError);
}

TEST_CASE("ScriptedGenerator delay throttles without touching metadata") {
    GeneratorSpec spec = scripted({"slow"});
    spec.delay = 50ms;
    ScriptedGenerator gen(spec);
    const auto start = std::chrono::steady_clock::now();
    const auto response = gen.generate(small_conversation());
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(elapsed >= 45ms);
    CHECK(response.latency == Duration(0));
}

TEST_CASE("make_generator picks the implementation and validates endpoints") {
    auto s = make_generator(scripted({"x"}));
    CHECK(s->deterministic());

    GeneratorSpec bad;
    bad.kind = GeneratorSpec::Kind::chat_http;
    bad.endpoint = "ftp://example.com/nope";
    bad.model = "m";
    CHECK_THROWS_AS(make_generator(bad), ConfigError);
}

TEST_CASE("HttpGenerator round-trips against a local endpoint") {
    std::atomic<int> hits{0};
    nlohmann::json seen_body;
    std::string seen_auth;
    StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        seen_body = nlohmann::json::parse(req.body);
        seen_auth = req.get_header_value("Authorization");
        res.set_content(R"({
            "model": "stub-served",
            "choices": [{"message": {"content": "reply text"}}],
            "usage": {"prompt_tokens": 12, "completion_tokens": 3}
        })", "application/json");
    });

    setenv("EASE_API_KEY", "secret-key", 1);
    HttpGenerator gen(stub.spec());
    const auto response = gen.generate(small_conversation());

    CHECK(hits == 1);
    CHECK(response.message.content == "reply text");
    CHECK(response.model_identity == "stub-served");
    CHECK(response.tokens_prompt == 12);
    CHECK(response.tokens_completion == 3);
    CHECK(response.attempts == 1);
    CHECK(seen_auth == "Bearer secret-key");
    CHECK(seen_body["model"] == "stub-model");
    CHECK(seen_body["messages"].size() == 2);
    unsetenv("EASE_API_KEY");
}

TEST_CASE("HttpGenerator omits the auth header when the env var is unset") {
    std::string seen_auth = "sentinel";
    StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices": [{"message": {"content": "ok"}}]})",
                        "application/json");
    });
    unsetenv("EASE_API_KEY");
    HttpGenerator gen(stub.spec());
    gen.generate(small_conversation());
    CHECK(seen_auth.empty());
}

TEST_CASE("HttpGenerator retries server errors with attempts = failures + 1") {
    std::atomic<int> hits{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        const int n = ++hits;
        if (n <= 2) {
            res.status = 500;
            res.set_content("overloaded", "text/plain");
            return;
        }
        res.set_content(R"({"choices": [{"message": {"content": "third time lucky"}}]})",
                        "application/json");
    });

    HttpGenerator gen(stub.spec());
    const auto response = gen.generate(small_conversation());
    CHECK(hits == 3);
    CHECK(response.attempts == 3);
    CHECK(response.message.content == "third time lucky");
}

TEST_CASE("HttpGenerator retries malformed bodies and eventually gives up") {
    std::atomic<int> hits{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content("not json at all", "application/json");
    });

    GeneratorSpec spec = stub.spec();
    spec.max_retries = 2;
    HttpGenerator gen(spec);
    CHECK_THROWS_AS(gen.generate(small_conversation()), ConnectorError);
    CHECK(hits == 3);  // initial attempt + 2 retries
}

TEST_CASE("HttpGenerator reports unreachable endpoints as connector errors") {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::chat_http;
    spec.endpoint = "http://127.0.0.1:1/v1/chat/completions";  // nothing listens here
    spec.model = "m";
    spec.max_retries = 1;
    spec.retry_backoff = 10ms;
    spec.request_timeout = 500ms;
    HttpGenerator gen(spec);
    CHECK_THROWS_AS(gen.generate(small_conversation()), ConnectorError);
}
