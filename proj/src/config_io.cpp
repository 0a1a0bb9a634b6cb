#include "ease/config_io.hpp"

#include <fstream>
#include <set>

#include "ease/errors.hpp"

namespace ease {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError("config: " + path + ": " + what);
}

/// Tracks which keys of one JSON object were consumed; finish() rejects the
/// rest. This is what makes the parser strict at every nesting level.
class StrictObject {
public:
    StrictObject(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_, "must be an object");
    }

    const json* opt(const std::string& key) {
        seen_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    const json& req(const std::string& key) {
        const json* found = opt(key);
        if (!found) fail(path_, "missing required key \"" + key + "\"");
        return *found;
    }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) fail(path_, "unknown key \"" + key + "\"");
    }

    const std::string& path() const { return path_; }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string as_string(const json& node, const std::string& path) {
    if (!node.is_string()) fail(path, "must be a string");
    return node.get<std::string>();
}

bool as_bool(const json& node, const std::string& path) {
    if (!node.is_boolean()) fail(path, "must be a boolean");
    return node.get<bool>();
}

long as_int(const json& node, const std::string& path) {
    if (!node.is_number_integer()) fail(path, "must be an integer");
    return node.get<long>();
}

double as_number(const json& node, const std::string& path) {
    if (!node.is_number()) fail(path, "must be a number");
    return node.get<double>();
}

Duration as_ms(const json& node, const std::string& path) {
    return Duration(as_int(node, path));
}

std::vector<std::string> as_string_array(const json& node, const std::string& path) {
    if (!node.is_array()) fail(path, "must be an array of strings");
    std::vector<std::string> out;
    for (size_t i = 0; i < node.size(); ++i)
        out.push_back(as_string(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

GeneratorSpec parse_generator(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    GeneratorSpec spec;
    const std::string kind = as_string(obj.req("kind"), path + ".kind");
    if (kind == "scripted") {
        spec.kind = GeneratorSpec::Kind::scripted;
        spec.responses = as_string_array(obj.req("responses"), path + ".responses");
        if (const json* v = obj.opt("delay_ms")) spec.delay = as_ms(*v, path + ".delay_ms");
    } else if (kind == "chat_http") {
        spec.kind = GeneratorSpec::Kind::chat_http;
        spec.endpoint = as_string(obj.req("endpoint"), path + ".endpoint");
        spec.model = as_string(obj.req("model"), path + ".model");
        if (const json* v = obj.opt("temperature"))
            spec.temperature = as_number(*v, path + ".temperature");
        if (const json* v = obj.opt("auth_env")) spec.auth_env = as_string(*v, path + ".auth_env");
        if (const json* v = obj.opt("request_timeout_ms"))
            spec.request_timeout = as_ms(*v, path + ".request_timeout_ms");
        if (const json* v = obj.opt("max_retries"))
            spec.max_retries = static_cast<int>(as_int(*v, path + ".max_retries"));
        if (const json* v = obj.opt("retry_backoff_ms"))
            spec.retry_backoff = as_ms(*v, path + ".retry_backoff_ms");
    } else {
        fail(path + ".kind", "must be \"scripted\" or \"chat_http\"");
    }
    obj.finish();
    return spec;
}

RepeatingSpec parse_repeating(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    RepeatingSpec spec;
    spec.messages = as_string_array(obj.req("messages"), path + ".messages");
    if (const json* v = obj.opt("strategy")) {
        const std::string name = as_string(*v, path + ".strategy");
        try {
            spec.strategy = repeating_strategy_from_string(name);
        } catch (const Error&) {
            fail(path + ".strategy",
                 "must be one of single, random, random_weighted, circular");
        }
    }
    if (const json* v = obj.opt("weights")) {
        if (!v->is_array()) fail(path + ".weights", "must be an array of numbers");
        for (size_t i = 0; i < v->size(); ++i)
            spec.weights.push_back(
                as_number((*v)[i], path + ".weights[" + std::to_string(i) + "]"));
    }
    obj.finish();
    return spec;
}

TestSpec parse_test(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    TestSpec spec;
    spec.name = as_string(obj.req("name"), path + ".name");
    spec.feedback_template = as_string(obj.req("feedback_template"), path + ".feedback_template");
    const std::string kind = as_string(obj.req("kind"), path + ".kind");
    if (kind == "keyword") {
        spec.kind = TestSpec::Kind::keyword;
        if (const json* v = obj.opt("required"))
            spec.required = as_string_array(*v, path + ".required");
        if (const json* v = obj.opt("forbidden"))
            spec.forbidden = as_string_array(*v, path + ".forbidden");
    } else if (kind == "external_check") {
        spec.kind = TestSpec::Kind::external_check;
        spec.command = as_string(obj.req("command"), path + ".command");
        if (const json* v = obj.opt("timeout_ms")) spec.timeout = as_ms(*v, path + ".timeout_ms");
        if (const json* v = obj.opt("pass_exit_code"))
            spec.pass_exit_code = static_cast<int>(as_int(*v, path + ".pass_exit_code"));
    } else if (kind == "code_extraction") {
        spec.kind = TestSpec::Kind::code_extraction;
        spec.language_id = as_string(obj.req("language"), path + ".language");
    } else {
        fail(path + ".kind", "must be one of keyword, external_check, code_extraction");
    }
    obj.finish();
    return spec;
}

AnalyzerSpec parse_analyzer(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    AnalyzerSpec spec;
    spec.output_key = as_string(obj.req("output_key"), path + ".output_key");
    const std::string kind = as_string(obj.req("kind"), path + ".kind");
    if (kind == "line_count") {
        spec.kind = AnalyzerSpec::Kind::line_count;
    } else if (kind == "char_count") {
        spec.kind = AnalyzerSpec::Kind::char_count;
    } else if (kind == "token_estimate") {
        spec.kind = AnalyzerSpec::Kind::token_estimate;
    } else if (kind == "keyword_presence") {
        spec.kind = AnalyzerSpec::Kind::keyword_presence;
        spec.keywords = as_string_array(obj.req("keywords"), path + ".keywords");
    } else if (kind == "llm_analysis") {
        spec.kind = AnalyzerSpec::Kind::llm_analysis;
        spec.prompt_template = as_string(obj.req("prompt_template"), path + ".prompt_template");
        spec.generator = parse_generator(obj.req("generator"), path + ".generator");
    } else {
        fail(path + ".kind",
             "must be one of line_count, char_count, token_estimate, keyword_presence, "
             "llm_analysis");
    }
    obj.finish();
    return spec;
}

EvaluatorSpec parse_evaluator(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    EvaluatorSpec spec;
    const std::string kind = as_string(obj.req("kind"), path + ".kind");
    if (const json* v = obj.opt("feedback_render"))
        spec.feedback_render = as_string(*v, path + ".feedback_render");
    if (kind == "llm_judge") {
        spec.kind = EvaluatorSpec::Kind::llm_judge;
        spec.prompt_template = as_string(obj.req("prompt_template"), path + ".prompt_template");
        spec.generator = parse_generator(obj.req("generator"), path + ".generator");
    } else if (kind == "external_metric") {
        spec.kind = EvaluatorSpec::Kind::external_metric;
        spec.command = as_string(obj.req("command"), path + ".command");
        if (const json* v = obj.opt("metric_key"))
            spec.metric_key = as_string(*v, path + ".metric_key");
        if (const json* v = obj.opt("timeout_ms")) spec.timeout = as_ms(*v, path + ".timeout_ms");
    } else if (kind == "game2048") {
        spec.kind = EvaluatorSpec::Kind::game2048;
        spec.policy_command = as_string(obj.req("policy_command"), path + ".policy_command");
        if (const json* v = obj.opt("n_games"))
            spec.n_games = static_cast<int>(as_int(*v, path + ".n_games"));
        if (const json* v = obj.opt("base_seed")) {
            if (!v->is_number_integer()) fail(path + ".base_seed", "must be an integer");
            spec.base_seed = v->get<std::uint64_t>();
        }
        if (const json* v = obj.opt("move_time_limit_ms"))
            spec.move_time_limit = as_ms(*v, path + ".move_time_limit_ms");
        if (const json* v = obj.opt("search_time_budget_ms"))
            spec.search_time_budget = as_ms(*v, path + ".search_time_budget_ms");
        if (const json* v = obj.opt("move_cap"))
            spec.move_cap = static_cast<int>(as_int(*v, path + ".move_cap"));
    } else {
        fail(path + ".kind", "must be one of llm_judge, external_metric, game2048");
    }
    obj.finish();
    return spec;
}

StoppingSpec parse_stopping(const json& node, const std::string& path) {
    StrictObject obj(node, path);
    StoppingSpec spec;
    const std::string kind = as_string(obj.req("kind"), path + ".kind");
    try {
        spec.kind = stopping_kind_from_string(kind);
    } catch (const Error&) {
        fail(path + ".kind",
             "must be one of max_iterations, max_tokens, max_valid_iterations, "
             "max_consecutive_invalid, score_threshold, time_limit");
    }
    switch (spec.kind) {
        case StoppingSpec::Kind::max_iterations:
        case StoppingSpec::Kind::max_tokens:
        case StoppingSpec::Kind::max_valid_iterations:
        case StoppingSpec::Kind::max_consecutive_invalid:
            spec.n = as_int(obj.req("n"), path + ".n");
            break;
        case StoppingSpec::Kind::score_threshold:
            spec.threshold = as_number(obj.req("threshold"), path + ".threshold");
            break;
        case StoppingSpec::Kind::time_limit:
            spec.limit = as_ms(obj.req("ms"), path + ".ms");
            break;
    }
    obj.finish();
    return spec;
}

}  // namespace

TaskConfig parse_config(const nlohmann::json& doc) {
    StrictObject root(doc, "$");
    TaskConfig config;

    {
        StrictObject prompts(root.req("prompts"), "prompts");
        if (const json* v = prompts.opt("system"))
            config.prompts.system = as_string(*v, "prompts.system");
        config.prompts.initial = as_string(prompts.req("initial"), "prompts.initial");
        config.prompts.repeating = parse_repeating(prompts.req("repeating"), "prompts.repeating");
        prompts.finish();
    }

    config.generator = parse_generator(root.req("generator"), "generator");

    if (const json* v = root.opt("context_window")) {
        if (v->is_string()) {
            if (v->get<std::string>() != "unbounded")
                fail("context_window", "must be a non-negative integer or \"unbounded\"");
        } else {
            const long n = as_int(*v, "context_window");
            if (n < 0) fail("context_window", "must be a non-negative integer or \"unbounded\"");
            config.context_window = static_cast<std::size_t>(n);
        }
    }

    if (const json* v = root.opt("tests")) {
        if (!v->is_array()) fail("tests", "must be an array");
        for (size_t i = 0; i < v->size(); ++i)
            config.tests.push_back(parse_test((*v)[i], "tests[" + std::to_string(i) + "]"));
    }

    if (const json* v = root.opt("analyzers")) {
        if (!v->is_array()) fail("analyzers", "must be an array");
        for (size_t i = 0; i < v->size(); ++i)
            config.analyzers.push_back(
                parse_analyzer((*v)[i], "analyzers[" + std::to_string(i) + "]"));
    }

    config.evaluator = parse_evaluator(root.req("evaluator"), "evaluator");

    {
        const json& stopping = root.req("stopping");
        if (!stopping.is_array()) fail("stopping", "must be an array");
        for (size_t i = 0; i < stopping.size(); ++i)
            config.stopping.push_back(
                parse_stopping(stopping[i], "stopping[" + std::to_string(i) + "]"));
    }

    if (const json* v = root.opt("seed")) {
        if (!v->is_number_integer()) fail("seed", "must be an integer");
        config.seed = v->get<std::uint64_t>();
    }
    if (const json* v = root.opt("include_analysis_in_feedback"))
        config.include_analysis_in_feedback = as_bool(*v, "include_analysis_in_feedback");

    root.finish();
    return config;
}

namespace {

nlohmann::ordered_json serialize_generator(const GeneratorSpec& spec) {
    nlohmann::ordered_json out;
    if (spec.kind == GeneratorSpec::Kind::scripted) {
        out["kind"] = "scripted";
        out["responses"] = spec.responses;
        out["delay_ms"] = spec.delay.count();
    } else {
        out["kind"] = "chat_http";
        out["endpoint"] = spec.endpoint;
        out["model"] = spec.model;
        out["temperature"] = spec.temperature;
        out["auth_env"] = spec.auth_env;
        out["request_timeout_ms"] = spec.request_timeout.count();
        out["max_retries"] = spec.max_retries;
        out["retry_backoff_ms"] = spec.retry_backoff.count();
    }
    return out;
}

}  // namespace

nlohmann::ordered_json serialize_config(const TaskConfig& config) {
    nlohmann::ordered_json doc;

    nlohmann::ordered_json prompts;
    if (config.prompts.system) prompts["system"] = *config.prompts.system;
    prompts["initial"] = config.prompts.initial;
    nlohmann::ordered_json repeating;
    repeating["messages"] = config.prompts.repeating.messages;
    repeating["strategy"] = to_string(config.prompts.repeating.strategy);
    if (!config.prompts.repeating.weights.empty())
        repeating["weights"] = config.prompts.repeating.weights;
    prompts["repeating"] = std::move(repeating);
    doc["prompts"] = std::move(prompts);

    doc["generator"] = serialize_generator(config.generator);

    if (config.context_window) {
        doc["context_window"] = *config.context_window;
    } else {
        doc["context_window"] = "unbounded";
    }

    doc["tests"] = nlohmann::ordered_json::array();
    for (const auto& test : config.tests) {
        nlohmann::ordered_json t;
        t["name"] = test.name;
        switch (test.kind) {
            case TestSpec::Kind::keyword:
                t["kind"] = "keyword";
                if (!test.required.empty()) t["required"] = test.required;
                if (!test.forbidden.empty()) t["forbidden"] = test.forbidden;
                break;
            case TestSpec::Kind::external_check:
                t["kind"] = "external_check";
                t["command"] = test.command;
                t["timeout_ms"] = test.timeout.count();
                t["pass_exit_code"] = test.pass_exit_code;
                break;
            case TestSpec::Kind::code_extraction:
                t["kind"] = "code_extraction";
                t["language"] = test.language_id;
                break;
        }
        t["feedback_template"] = test.feedback_template;
        doc["tests"].push_back(std::move(t));
    }

    doc["analyzers"] = nlohmann::ordered_json::array();
    for (const auto& analyzer : config.analyzers) {
        nlohmann::ordered_json a;
        a["output_key"] = analyzer.output_key;
        switch (analyzer.kind) {
            case AnalyzerSpec::Kind::line_count:
                a["kind"] = "line_count";
                break;
            case AnalyzerSpec::Kind::char_count:
                a["kind"] = "char_count";
                break;
            case AnalyzerSpec::Kind::token_estimate:
                a["kind"] = "token_estimate";
                break;
            case AnalyzerSpec::Kind::keyword_presence:
                a["kind"] = "keyword_presence";
                a["keywords"] = analyzer.keywords;
                break;
            case AnalyzerSpec::Kind::llm_analysis:
                a["kind"] = "llm_analysis";
                a["prompt_template"] = analyzer.prompt_template;
                a["generator"] = serialize_generator(analyzer.generator);
                break;
        }
        doc["analyzers"].push_back(std::move(a));
    }

    nlohmann::ordered_json evaluator;
    switch (config.evaluator.kind) {
        case EvaluatorSpec::Kind::llm_judge:
            evaluator["kind"] = "llm_judge";
            evaluator["prompt_template"] = config.evaluator.prompt_template;
            evaluator["generator"] = serialize_generator(config.evaluator.generator);
            break;
        case EvaluatorSpec::Kind::external_metric:
            evaluator["kind"] = "external_metric";
            evaluator["command"] = config.evaluator.command;
            evaluator["metric_key"] = config.evaluator.metric_key;
            evaluator["timeout_ms"] = config.evaluator.timeout.count();
            break;
        case EvaluatorSpec::Kind::game2048:
            evaluator["kind"] = "game2048";
            evaluator["policy_command"] = config.evaluator.policy_command;
            evaluator["n_games"] = config.evaluator.n_games;
            evaluator["base_seed"] = config.evaluator.base_seed;
            evaluator["move_time_limit_ms"] = config.evaluator.move_time_limit.count();
            evaluator["search_time_budget_ms"] = config.evaluator.search_time_budget.count();
            evaluator["move_cap"] = config.evaluator.move_cap;
            break;
    }
    if (!config.evaluator.feedback_render.empty())
        evaluator["feedback_render"] = config.evaluator.feedback_render;
    doc["evaluator"] = std::move(evaluator);

    doc["stopping"] = nlohmann::ordered_json::array();
    for (const auto& condition : config.stopping) {
        nlohmann::ordered_json s;
        s["kind"] = to_string(condition.kind);
        switch (condition.kind) {
            case StoppingSpec::Kind::max_iterations:
            case StoppingSpec::Kind::max_tokens:
            case StoppingSpec::Kind::max_valid_iterations:
            case StoppingSpec::Kind::max_consecutive_invalid:
                s["n"] = condition.n;
                break;
            case StoppingSpec::Kind::score_threshold:
                s["threshold"] = condition.threshold;
                break;
            case StoppingSpec::Kind::time_limit:
                s["ms"] = condition.limit.count();
                break;
        }
        doc["stopping"].push_back(std::move(s));
    }

    if (config.seed) doc["seed"] = *config.seed;
    doc["include_analysis_in_feedback"] = config.include_analysis_in_feedback;
    return doc;
}

TaskConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config: " + path.string() + ": " + e.what());
    }
    TaskConfig config = parse_config(doc);
    if (auto violations = validate_config(config); !violations.empty()) {
        for (auto& v : violations) v = path.string() + ": " + v;
        throw ConfigError(violations);
    }
    return config;
}

}  // namespace ease
