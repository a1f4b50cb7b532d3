#include "refwhy/llm/client.hpp"

#include "refwhy/util/text.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

namespace refwhy::llm {

using nlohmann::json;

namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpResponse HttpChatTransport::post(const std::string& endpoint, const std::string& body,
                                     const std::string& api_key, double timeout_s) {
    auto [host, prefix] = split_endpoint(endpoint);
    httplib::Client cli(host);
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto res = cli.Post(prefix + "/v1/chat/completions", headers, body, "application/json");
    if (!res) throw TransportFailure(endpoint + ": " + httplib::to_string(res.error()));
    return {res->status, res->body};
}

std::string api_key_for(Role role) {
    const std::string specific = std::string("REFWHY_API_KEY_") + to_string(role);
    if (const char* v = std::getenv(specific.c_str()); v && *v) return v;
    if (const char* v = std::getenv("REFWHY_API_KEY"); v && *v) return v;
    return {};
}

std::string response_content(const json& response) {
    try {
        const auto& choice = response.at("choices").at(0);
        const auto& content = choice.at("message").at("content");
        if (!content.is_string()) throw MalformedModelOutput("message content is not a string");
        return content.get<std::string>();
    } catch (const json::exception& e) {
        throw MalformedModelOutput(std::string("unexpected completion shape: ") + e.what());
    }
}

std::shared_ptr<ChatClient::Limiter> make_limiter(std::size_t max_in_flight) {
    return std::make_shared<ChatClient::Limiter>(
        static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(max_in_flight, 1, 64)));
}

ChatClient::ChatClient(ModelRole cfg, ChatTransport& transport, TranscriptStore& store,
                       std::shared_ptr<Limiter> limiter)
    : cfg_(std::move(cfg)), transport_(transport), store_(store), api_key_(api_key_for(cfg_.role)),
      in_flight_(limiter ? std::move(limiter) : make_limiter(cfg_.max_in_flight)),
      sleep_([](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); }) {
    if (cfg_.context_limit == 0) throw DomainError("context_limit must be positive");
}

json ChatClient::request_body(const json& messages, const OutputSchema& schema) const {
    return {{"model", cfg_.model_name},
            {"messages", messages},
            {"temperature", cfg_.temperature},
            {"response_format", schema.response_format()}};
}

json ChatClient::exchange(const std::string& case_id, const std::string& task, int attempt, const json& body) {
    const std::string key = request_key(body);
    if (auto hit = store_.lookup(key)) return *hit;

    const std::string text = body.dump();
    HttpResponse res;
    for (std::size_t tries = 0;; ++tries) {
        std::string failure;
        try {
            in_flight_->acquire();
            ++calls_;
            try {
                res = transport_.post(cfg_.endpoint, text, api_key_, cfg_.timeout_s);
            } catch (...) {
                in_flight_->release();
                throw;
            }
            in_flight_->release();
            if (res.status == 200) break;
            if (res.status == 400 && util::to_lower(res.body).find("context") != std::string::npos)
                throw ContextOverflow(std::string(to_string(cfg_.role)) + " rejected the prompt: " + res.body);
            if (!retryable(res.status))
                throw EndpointError(std::string(to_string(cfg_.role)) + " returned HTTP " +
                                    std::to_string(res.status) + ": " + res.body);
            failure = "HTTP " + std::to_string(res.status);
        } catch (const TransportFailure& e) {
            failure = e.what();
        }
        if (tries >= cfg_.max_retries)
            throw EndpointUnreachable(std::string(to_string(cfg_.role)) + " at " + cfg_.endpoint + " after " +
                                      std::to_string(tries + 1) + " attempts: " + failure);
        const double delay = cfg_.backoff_s * static_cast<double>(1u << std::min<std::size_t>(tries, 16));
        spdlog::warn("{} request failed ({}); retrying in {:.2f}s", to_string(cfg_.role), failure, delay);
        sleep_(delay);
    }

    json response;
    try {
        response = json::parse(res.body);
    } catch (const json::parse_error& e) {
        throw MalformedModelOutput(std::string("completion body is not JSON: ") + e.what());
    }
    json entry = {{"key", key},       {"case", case_id}, {"role", to_string(cfg_.role)},
                  {"task", task},     {"attempt", attempt},
                  {"request", body},  {"response", response}};
    store_.append(entry);
    return entry;
}

Exchange ChatClient::complete(const std::string& case_id, const Prompt& prompt) {
    const OutputSchema& schema = *prompt.schema;
    json messages = json::array({{{"role", "system"}, {"content", prompt.system}},
                                 {{"role", "user"}, {"content", prompt.user}}});
    Exchange ex;
    auto first = exchange(case_id, schema.name, 0, request_body(messages, schema));
    ex.entries.push_back(first);
    std::string content;
    try {
        content = response_content(first["response"]);
        ex.parsed = schema.parse(content);
        return ex;
    } catch (const MalformedModelOutput& e) {
        spdlog::warn("{} reply for {} is malformed ({}); reprompting once", to_string(cfg_.role), case_id, e.what());
        messages.push_back({{"role", "assistant"}, {"content", content}});
        messages.push_back({{"role", "user"},
                            {"content", std::string("Your reply did not match the required JSON format (") +
                                            e.what() + "). Reply again with only the JSON object."}});
    }
    auto second = exchange(case_id, schema.name, 1, request_body(messages, schema));
    ex.entries.push_back(second);
    try {
        ex.parsed = schema.parse(response_content(second["response"]));
    } catch (const MalformedModelOutput& e) {
        throw MalformedModelOutput(std::string(to_string(cfg_.role)) + " for " + case_id +
                                   " after one reprompt: " + e.what());
    }
    return ex;
}

}  // namespace refwhy::llm
