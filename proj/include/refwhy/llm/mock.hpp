#pragma once

#include "refwhy/llm/client.hpp"
#include "refwhy/llm/orchestrator.hpp"

#include <json.hpp>

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace refwhy::llm {

// One scripted reply. `content` is the assistant message text; a non-200
// status answers with an error body instead.
struct MockReply {
    int status = 200;
    std::string content;
    std::string error_body = "{\"error\":\"scripted failure\"}";
};

MockReply json_reply(const nlohmann::json& content);

// A rule fires when every non-empty matcher matches the request:
// `user_contains` against the user messages, `model` and `schema`
// exactly. Replies are consumed in order; once exhausted the rule stops
// matching unless `repeat_last` is set.
struct MockRule {
    std::string user_contains;
    std::string model;
    std::string schema;
    std::vector<MockReply> replies;
    bool repeat_last = false;
};

// Answers chat-completions requests from scripted rules, falling back to a
// deterministic auto-responder keyed on a hash of the request, so runs
// are reproducible without any model.
class MockResponder {
public:
    void add_rule(MockRule rule);
    HttpResponse respond(const std::string& request_body);
    std::size_t requests() const { return requests_.load(); }

    // The deterministic fallback, exposed for tests.
    static nlohmann::json auto_content(const nlohmann::json& request);

private:
    struct LiveRule {
        MockRule rule;
        std::size_t next = 0;
    };
    std::mutex mu_;
    std::vector<LiveRule> rules_;
    std::atomic<std::size_t> requests_{0};
};

// Installs a script: an array of {case, role, schema, reply | raw}. Entries
// for the same (case, role, schema) form one reply sequence whose last reply
// repeats. Rules match on the case description, the role's model name and
// the schema; entries for cases not in `cases` are ignored.
void install_mock_script(MockResponder& responder, const nlohmann::json& script,
                         const std::vector<MotivationCase>& cases, const OrchestratorConfig& cfg);

nlohmann::json completion_envelope(const std::string& model, const std::string& content);

// In-process transport; no sockets.
class MockTransport : public ChatTransport {
public:
    explicit MockTransport(MockResponder& responder) : responder_(responder) {}
    HttpResponse post(const std::string& endpoint, const std::string& body, const std::string& api_key,
                      double timeout_s) override;

private:
    MockResponder& responder_;
};

// Serves the responder on 127.0.0.1 over real HTTP.
class MockChatServer {
public:
    explicit MockChatServer(MockResponder& responder);
    ~MockChatServer();
    MockChatServer(const MockChatServer&) = delete;
    MockChatServer& operator=(const MockChatServer&) = delete;

    std::string endpoint() const;
    int port() const { return port_; }
    // Authorization headers seen, in arrival order.
    std::vector<std::string> auth_headers() const;
    void stop();

private:
    MockResponder& responder_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mu_;
    std::vector<std::string> auth_;
};

}  // namespace refwhy::llm
