#pragma once

#include "refwhy/llm/prompt.hpp"
#include "refwhy/llm/transcript.hpp"
#include "refwhy/llm/types.hpp"

#include <json.hpp>

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

namespace refwhy::llm {

struct HttpResponse {
    int status = 0;
    std::string body;
};

REFWHY_DEFINE_ERROR(TransportFailure);

// One POST of a chat-completions body. Throws TransportFailure when no
// HTTP response was obtained (connection refused, timeout).
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual HttpResponse post(const std::string& endpoint, const std::string& body, const std::string& api_key,
                              double timeout_s) = 0;
};

// OpenAI-compatible wire over cpp-httplib: POST {endpoint}/v1/chat/completions.
class HttpChatTransport : public ChatTransport {
public:
    HttpResponse post(const std::string& endpoint, const std::string& body, const std::string& api_key,
                      double timeout_s) override;
};

// REFWHY_API_KEY_<ROLE>, else REFWHY_API_KEY, else empty.
std::string api_key_for(Role role);

struct Exchange {
    nlohmann::json parsed;                // schema-validated model output
    std::vector<nlohmann::json> entries;  // transcript entries, one per request made or replayed
};

// Issues structured-output requests for one role, consulting the
// transcript cache first. Counts network calls for tests.
class ChatClient {
public:
    using Limiter = std::counting_semaphore<64>;
    // `limiter` bounds in-flight requests; roles sharing an endpoint should
    // share one. Defaults to a private limiter of cfg.max_in_flight.
    ChatClient(ModelRole cfg, ChatTransport& transport, TranscriptStore& store,
               std::shared_ptr<Limiter> limiter = nullptr);

    // One reprompt on a malformed reply, then MalformedModelOutput.
    Exchange complete(const std::string& case_id, const Prompt& prompt);

    const ModelRole& config() const { return cfg_; }
    std::size_t network_calls() const { return calls_.load(); }
    void set_sleep(std::function<void(double)> sleeper) { sleep_ = std::move(sleeper); }

private:
    nlohmann::json request_body(const nlohmann::json& messages, const OutputSchema& schema) const;
    // Cached or fresh; returns the transcript entry.
    nlohmann::json exchange(const std::string& case_id, const std::string& task, int attempt,
                            const nlohmann::json& body);

    ModelRole cfg_;
    ChatTransport& transport_;
    TranscriptStore& store_;
    std::string api_key_;
    std::atomic<std::size_t> calls_{0};
    std::shared_ptr<Limiter> in_flight_;
    std::function<void(double)> sleep_;
};

std::shared_ptr<ChatClient::Limiter> make_limiter(std::size_t max_in_flight);

// Text of choices[0].message.content; throws MalformedModelOutput.
std::string response_content(const nlohmann::json& response);

}  // namespace refwhy::llm
