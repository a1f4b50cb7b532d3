#include "refwhy/llm/mock.hpp"

#include "refwhy/util/ndjson.hpp"
#include "refwhy/util/sha256.hpp"

#include <httplib.h>

#include <array>
#include <map>
#include <tuple>

namespace refwhy::llm {

using nlohmann::json;

namespace {

std::uint64_t hash64(const std::string& s) {
    const std::string h = util::sha256_hex(s);
    return std::stoull(h.substr(0, 16), nullptr, 16);
}

// Every user message, joined; a reprompt still carries the case context.
std::string user_text(const json& request) {
    std::string out;
    for (const auto& m : request.value("messages", json::array()))
        if (m.value("role", "") == "user") {
            if (!out.empty()) out += "\n";
            out += m.value("content", "");
        }
    return out;
}

std::string schema_name(const json& request) {
    try {
        return request.at("response_format").at("json_schema").at("name").get<std::string>();
    } catch (const json::exception&) {
        return {};
    }
}

// Text between "<label>: " and the end of that line in `user`.
std::string field_after(const std::string& user, const std::string& label) {
    auto at = user.find(label);
    if (at == std::string::npos) return {};
    at += label.size();
    return user.substr(at, user.find('\n', at) - at);
}

constexpr std::array kMotivations = {
    "Improve readability by giving the code a clearer structure",
    "Enable reuse of logic that was duplicated",
    "Remove duplication introduced by earlier changes",
    "Separate concerns so each unit has a single responsibility",
    "Prepare the code for an upcoming feature",
    "Make the code easier to test",
    "Align names with the domain vocabulary",
    "Simplify a method that grew too long",
};

constexpr std::array kCategories = {
    "Readability", "Reuse", "Duplication removal", "Separation of concerns",
    "Feature preparation", "Testability", "Naming consistency", "Simplification",
};

}  // namespace

MockReply json_reply(const json& content) {
    MockReply r;
    r.content = content.dump();
    return r;
}

json completion_envelope(const std::string& model, const std::string& content) {
    return {{"object", "chat.completion"},
            {"model", model},
            {"choices", json::array({{{"index", 0},
                                      {"finish_reason", "stop"},
                                      {"message", {{"role", "assistant"}, {"content", content}}}}})}};
}

json MockResponder::auto_content(const json& request) {
    const std::string user = user_text(request);
    const std::string model = request.value("model", "");
    const std::string schema = schema_name(request);
    const std::uint64_t h = hash64(model + "\n" + user);
    // Decisions keyed on the case content alone so validators mostly agree.
    const std::uint64_t hc = hash64(user);

    if (schema == "motivation") {
        const char* m = kMotivations[hc % kMotivations.size()];
        return {{"motivation", m},
                {"description", std::string("The change was made to ") + m + "."},
                {"reasoning", "The diff restructures code without changing behaviour."}};
    }
    if (schema == "validation") {
        // ~80% shared agree, occasional per-model dissent.
        const bool base = hc % 10 < 8;
        const bool flip = h % 10 == 0;
        return {{"decision", base != flip ? "agree" : "disagree"},
                {"reasoning", "Compared the stated motivation with the diff and commit message."}};
    }
    if (schema == "arbitration") {
        const bool agree = h % 2 == 0;
        return {{"decision", agree ? "agree" : "disagree"},
                {"motivation", agree ? "" : kMotivations[(h >> 8) % kMotivations.size()]},
                {"reasoning", "Weighed both validators against the diff."}};
    }
    if (schema == "alignment") {
        // Roughly the published yes/no/extends proportions.
        const auto r = hc % 100;
        const char* label = r < 53 ? "yes" : r < 78 ? "no" : "extends";
        return {{"label", label}, {"reasoning", "Compared both motivations."}};
    }
    if (schema == "coding") {
        const std::string motivation = field_after(user, "Motivation: ");
        std::size_t idx = hash64(motivation) % kCategories.size();
        if (h % 5 == 0) idx = (idx + 1) % kCategories.size();
        return {{"category", kCategories[idx]},
                {"description", std::string("Refactorings motivated by ") + kCategories[idx] + "."},
                {"reasoning", "Matched the motivation to the closest theme."}};
    }
    if (schema == "coding_resolution") {
        return {{"decision", h % 2 == 0 ? "v1" : "v2"},
                {"category", ""},
                {"description", ""},
                {"reasoning", "Chose the more specific of the two proposals."}};
    }
    return {{"error", "unknown schema"}};
}

void MockResponder::add_rule(MockRule rule) {
    std::lock_guard lock(mu_);
    rules_.push_back({std::move(rule), 0});
}

HttpResponse MockResponder::respond(const std::string& request_body) {
    ++requests_;
    json request;
    try {
        request = json::parse(request_body);
    } catch (const json::parse_error&) {
        return {400, "{\"error\":\"request is not JSON\"}"};
    }
    const std::string model = request.value("model", "");
    std::optional<MockReply> reply;
    {
        const std::string user = user_text(request);
        const std::string schema = schema_name(request);
        std::lock_guard lock(mu_);
        for (auto& live : rules_) {
            const auto& r = live.rule;
            if (!r.user_contains.empty() && user.find(r.user_contains) == std::string::npos) continue;
            if (!r.model.empty() && r.model != model) continue;
            if (!r.schema.empty() && r.schema != schema) continue;
            if (r.replies.empty()) continue;
            if (live.next >= r.replies.size()) {
                if (!r.repeat_last) continue;
                reply = r.replies.back();
            } else {
                reply = r.replies[live.next++];
            }
            break;
        }
    }
    if (!reply) reply = json_reply(auto_content(request));
    if (reply->status != 200) return {reply->status, reply->error_body};
    return {200, completion_envelope(model, reply->content).dump()};
}

void install_mock_script(MockResponder& responder, const json& script, const std::vector<MotivationCase>& cases,
                         const OrchestratorConfig& cfg) {
    std::map<std::string, std::string> description;
    for (const auto& c : cases) description[c.id] = c.description;
    using Key = std::tuple<std::string, std::string, std::string>;
    std::map<Key, MockRule> rules;
    std::vector<Key> order;
    try {
        for (const auto& e : script) {
            Key key{e.at("case").get<std::string>(), e.at("role").get<std::string>(), e.at("schema").get<std::string>()};
            auto d = description.find(std::get<0>(key));
            if (d == description.end()) continue;
            auto [it, fresh] = rules.try_emplace(key);
            if (fresh) {
                order.push_back(key);
                it->second.user_contains = d->second;
                it->second.model = cfg.roles.at(role_from_string(std::get<1>(key))).model_name;
                it->second.schema = std::get<2>(key);
                it->second.repeat_last = true;
            }
            MockReply reply;
            reply.content = e.contains("raw") ? e.at("raw").get<std::string>() : e.at("reply").dump();
            it->second.replies.push_back(reply);
        }
    } catch (const json::exception& e) {
        throw MalformedJson(std::string("mock script: ") + e.what());
    }
    for (const auto& k : order) responder.add_rule(rules.at(k));
}

HttpResponse MockTransport::post(const std::string&, const std::string& body, const std::string&, double) {
    return responder_.respond(body);
}

MockChatServer::MockChatServer(MockResponder& responder)
    : responder_(responder), server_(std::make_unique<httplib::Server>()) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(mu_);
            auth_.push_back(req.get_header_value("Authorization"));
        }
        auto r = responder_.respond(req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    server_->Post("/v1/chat/completions", handler);
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw IoError("mock chat server could not bind a port");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

MockChatServer::~MockChatServer() { stop(); }

void MockChatServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string MockChatServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<std::string> MockChatServer::auth_headers() const {
    std::lock_guard lock(mu_);
    return auth_;
}

}  // namespace refwhy::llm
