#pragma once

#include <json.hpp>

#include <cstdio>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace refwhy::llm {

// Append-only NDJSON log of completed exchanges, also used as the
// response cache: an exchange is looked up by the SHA-256 of its
// canonical request body. Each append is flushed and fsync'ed before
// append() returns, so a crash loses at most the exchange in flight.
class TranscriptStore {
public:
    // Empty path = in-memory only.
    explicit TranscriptStore(const std::string& path = "");
    ~TranscriptStore();
    TranscriptStore(const TranscriptStore&) = delete;
    TranscriptStore& operator=(const TranscriptStore&) = delete;

    std::optional<nlohmann::json> lookup(const std::string& key) const;
    // `entry` must carry "key" and "response".
    void append(const nlohmann::json& entry);
    std::size_t size() const;

private:
    std::string path_;
    std::FILE* file_ = nullptr;
    mutable std::mutex mu_;
    std::unordered_map<std::string, nlohmann::json> by_key_;
};

std::string request_key(const nlohmann::json& request_body);

}  // namespace refwhy::llm
