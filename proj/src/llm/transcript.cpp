#include "refwhy/llm/transcript.hpp"

#include "refwhy/error.hpp"
#include "refwhy/util/ndjson.hpp"
#include "refwhy/util/sha256.hpp"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

namespace refwhy::llm {

using nlohmann::json;

std::string request_key(const json& request_body) {
    return util::sha256_hex(util::canonical_dump(request_body));
}

TranscriptStore::TranscriptStore(const std::string& path) : path_(path) {
    if (path_.empty()) return;
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                auto j = json::parse(line);
                by_key_[j.at("key").get<std::string>()] = j;
            } catch (const json::exception&) {
                // A torn final line from a crash mid-append is dropped.
                spdlog::warn("{}:{}: ignoring unreadable transcript line", path_, lineno);
            }
        }
    } else if (auto dir = std::filesystem::path(path_).parent_path(); !dir.empty()) {
        std::filesystem::create_directories(dir);
    }
    file_ = std::fopen(path_.c_str(), "ab");
    if (!file_) throw IoError("cannot open transcript log " + path_);
}

TranscriptStore::~TranscriptStore() {
    if (file_) std::fclose(file_);
}

std::optional<json> TranscriptStore::lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

void TranscriptStore::append(const json& entry) {
    const std::string key = entry.at("key").get<std::string>();
    std::lock_guard lock(mu_);
    if (file_) {
        const std::string line = util::canonical_dump(entry) + "\n";
        if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0)
            throw IoError("cannot append to transcript log " + path_);
        ::fsync(::fileno(file_));
    }
    by_key_[key] = entry;
}

std::size_t TranscriptStore::size() const {
    std::lock_guard lock(mu_);
    return by_key_.size();
}

}  // namespace refwhy::llm
