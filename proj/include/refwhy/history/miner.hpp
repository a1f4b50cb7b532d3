#pragma once

#include "refwhy/error.hpp"
#include "refwhy/history/commit.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace refwhy::history {

REFWHY_DEFINE_ERROR(RepoNotFound);
REFWHY_DEFINE_ERROR(CorruptHistory);
REFWHY_DEFINE_ERROR(EmptyIdentity);

struct StreamOptions {
    // Minimum similarity (percent) for git to pair a delete/add as a rename.
    int rename_threshold = 50;
    // Follow only first parents instead of every reachable commit.
    bool first_parent_only = false;
    std::string git = "git";
};

// Walks the full history oldest first (parents before children, ties broken
// by commit time). Merge commits are diffed against their first parent.
void stream_commits(const std::filesystem::path& repo, const StreamOptions& opts,
                    const std::function<void(CommitRecord&&)>& sink);

std::vector<CommitRecord> stream_commits(const std::filesystem::path& repo,
                                         const StreamOptions& opts = {});

std::string normalize_author(std::string_view name, std::string_view email);

// Line count as git reports it: a final line without '\n' still counts.
std::int64_t count_lines(std::string_view content);

}  // namespace refwhy::history
