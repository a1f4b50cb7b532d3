#pragma once

#include <filesystem>
#include <string>

namespace refwhy::testing {

namespace fs = std::filesystem;

fs::path source_dir();
fs::path mini_java_dir();

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "refwhy");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// Materializes the mini-java fixture repository (bare-style: objects and
// refs only, no checkout) under `dest` and returns its path.
fs::path build_mini_java_repo(const fs::path& dest);

void git(const fs::path& repo, std::initializer_list<std::string> args);

}  // namespace refwhy::testing
