#include "fixtures.hpp"

#include "refwhy/util/process.hpp"
#include "refwhy/util/text.hpp"

#include <atomic>
#include <stdexcept>
#include <unistd.h>

namespace refwhy::testing {

fs::path source_dir() { return REFWHY_SOURCE_DIR; }

fs::path mini_java_dir() { return source_dir() / "tests" / "fixtures" / "mini_java"; }

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void git(const fs::path& repo, std::initializer_list<std::string> args) {
    std::vector<std::string> argv = {"git", "-C", repo.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    auto r = util::run(argv);
    if (r.exit_code != 0) throw std::runtime_error("git failed: " + r.err);
}

fs::path build_mini_java_repo(const fs::path& dest) {
    fs::path repo = dest / "mini-java";
    fs::create_directories(repo);
    git(repo, {"init", "-q", "-b", "main"});
    auto stream = util::read_file((mini_java_dir() / "mini-java.fi").string());
    auto r = util::run({"git", "-C", repo.string(), "fast-import", "--quiet"}, {}, stream);
    if (r.exit_code != 0) throw std::runtime_error("fast-import failed: " + r.err);
    git(repo, {"reset", "-q", "--hard", "main"});
    return repo;
}

}  // namespace refwhy::testing
