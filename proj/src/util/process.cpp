#include "refwhy/util/process.hpp"

#include "refwhy/error.hpp"

#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <mutex>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace refwhy::util {

namespace {

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

[[noreturn]] void fail(const std::string& what) {
    throw IoError(what + ": " + std::strerror(errno));
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv, const std::string& workdir) {
    if (argv.empty()) throw DomainError("empty argv");
    ignore_sigpipe_once();

    int in_pipe[2], out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) fail("pipe");
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        fail("pipe");
    }
    std::FILE* err_file = std::tmpfile();
    if (!err_file) fail("tmpfile");
    err_fd_ = ::dup(fileno(err_file));
    std::fclose(err_file);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], 0);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
    posix_spawn_file_actions_adddup2(&actions, err_fd_, 2);
    if (!workdir.empty()) posix_spawn_file_actions_addchdir_np(&actions, workdir.c_str());

    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    int rc = posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        errno = rc;
        fail("spawn " + argv[0]);
    }
    in_fd_ = in_pipe[1];
    out_fd_ = out_pipe[0];
}

Subprocess::~Subprocess() {
    close_stdin();
    if (out_fd_ >= 0) ::close(out_fd_);
    if (!waited_ && pid_ > 0) {
        int st;
        ::waitpid(pid_, &st, 0);
    }
    if (err_fd_ >= 0) ::close(err_fd_);
}

void Subprocess::write(std::string_view data) {
    while (!data.empty()) {
        ssize_t n = ::write(in_fd_, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("write to child");
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

void Subprocess::close_stdin() {
    if (in_fd_ >= 0) {
        ::close(in_fd_);
        in_fd_ = -1;
    }
}

bool Subprocess::fill() {
    if (eof_) return false;
    if (pos_ > 0 && pos_ == buf_.size()) {
        buf_.clear();
        pos_ = 0;
    }
    char chunk[65536];
    for (;;) {
        ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("read from child");
        }
        if (n == 0) {
            eof_ = true;
            return false;
        }
        buf_.append(chunk, static_cast<std::size_t>(n));
        return true;
    }
}

bool Subprocess::read_until(std::string& out, char delim) {
    out.clear();
    bool got = false;
    for (;;) {
        auto hit = buf_.find(delim, pos_);
        if (hit != std::string::npos) {
            out.append(buf_, pos_, hit - pos_);
            pos_ = hit + 1;
            return true;
        }
        if (pos_ < buf_.size()) got = true;
        out.append(buf_, pos_, std::string::npos);
        pos_ = buf_.size();
        if (!fill()) return got || !out.empty();
    }
}

bool Subprocess::read_exact(std::string& out, std::size_t n) {
    out.clear();
    while (out.size() < n) {
        if (pos_ == buf_.size() && !fill()) return false;
        std::size_t take = std::min(n - out.size(), buf_.size() - pos_);
        out.append(buf_, pos_, take);
        pos_ += take;
    }
    return true;
}

std::string Subprocess::read_all() {
    std::string out(buf_, pos_);
    buf_.clear();
    pos_ = 0;
    while (fill()) {
        out += buf_;
        buf_.clear();
    }
    return out;
}

int Subprocess::wait() {
    if (waited_) return status_;
    close_stdin();
    int st = 0;
    while (::waitpid(pid_, &st, 0) < 0) {
        if (errno != EINTR) fail("waitpid");
    }
    waited_ = true;
    if (WIFEXITED(st))
        status_ = WEXITSTATUS(st);
    else if (WIFSIGNALED(st))
        status_ = 128 + WTERMSIG(st);
    else
        status_ = -1;
    return status_;
}

std::string Subprocess::stderr_text() {
    std::string out;
    if (err_fd_ < 0) return out;
    char chunk[4096];
    off_t off = 0;
    for (;;) {
        ssize_t n = ::pread(err_fd_, chunk, sizeof chunk, off);
        if (n <= 0) break;
        out.append(chunk, static_cast<std::size_t>(n));
        off += n;
    }
    return out;
}

RunResult run(const std::vector<std::string>& argv, const std::string& workdir,
              std::string_view input) {
    Subprocess p(argv, workdir);
    // Inputs here are small (a few blob ids at most); larger feeds go through
    // Subprocess directly with interleaved reads.
    if (!input.empty()) p.write(input);
    p.close_stdin();
    RunResult r;
    r.out = p.read_all();
    r.exit_code = p.wait();
    r.err = p.stderr_text();
    return r;
}

}  // namespace refwhy::util
