#pragma once

#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace refwhy::util {

// A child process with piped stdin/stdout. stderr goes to an anonymous
// temporary file so a chatty child can never block on a full pipe.
// The argv is executed directly (no shell).
class Subprocess {
public:
    explicit Subprocess(const std::vector<std::string>& argv,
                        const std::string& workdir = {});
    ~Subprocess();

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    void write(std::string_view data);
    void close_stdin();

    // Reads up to and excluding `delim`. Returns false on EOF with nothing read.
    bool read_until(std::string& out, char delim);
    // Reads exactly n bytes. Returns false on premature EOF.
    bool read_exact(std::string& out, std::size_t n);
    std::string read_all();

    // Waits for exit; returns the exit status (128+signal if killed).
    int wait();
    std::string stderr_text();

private:
    bool fill();

    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    int err_fd_ = -1;
    int status_ = -1;
    bool waited_ = false;
    std::string buf_;
    std::size_t pos_ = 0;
    bool eof_ = false;
};

struct RunResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& argv, const std::string& workdir = {},
              std::string_view input = {});

}  // namespace refwhy::util
