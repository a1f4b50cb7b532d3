#pragma once

#include <stdexcept>
#include <string>

namespace refwhy {

// Root of every error thrown by the library. `kind()` is the stable,
// machine-readable name (e.g. "RepoNotFound") used in logs and tests.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define REFWHY_DEFINE_ERROR(Name)                                           \
    class Name : public ::refwhy::Error {                                   \
    public:                                                                 \
        explicit Name(const std::string& what) : ::refwhy::Error(#Name, what) {} \
    }

REFWHY_DEFINE_ERROR(DomainError);
REFWHY_DEFINE_ERROR(IoError);
REFWHY_DEFINE_ERROR(MalformedCsv);
REFWHY_DEFINE_ERROR(MalformedJson);

}  // namespace refwhy
