#include "refwhy/util/rng.hpp"

#include "refwhy/error.hpp"

namespace refwhy::util {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_index with n = 0");
    if ((n & (n - 1)) == 0) return engine_() & (n - 1);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    for (;;) {
        std::uint64_t x = engine_();
        if (x < limit) return x % n;
    }
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace refwhy::util
