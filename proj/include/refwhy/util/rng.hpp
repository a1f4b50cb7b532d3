#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace refwhy::util {

// Seeded generator with platform-independent derived draws. The standard
// distributions are implementation-defined, so everything that must be
// reproducible across toolchains goes through these helpers instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, n); n must be > 0. Rejection sampling, no modulo bias.
    std::uint64_t uniform_index(std::uint64_t n);
    // Uniform in [0, 1) with 53 random bits.
    double uniform01();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent per-stream seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace refwhy::util
