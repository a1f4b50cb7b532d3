#pragma once

#include "refwhy/error.hpp"
#include "refwhy/util/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace refwhy::refactoring {
struct RefactoringInstance;
}

namespace refwhy::sampler {

REFWHY_DEFINE_ERROR(InsufficientPool);

struct SamplePlan {
    std::size_t target_n = 385;
    double confidence = 0.95;
    double margin = 0.05;
    std::size_t min_per_project = 3;
    std::size_t min_per_type = 3;
    std::uint64_t seed = 0;

    void validate() const;  // throws DomainError
};

// Sample-size formula with p = 0.5. `population` nullopt means infinite.
std::size_t cochran_n(double confidence, double margin,
                      std::optional<std::uint64_t> population = std::nullopt);

// What the sampler needs to know about one refactoring observation.
struct Candidate {
    std::string id;
    std::string commit;
    std::string project;
    std::string type;
};

Candidate candidate_from(const refactoring::RefactoringInstance& inst);

struct Selection {
    std::size_t index;  // into the sorted population
    int phase;          // 1, 2 or 3
};

struct Shortfall {
    std::map<std::string, std::size_t> projects;  // project -> missing selections
    std::map<std::string, std::size_t> types;
};

struct Phase1Result {
    std::vector<std::size_t> selected;
    Shortfall shortfall;
};

// Greedy coverage. Types are visited in name order; each type is filled
// to min_per_type drawing uniformly, preferring projects still below
// min_per_project. A per-project pass then tops every project up.
Phase1Result phase1_greedy(const std::vector<Candidate>& population, std::size_t min_per_project,
                           std::size_t min_per_type, util::Rng& rng);

// Algorithm R. Each of the n stream elements ends up selected with
// probability min(k, n)/n. Returns positions into `stream`, ascending.
template <typename Stream>
std::vector<std::size_t> phase2_reservoir(const Stream& stream, std::size_t k, util::Rng& rng) {
    std::vector<std::size_t> reservoir;
    if (k == 0) return reservoir;
    std::size_t i = 0;
    for (auto it = std::begin(stream); it != std::end(stream); ++it, ++i) {
        if (i < k) {
            reservoir.push_back(i);
        } else {
            auto j = rng.uniform_index(i + 1);
            if (j < k) reservoir[j] = i;
        }
    }
    std::sort(reservoir.begin(), reservoir.end());
    return reservoir;
}

// Uniform sample without replacement of exactly `remaining` pool entries.
std::vector<std::size_t> phase3_random_fill(const std::vector<std::size_t>& pool,
                                            std::size_t remaining, util::Rng& rng);

struct SampleResult {
    std::vector<Candidate> population;  // sorted by id
    std::vector<Selection> selections;  // ordered by phase, then id
    Shortfall shortfall;
    std::map<std::string, std::size_t> phase2_k;  // per under-sampled project
    std::size_t phase_counts[3] = {0, 0, 0};
};

// Runs all three phases. Throws InsufficientPool when the population is
// smaller than the target after phases 1 and 2.
SampleResult draw_sample(std::vector<Candidate> population, const SamplePlan& plan);

// id,commit,project,type,phase
void write_manifest(std::ostream& out, const SampleResult& result);

struct ManifestRow {
    std::string id, commit, project, type;
    int phase = 0;
};
std::vector<ManifestRow> read_manifest(const std::string& path);

}  // namespace refwhy::sampler
