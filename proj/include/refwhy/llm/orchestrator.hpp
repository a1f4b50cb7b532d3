#pragma once

#include "refwhy/llm/client.hpp"
#include "refwhy/llm/prompt.hpp"
#include "refwhy/llm/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace refwhy::llm {

struct OrchestratorConfig {
    std::map<Role, ModelRole> roles;  // all four required
    std::string prompt_dir;           // empty = bundled templates
    std::size_t response_reserve = 512;
    double bytes_per_token = 4.0;
    Role alignment_role = Role::LRM;
    std::size_t workers = 4;  // concurrent cases
};

// Default four roles with the context limits of the reference setup.
OrchestratorConfig default_orchestrator_config(const std::string& endpoint = "http://127.0.0.1:1234");

struct CodingResult {
    std::vector<CodingAssignment> assignments;  // in record order
    CategoryPool pool;
};

class Orchestrator {
public:
    Orchestrator(OrchestratorConfig cfg, ChatTransport& transport, TranscriptStore& store);

    // LRM, then V1 and V2 concurrently, then V3 iff they disagree.
    ConsensusRecord extract_motivation(const MotivationCase& c);
    // Cases run on a bounded worker pool; results come back in input order.
    // The first failure is rethrown after in-flight cases finish.
    std::vector<ConsensusRecord> extract_all(const std::vector<MotivationCase>& cases);

    // Compares the final motivation with the developers' own; needs ground truth.
    AlignmentLabel classify_alignment(const MotivationCase& c, const ConsensusRecord& r);

    // Cases are coded one after another (the pool is shared state), in the
    // given order, starting from `pool`.
    CodingResult open_code(const std::vector<ConsensusRecord>& records, CategoryPool pool = {});

    std::size_t network_calls() const;
    std::size_t network_calls(Role role) const;
    ChatClient& client(Role role) { return *clients_.at(role); }

private:
    Prompt prompt_for(Role role, Task task, const std::map<std::string, std::string>& vars) const;
    CodingAssignment code_one(const ConsensusRecord& r, CategoryPool& pool);

    OrchestratorConfig cfg_;
    std::map<Task, PromptTemplate> templates_;
    std::map<Role, std::unique_ptr<ChatClient>> clients_;
};

// A validation batch line: the record plus everything a reviewer needs.
nlohmann::json review_item(const MotivationCase& c, const ConsensusRecord& r);

// Seeded uniform sample of `sample_n` records (joined to their cases by id),
// serialized as NDJSON sorted by case id. Throws InsufficientRecords when
// sample_n exceeds the records available.
std::string export_validation_batch(const std::vector<MotivationCase>& cases,
                                    const std::vector<ConsensusRecord>& records, std::size_t sample_n,
                                    std::uint64_t seed);

}  // namespace refwhy::llm
