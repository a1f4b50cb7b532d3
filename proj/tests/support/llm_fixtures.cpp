#include "llm_fixtures.hpp"

#include "fixtures.hpp"
#include "refwhy/util/text.hpp"

namespace refwhy::testing {

using nlohmann::json;

GoldenScript install_golden_script(llm::MockResponder& responder, const llm::OrchestratorConfig& cfg) {
    auto doc = json::parse(util::read_file((source_dir() / "tests/fixtures/llm/golden_script.json").string()));
    GoldenScript g;
    for (const auto& j : doc.at("cases")) g.cases.push_back(llm::case_from_json(j));
    g.expected = doc.at("expected");
    llm::install_mock_script(responder, doc.at("script"), g.cases, cfg);
    return g;
}

std::filesystem::path golden_consensus_path() { return source_dir() / "tests/fixtures/llm/golden_consensus.ndjson"; }

}  // namespace refwhy::testing
