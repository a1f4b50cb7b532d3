#include "pipeline_fixtures.hpp"

#include "fixtures.hpp"
#include "refwhy/util/text.hpp"

#include <vector>

namespace refwhy::testing {

PipelineWorkspace make_pipeline_workspace(const fs::path& root, const std::map<std::string, std::string>& overrides) {
    PipelineWorkspace ws;
    ws.root = root;
    ws.output = root / "out";
    const fs::path repo = build_mini_java_repo(root / "repos");
    fs::create_directories(root / "rm");
    fs::copy_file(mini_java_dir() / "rm-output.json", root / "rm" / "mini-java.json",
                  fs::copy_options::overwrite_existing);
    const fs::path tables = source_dir() / "data" / "published_tables";

    std::map<std::string, std::string> keys = {
        {"paths/repos", fs::relative(repo, root).string()},
        {"paths/rm_json_dir", "rm"},
        {"paths/product_metrics", (mini_java_dir() / "product-metrics.csv").string()},
        {"paths/ground_truth", (mini_java_dir() / "ground-truth.csv").string()},
        {"paths/output_dir", "out"},
        {"sample/target_n", "12"},
        {"sample/min_per_project", "1"},
        {"sample/min_per_type", "0"},
        {"sample/seed", "7"},
        {"classify/validation_sample", "6"},
        {"classify/validation_seed", "3"},
        {"classify/mock_script", (source_dir() / "tests" / "fixtures" / "e2e" / "mock_script.json").string()},
        {"analyze/trees", "50"},
        {"analyze/seed", "11"},
        {"analyze/agreement_table", (tables / "alignment_agreement.csv").string()},
        {"analyze/label_counts", (tables / "alignment_labels.csv").string()},
    };
    for (const auto& [k, v] : overrides) keys[k] = v;

    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    for (const auto& [k, v] : keys) {
        if (v.empty()) continue;
        const auto slash = k.find('/');
        sections[k.substr(0, slash)].emplace_back(k.substr(slash + 1), v);
    }
    std::string ini;
    for (const auto& [section, entries] : sections) {
        ini += "[" + section + "]\n";
        for (const auto& [k, v] : entries) ini += k + " = " + v + "\n";
        ini += "\n";
    }
    ws.config = root / "config.ini";
    util::write_file_atomic(ws.config.string(), ini);
    return ws;
}

fs::path cli_path() { return REFWHY_CLI_PATH; }

}  // namespace refwhy::testing
