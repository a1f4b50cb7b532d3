#pragma once

#include "refwhy/pipeline/config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace refwhy::pipeline {

struct StageOutcome {
    int exit_code = 0;  // 0 ok, 1 partial or runtime failure
    std::vector<fs::path> artifacts;
    std::vector<std::string> problems;
};

// Each stage reads only earlier stages' directories (plus the configured
// inputs) and writes only its own; unchanged inputs give identical bytes.
StageOutcome run_mine(const PipelineConfig& cfg);
StageOutcome run_sample(const PipelineConfig& cfg);
StageOutcome run_classify(const PipelineConfig& cfg, bool mock);
StageOutcome run_analyze(const PipelineConfig& cfg);

// File names each stage writes, relative to its directory.
const std::vector<std::string>& stage_artifacts(const std::string& stage);

// Process metrics without ND and SCTR, the 14 CK metrics and the
// readability value: the 41 columns the analysis correlates.
const std::vector<std::string>& analysis_metric_names();

// Unified diff of one commit restricted to `paths` (first-parent for merges).
std::string commit_diff(const fs::path& repo, const std::string& commit, const std::vector<std::string>& paths,
                        int rename_threshold = 50);

// Appends {stage, started, finished, exit_code} to <output>/run-log.ndjson;
// wall-clock times live only here so stage outputs stay reproducible.
void append_run_log(const PipelineConfig& cfg, const std::string& stage, const std::string& started,
                    int exit_code);
std::string utc_now();

}  // namespace refwhy::pipeline
