#pragma once

#include "refwhy/error.hpp"
#include "refwhy/llm/orchestrator.hpp"
#include "refwhy/metrics/accumulator.hpp"
#include "refwhy/metrics/metric_vector.hpp"
#include "refwhy/sampler/sampler.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace refwhy::pipeline {

REFWHY_DEFINE_ERROR(ConfigError);
REFWHY_DEFINE_ERROR(MissingStageInput);

namespace fs = std::filesystem;

struct ReviewConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::vector<std::string> reviewers;  // empty = anyone
    std::size_t majority_min = 3;        // reviewers needed before a majority is resolved
    fs::path static_dir;                 // built review UI; empty = API only
    fs::path batch;                      // empty = <output>/classify/validation_batch.ndjson
};

struct AnalyzeConfig {
    double alpha = 0.05;
    std::size_t trees = 500;
    std::uint64_t seed = 1;
    fs::path agreement_table;  // llm,human,count rows; used when no verdicts exist
    fs::path label_counts;     // label,count rows
};

struct PipelineConfig {
    fs::path source;  // the config file itself
    std::vector<fs::path> repos;
    fs::path rm_json_dir;
    fs::path product_metrics;  // optional CSV
    fs::path ground_truth;     // optional CSV: commit,type,motivation,explanation
    fs::path output_dir;
    int rename_threshold = 50;

    sampler::SamplePlan sample;
    metrics::MetricsConfig metrics;
    metrics::ReadabilityThresholds readability;

    llm::OrchestratorConfig llm;
    std::optional<std::size_t> validation_sample;  // default: Cochran over the records
    std::uint64_t validation_seed = 1;
    fs::path mock_script;  // scripted replies for --mock

    ReviewConfig review;
    AnalyzeConfig analyze;

    fs::path stage_dir(const std::string& stage) const { return output_dir / stage; }
};

// INI file; relative paths resolve against the file's directory. Throws
// ConfigError with the offending key.
PipelineConfig load_config(const fs::path& path);
void validate(const PipelineConfig& cfg);  // paths exist, roles complete

std::string project_name(const fs::path& repo);

}  // namespace refwhy::pipeline
