// refwhy: mine | sample | classify | analyze | serve
#include "refwhy/pipeline/config.hpp"
#include "refwhy/pipeline/review.hpp"
#include "refwhy/pipeline/stages.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>
#include <optional>
#include <semaphore>

namespace fs = std::filesystem;
using namespace refwhy;
using namespace refwhy::pipeline;

namespace {

std::binary_semaphore g_stop{0};

extern "C" void on_signal(int) { g_stop.release(); }

int serve(const PipelineConfig& cfg) {
    const fs::path batch = cfg.review.batch;
    if (!fs::exists(batch)) throw MissingStageInput(batch.string() + " is missing; run 'classify' first");
    ReviewOptions opts;
    opts.reviewers = cfg.review.reviewers;
    opts.majority_min = cfg.review.majority_min;
    fs::create_directories(cfg.stage_dir("review"));
    ReviewStore store(ReviewStore::load_batch(batch), cfg.stage_dir("review") / "verdicts.ndjson", opts);
    ReviewService service(store, cfg.review.static_dir);
    const int port = service.start(cfg.review.bind, cfg.review.port);
    spdlog::info("review service on http://{}:{} ({} verdicts replayed)", cfg.review.bind, port,
                 store.history_size());
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    g_stop.acquire();
    service.stop();
    spdlog::info("review service stopped");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("refwhy"));

    CLI::App app{"Mine refactoring histories, extract motivations with LLMs, and analyse them"};
    app.require_subcommand(1);
    std::string config_path;
    bool mock = false;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    for (const char* name : {"mine", "sample", "classify", "analyze", "serve"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "Pipeline config (INI)")->required();
        sub->add_option("--seed", seed, "Override every seed in the config");
        if (std::string(name) == "classify") sub->add_flag("--mock", mock, "Answer from the built-in mock models");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (verbose) spdlog::set_level(spdlog::level::debug);
    const std::string stage = app.get_subcommands().front()->get_name();

    PipelineConfig cfg;
    try {
        cfg = load_config(config_path);
        if (seed) {
            cfg.sample.seed = *seed;
            cfg.validation_seed = *seed;
            cfg.analyze.seed = *seed;
        }
        validate(cfg);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return 2;
    }

    const std::string started = utc_now();
    int rc = 1;
    try {
        if (stage == "serve") return serve(cfg);
        StageOutcome out;
        if (stage == "mine") out = run_mine(cfg);
        else if (stage == "sample") out = run_sample(cfg);
        else if (stage == "classify") out = run_classify(cfg, mock);
        else out = run_analyze(cfg);
        for (const auto& p : out.problems) spdlog::warn("{}", p);
        for (const auto& a : out.artifacts) std::cout << a.string() << "\n";
        rc = out.exit_code;
    } catch (const std::exception& e) {
        spdlog::error("{}: {}", stage, e.what());
        rc = 1;
    }
    append_run_log(cfg, stage, started, rc);
    return rc;
}
