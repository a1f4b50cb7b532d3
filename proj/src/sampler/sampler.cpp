#include "refwhy/sampler/sampler.hpp"

#include "refwhy/refactoring/instance.hpp"
#include "refwhy/util/csv.hpp"
#include "refwhy/util/text.hpp"

#include <boost/math/distributions/normal.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace refwhy::sampler {

void SamplePlan::validate() const {
    if (!(confidence > 0 && confidence < 1))
        throw DomainError("confidence must lie in (0, 1), got " + util::format_double(confidence));
    if (!(margin > 0 && margin < 1))
        throw DomainError("margin must lie in (0, 1), got " + util::format_double(margin));
    if (target_n < 1) throw DomainError("target_n must be at least 1");
}

std::size_t cochran_n(double confidence, double margin, std::optional<std::uint64_t> population) {
    if (!(confidence > 0 && confidence < 1))
        throw DomainError("confidence must lie in (0, 1)");
    if (!(margin > 0 && margin < 1)) throw DomainError("margin must lie in (0, 1)");
    if (population && *population < 1) throw DomainError("population must be at least 1");
    boost::math::normal_distribution<double> std_normal;
    const double z = boost::math::quantile(std_normal, (1 + confidence) / 2);
    // Guard against 384.00000000001-style float noise before the ceiling.
    const double raw = z * z * 0.25 / (margin * margin);
    const double n0 = std::ceil(raw - 1e-9);
    if (!population) return static_cast<std::size_t>(n0);
    const double N = static_cast<double>(*population);
    double n = std::floor(n0 / (1 + (n0 - 1) / N) + 1e-9);
    n = std::clamp(n, 1.0, N);
    return static_cast<std::size_t>(n);
}

Candidate candidate_from(const refactoring::RefactoringInstance& inst) {
    return {inst.id, inst.commit_id, inst.project, std::string(inst.type->name)};
}

namespace {

// Picks one entry of `v` uniformly and removes it (order not preserved).
std::size_t take_uniform(std::vector<std::size_t>& v, util::Rng& rng) {
    auto j = static_cast<std::size_t>(rng.uniform_index(v.size()));
    std::size_t out = v[j];
    v[j] = v.back();
    v.pop_back();
    return out;
}

}  // namespace

Phase1Result phase1_greedy(const std::vector<Candidate>& population, std::size_t min_per_project,
                           std::size_t min_per_type, util::Rng& rng) {
    std::map<std::string, std::vector<std::size_t>> by_type, by_project;
    for (std::size_t i = 0; i < population.size(); ++i) {
        by_type[population[i].type].push_back(i);
        by_project[population[i].project].push_back(i);
    }
    std::vector<bool> taken(population.size(), false);
    std::map<std::string, std::size_t> per_project, per_type;
    Phase1Result res;
    auto select = [&](std::size_t i) {
        taken[i] = true;
        ++per_project[population[i].project];
        ++per_type[population[i].type];
        res.selected.push_back(i);
    };

    for (const auto& [type, members] : by_type) {
        const std::size_t want = std::min(min_per_type, members.size());
        while (per_type[type] < want) {
            std::vector<std::size_t> preferred, rest;
            for (auto i : members) {
                if (taken[i]) continue;
                (per_project[population[i].project] < min_per_project ? preferred : rest).push_back(i);
            }
            select(take_uniform(preferred.empty() ? rest : preferred, rng));
        }
        if (members.size() < min_per_type) res.shortfall.types[type] = min_per_type - members.size();
    }

    for (const auto& [project, members] : by_project) {
        const std::size_t want = std::min(min_per_project, members.size());
        if (per_project[project] < want) {
            std::vector<std::size_t> open;
            for (auto i : members)
                if (!taken[i]) open.push_back(i);
            while (per_project[project] < want) select(take_uniform(open, rng));
        }
        if (members.size() < min_per_project)
            res.shortfall.projects[project] = min_per_project - members.size();
    }
    return res;
}

std::vector<std::size_t> phase3_random_fill(const std::vector<std::size_t>& pool,
                                            std::size_t remaining, util::Rng& rng) {
    if (remaining > pool.size())
        throw InsufficientPool("need " + std::to_string(remaining) + " more observations but only " +
                               std::to_string(pool.size()) + " remain unsampled");
    // Partial Fisher-Yates.
    std::vector<std::size_t> work = pool;
    for (std::size_t i = 0; i < remaining; ++i) {
        auto j = i + static_cast<std::size_t>(rng.uniform_index(work.size() - i));
        std::swap(work[i], work[j]);
    }
    work.resize(remaining);
    std::sort(work.begin(), work.end());
    return work;
}

SampleResult draw_sample(std::vector<Candidate> population, const SamplePlan& plan) {
    plan.validate();
    std::sort(population.begin(), population.end(),
              [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < population.size(); ++i)
        if (population[i].id == population[i - 1].id)
            throw DomainError("duplicate observation id " + population[i].id);

    SampleResult out;
    out.population = std::move(population);
    const auto& pop = out.population;
    std::vector<bool> taken(pop.size(), false);
    auto record = [&](std::size_t i, int phase) {
        taken[i] = true;
        out.selections.push_back({i, phase});
        ++out.phase_counts[phase - 1];
    };

    util::Rng rng1(util::mix_seed(plan.seed, 1));
    auto p1 = phase1_greedy(pop, plan.min_per_project, plan.min_per_type, rng1);
    std::sort(p1.selected.begin(), p1.selected.end());
    for (auto i : p1.selected) record(i, 1);
    out.shortfall = p1.shortfall;
    for (const auto& [p, n] : out.shortfall.projects)
        spdlog::warn("project {} has {} too few observations for the per-project minimum", p, n);
    for (const auto& [t, n] : out.shortfall.types)
        spdlog::warn("type {} has {} too few observations for the per-type minimum", t, n);
    if (out.selections.size() > plan.target_n)
        spdlog::warn("coverage phase alone selected {} observations, above the target of {}",
                     out.selections.size(), plan.target_n);

    // Phase 2: top up projects whose selection lags their proportional
    // share of the target (never below the per-project minimum).
    std::map<std::string, std::vector<std::size_t>> by_project;
    std::map<std::string, std::size_t> selected_in;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        by_project[pop[i].project].push_back(i);
        if (taken[i]) ++selected_in[pop[i].project];
    }
    util::Rng rng2(util::mix_seed(plan.seed, 2));
    std::size_t budget = plan.target_n > out.selections.size() ? plan.target_n - out.selections.size() : 0;
    for (const auto& [project, members] : by_project) {
        const auto share = static_cast<std::size_t>(
            std::floor(static_cast<double>(plan.target_n) * static_cast<double>(members.size()) /
                       static_cast<double>(pop.size())));
        const std::size_t quota = std::max(plan.min_per_project, share);
        std::size_t k = quota > selected_in[project] ? quota - selected_in[project] : 0;
        k = std::min(k, budget);
        if (k == 0) continue;
        std::vector<std::size_t> stream;
        for (auto i : members)
            if (!taken[i]) stream.push_back(i);
        auto picks = phase2_reservoir(stream, k, rng2);
        out.phase2_k[project] = k;
        for (auto pos : picks) record(stream[pos], 2);
        budget -= picks.size();
    }

    util::Rng rng3(util::mix_seed(plan.seed, 3));
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (!taken[i]) pool.push_back(i);
    for (auto i : phase3_random_fill(pool, budget, rng3)) record(i, 3);

    std::stable_sort(out.selections.begin(), out.selections.end(),
                     [](const Selection& a, const Selection& b) {
                         return a.phase != b.phase ? a.phase < b.phase : a.index < b.index;
                     });
    return out;
}

void write_manifest(std::ostream& out, const SampleResult& result) {
    util::write_csv_row(out, {"id", "commit", "project", "type", "phase"});
    for (const auto& s : result.selections) {
        const auto& c = result.population[s.index];
        util::write_csv_row(out, {c.id, c.commit, c.project, c.type, std::to_string(s.phase)});
    }
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
    auto table = util::read_csv_file(path);
    const int cid = table.column("id"), ccommit = table.column("commit"), cproject = table.column("project"),
              ctype = table.column("type"), cphase = table.column("phase");
    if (cid < 0 || ccommit < 0 || cproject < 0 || ctype < 0 || cphase < 0)
        throw MalformedCsv(path + ": sample manifest header must be id,commit,project,type,phase");
    std::vector<ManifestRow> rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.header.size())
            throw MalformedCsv(path + ":" + std::to_string(table.lines[r]) + ": wrong field count");
        auto phase = util::parse_int(row[static_cast<std::size_t>(cphase)]);
        if (!phase || *phase < 1 || *phase > 3)
            throw MalformedCsv(path + ":" + std::to_string(table.lines[r]) + ": bad phase");
        rows.push_back({row[static_cast<std::size_t>(cid)], row[static_cast<std::size_t>(ccommit)],
                        row[static_cast<std::size_t>(cproject)], row[static_cast<std::size_t>(ctype)],
                        static_cast<int>(*phase)});
    }
    return rows;
}

}  // namespace refwhy::sampler
