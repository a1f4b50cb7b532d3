#include "refwhy/metrics/accumulator.hpp"

#include "refwhy/util/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace refwhy::metrics {

namespace {
constexpr double kDay = 86400.0;
}

double entropy(const std::vector<std::int64_t>& churns) {
    std::int64_t total = 0;
    std::size_t live = 0;
    for (auto c : churns)
        if (c > 0) {
            total += c;
            ++live;
        }
    if (live <= 1 || total == 0) return 0.0;
    double h = 0;
    for (auto c : churns) {
        if (c <= 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h / std::log2(static_cast<double>(live));
}

Ownership ownership(const std::map<std::string, std::int64_t>& added_by_author) {
    std::int64_t total = 0, top = 0;
    for (const auto& [a, n] : added_by_author) {
        total += n;
        top = std::max(top, n);
    }
    Ownership o;
    if (total == 0) return o;
    o.own = static_cast<double>(top) / static_cast<double>(total);
    for (const auto& [a, n] : added_by_author)
        if (static_cast<double>(n) / static_cast<double>(total) < 0.05) ++o.minor;
    return o;
}

FixDetector::FixDetector(const std::vector<std::string>& keywords) {
    std::string alt;
    for (const auto& k : keywords) {
        if (!alt.empty()) alt += '|';
        for (char c : k) {
            if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) alt += '\\';
            alt += c;
        }
    }
    re_ = std::regex("\\b(" + alt + ")\\b", std::regex::ECMAScript | std::regex::icase);
}

bool FixDetector::operator()(const std::string& message) const {
    return std::regex_search(message, re_);
}

bool detect_fix(const std::string& message) {
    static const FixDetector detector;
    return detector(message);
}

MetricsAccumulator::MetricsAccumulator(MetricsConfig cfg)
    : cfg_(std::move(cfg)), fix_(cfg_.fix_keywords) {}

void MetricsAccumulator::warn(const std::string& kind, const std::string& commit,
                              const std::string& detail) {
    spdlog::warn("{} in {}: {}", kind, commit, detail);
    warnings_.push_back({kind, commit, detail});
}

std::vector<MetricVector> MetricsAccumulator::accumulate(const history::CommitRecord& commit) {
    using history::ChangeKind;
    const std::int64_t t = commit.timestamp;
    const std::string& author = commit.author_id;
    if (max_timestamp_ != INT64_MIN && t < max_timestamp_ - cfg_.clock_skew_tolerance_s)
        warn("OutOfOrderCommit", commit.id,
             "timestamp " + std::to_string(t) + " precedes earlier commit at " +
                 std::to_string(max_timestamp_));
    const std::int64_t adev_from = t - cfg_.adev_window_days * 86400;
    const std::int64_t rexp_from = t - cfg_.rexp_window_days * 86400;

    // Resolve every change against the pre-commit path map. nullopt = fresh lineage.
    std::vector<std::optional<std::size_t>> resolved;
    for (const auto& ch : commit.changes) {
        if (ch.kind == ChangeKind::added) {
            resolved.emplace_back();
            continue;
        }
        const std::string& from = ch.kind == ChangeKind::renamed && ch.old_path ? *ch.old_path : ch.path;
        auto it = path_to_lineage_.find(from);
        if (it == path_to_lineage_.end()) {
            warn("UnknownParentState", commit.id,
                 "'" + from + "' has no recorded history; treated as added");
            resolved.emplace_back();
        } else {
            resolved.emplace_back(it->second);
        }
    }

    std::set<std::string> dirs, subsystems;
    std::vector<std::int64_t> churns;
    for (const auto& ch : commit.changes) {
        dirs.insert(util::parent_dir(ch.path));
        subsystems.insert(util::first_segment(ch.path));
        churns.push_back(ch.lines_added + ch.lines_deleted);
    }
    const double ent = entropy(churns);
    const bool fix = fix_(commit.message);

    double oexp = 0, exp = 0;
    if (project_added_ > 0) {
        auto it = author_added_.find(author);
        if (it != author_added_.end())
            oexp = 100.0 * static_cast<double>(it->second) / static_cast<double>(project_added_);
        double sum = 0;
        for (const auto& [a, n] : author_added_)
            sum += 100.0 * static_cast<double>(n) / static_cast<double>(project_added_);
        exp = sum / static_cast<double>(author_added_.size());
    }

    std::unordered_set<std::string> ndev_authors;
    for (const auto& r : resolved)
        if (r)
            for (auto j : lineages_[*r].commits) ndev_authors.insert(commits_[j].author);

    std::vector<MetricVector> out;
    out.reserve(commit.changes.size());
    for (std::size_t k = 0; k < commit.changes.size(); ++k) {
        const auto& ch = commit.changes[k];
        MetricVector v;
        v.commit_id = commit.id;
        v.file_path = ch.path;
        v.LA = ch.lines_added;
        v.LD = ch.lines_deleted;
        v.LT = ch.lines_before;
        v.ADD = static_cast<double>(v.LA) / static_cast<double>(std::max<std::int64_t>(v.LT, 1));
        v.DELE = static_cast<double>(v.LD) / static_cast<double>(std::max<std::int64_t>(v.LT, 1));
        v.ND = v.SCTR = static_cast<std::int64_t>(dirs.size());
        v.NS = static_cast<std::int64_t>(subsystems.size());
        v.NF = static_cast<std::int64_t>(commit.changes.size());
        v.ENTROPY = ent;
        v.FIX = fix;
        v.OEXP = oexp;
        v.EXP = exp;
        v.NDEV = static_cast<std::int64_t>(ndev_authors.size());

        const std::string pkg = util::parent_dir(ch.path);
        {
            auto it = author_dir_commits_.find({author, pkg});
            v.SEXP = it == author_dir_commits_.end() ? 0 : it->second;
        }

        if (resolved[k]) {
            const Lineage& lin = lineages_[*resolved[k]];
            std::set<std::string> distinct, active, sectors;
            for (auto j : lin.commits) {
                const auto& ci = commits_[j];
                distinct.insert(ci.author);
                if (ci.timestamp >= adev_from) active.insert(ci.author);
                if (ci.author == author) {
                    ++v.CEXP;
                    if (ci.timestamp >= rexp_from) ++v.REXP;
                    sectors.insert(ci.dirs.begin(), ci.dirs.end());
                }
            }
            v.COMM = v.NUC = static_cast<std::int64_t>(lin.commits.size());
            v.DDEV = static_cast<std::int64_t>(distinct.size());
            v.ADEV = static_cast<std::int64_t>(active.size());
            v.NSCTR = static_cast<std::int64_t>(sectors.size());
            if (!lin.commits.empty()) {
                double age = static_cast<double>(t - commits_[lin.commits.back()].timestamp) / kDay;
                v.AGE = std::max(age, 0.0);
            }
            auto own = ownership(lin.added_by);
            v.OWN = own.own;
            v.MINOR = own.minor;

            std::set<std::size_t> neighbours;
            for (auto g : lin.co_changed)
                neighbours.insert(lineages_[g].commits.begin(), lineages_[g].commits.end());
            std::set<std::string> n_distinct, n_active;
            for (auto j : neighbours) {
                n_distinct.insert(commits_[j].author);
                if (commits_[j].timestamp >= adev_from) n_active.insert(commits_[j].author);
            }
            v.NCOMM = static_cast<std::int64_t>(neighbours.size());
            v.NDDEV = static_cast<std::int64_t>(n_distinct.size());
            v.NADEV = static_cast<std::int64_t>(n_active.size());
        }
        out.push_back(std::move(v));
    }

    // Fold the commit into the state.
    const std::size_t ci = commits_.size();
    commits_.push_back({author, t, dirs});
    max_timestamp_ = std::max(max_timestamp_, t);

    std::vector<std::size_t> touched;
    for (std::size_t k = 0; k < commit.changes.size(); ++k) {
        std::size_t id;
        if (resolved[k]) {
            id = *resolved[k];
        } else {
            id = lineages_.size();
            lineages_.emplace_back();
        }
        touched.push_back(id);
        Lineage& lin = lineages_[id];
        lin.commits.push_back(ci);
        lin.added_by[author] += commit.changes[k].lines_added;
    }
    for (auto id : touched) lineages_[id].co_changed.insert(touched.begin(), touched.end());

    for (const auto& ch : commit.changes) {
        if (ch.kind == ChangeKind::deleted) path_to_lineage_.erase(ch.path);
        if (ch.kind == ChangeKind::renamed && ch.old_path) path_to_lineage_.erase(*ch.old_path);
    }
    for (std::size_t k = 0; k < commit.changes.size(); ++k)
        if (commit.changes[k].kind != ChangeKind::deleted)
            path_to_lineage_[commit.changes[k].path] = touched[k];

    std::int64_t added = 0;
    for (const auto& ch : commit.changes) added += ch.lines_added;
    author_added_[author] += added;
    project_added_ += added;
    for (const auto& d : dirs) ++author_dir_commits_[{author, d}];

    return out;
}

}  // namespace refwhy::metrics
