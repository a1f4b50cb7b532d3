#include "refwhy/stats/forest.hpp"

#include "refwhy/util/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

namespace refwhy::stats {

void Dataset::validate() const {
    if (rows.empty()) throw EmptyDataset("no rows");
    if (feature_names.empty()) throw EmptyDataset("no features");
    if (labels.size() != rows.size()) throw DomainError("label count does not match row count");
    if (class_names.empty()) throw DomainError("no class names");
    std::set<int> present;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != feature_names.size())
            throw DomainError("row " + std::to_string(i) + " has the wrong number of features");
        for (double v : rows[i])
            if (std::isnan(v)) throw DomainError("missing value in row " + std::to_string(i));
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= class_names.size())
            throw DomainError("label out of range in row " + std::to_string(i));
        present.insert(labels[i]);
    }
    if (present.size() < 2) throw SingleClass("all rows carry the same class");
}

namespace {

struct Node {
    int feature = -1;  // -1 = leaf
    double threshold = 0;
    int left = -1, right = -1;
    int label = 0;
};

struct Tree {
    std::vector<Node> nodes;

    int predict(const std::vector<double>& row) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const auto& nd = nodes[static_cast<std::size_t>(i)];
            i = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(i)].label;
    }
};

double gini(const std::vector<double>& counts, double n) {
    if (n <= 0) return 0;
    double s = 1;
    for (double c : counts) s -= (c / n) * (c / n);
    return s;
}

int majority(const std::vector<double>& counts) {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class TreeBuilder {
public:
    TreeBuilder(const Dataset& d, std::size_t mtry, std::size_t min_leaf, util::Rng& rng,
                std::vector<double>& gini_decrease)
        : d_(d), k_(d.class_names.size()), mtry_(mtry), min_leaf_(min_leaf), rng_(rng), mdg_(gini_decrease) {}

    Tree build(std::vector<std::size_t> sample) {
        grow(sample);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t>& idx) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        std::vector<double> counts(k_, 0);
        for (auto i : idx) counts[static_cast<std::size_t>(d_.labels[i])] += 1;
        const double n = static_cast<double>(idx.size());
        tree_.nodes[static_cast<std::size_t>(id)].label = majority(counts);
        const double g = gini(counts, n);
        if (g <= 0 || idx.size() < 2 * min_leaf_) return id;

        // Draw mtry distinct features.
        const std::size_t p = d_.feature_names.size();
        std::vector<std::size_t> features(p);
        for (std::size_t f = 0; f < p; ++f) features[f] = f;
        for (std::size_t i = 0; i < mtry_; ++i) {
            auto j = i + static_cast<std::size_t>(rng_.uniform_index(p - i));
            std::swap(features[i], features[j]);
        }

        double best_gain = 0;
        int best_feature = -1;
        double best_threshold = 0;
        std::vector<std::pair<double, int>> vals(idx.size());
        for (std::size_t fi = 0; fi < mtry_; ++fi) {
            const std::size_t f = features[fi];
            for (std::size_t r = 0; r < idx.size(); ++r) vals[r] = {d_.rows[idx[r]][f], d_.labels[idx[r]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;
            std::vector<double> left(k_, 0), right = counts;
            for (std::size_t r = 0; r + 1 < vals.size(); ++r) {
                left[static_cast<std::size_t>(vals[r].second)] += 1;
                right[static_cast<std::size_t>(vals[r].second)] -= 1;
                if (vals[r].first == vals[r + 1].first) continue;
                const std::size_t nl = r + 1, nr = vals.size() - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double dl = static_cast<double>(nl), dr = static_cast<double>(nr);
                const double gain = n * g - dl * gini(left, dl) - dr * gini(right, dr);
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = (vals[r].first + vals[r + 1].first) / 2;
                }
            }
        }
        if (best_feature < 0) return id;

        mdg_[static_cast<std::size_t>(best_feature)] += best_gain;
        std::vector<std::size_t> li, ri;
        for (auto i : idx)
            (d_.rows[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? li : ri).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int l = grow(li);
        const int r = grow(ri);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    const Dataset& d_;
    std::size_t k_, mtry_, min_leaf_;
    util::Rng& rng_;
    std::vector<double>& mdg_;
    Tree tree_;
};

struct TreeOutcome {
    std::vector<double> gini_decrease;
    std::vector<double> accuracy_drop;  // fraction, per feature
    bool has_oob = false;
    std::vector<std::pair<std::size_t, int>> oob_votes;
};

TreeOutcome train_one(const Dataset& d, std::size_t mtry, std::size_t min_leaf, std::uint64_t seed) {
    util::Rng rng(seed);
    const std::size_t n = d.rows.size(), p = d.feature_names.size();
    TreeOutcome out;
    out.gini_decrease.assign(p, 0);
    out.accuracy_drop.assign(p, 0);

    std::vector<std::size_t> boot(n);
    std::vector<bool> in_bag(n, false);
    for (auto& b : boot) {
        b = static_cast<std::size_t>(rng.uniform_index(n));
        in_bag[b] = true;
    }
    TreeBuilder builder(d, mtry, min_leaf, rng, out.gini_decrease);
    Tree tree = builder.build(boot);

    std::vector<std::size_t> oob;
    for (std::size_t i = 0; i < n; ++i)
        if (!in_bag[i]) oob.push_back(i);
    if (oob.empty()) return out;
    out.has_oob = true;

    std::size_t correct = 0;
    for (auto i : oob) {
        int pred = tree.predict(d.rows[i]);
        out.oob_votes.push_back({i, pred});
        correct += pred == d.labels[i];
    }
    const double base = static_cast<double>(correct) / static_cast<double>(oob.size());

    std::vector<double> row;
    for (std::size_t f = 0; f < p; ++f) {
        std::vector<double> column;
        for (auto i : oob) column.push_back(d.rows[i][f]);
        rng.shuffle(column);
        std::size_t hit = 0;
        for (std::size_t r = 0; r < oob.size(); ++r) {
            row = d.rows[oob[r]];
            row[f] = column[r];
            hit += tree.predict(row) == d.labels[oob[r]];
        }
        out.accuracy_drop[f] = base - static_cast<double>(hit) / static_cast<double>(oob.size());
    }
    return out;
}

}  // namespace

ForestReport rf_train_and_importance(const Dataset& data, const ForestConfig& config) {
    data.validate();
    if (config.n_trees == 0) throw DomainError("n_trees must be positive");
    const std::size_t p = data.feature_names.size();
    std::size_t mtry = config.mtry ? config.mtry : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p))));
    mtry = std::clamp<std::size_t>(mtry, 1, p);
    const std::size_t min_leaf = std::max<std::size_t>(config.min_leaf, 1);

    std::vector<TreeOutcome> outcomes(config.n_trees);
    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_trees));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < config.n_trees;)
            outcomes[t] = train_one(data, mtry, min_leaf, util::mix_seed(config.seed, t));
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Reduce in tree order so floating-point sums do not depend on scheduling.
    ForestReport rep;
    rep.importance.resize(p);
    std::size_t trees_with_oob = 0;
    std::vector<std::vector<std::size_t>> votes(data.rows.size(), std::vector<std::size_t>(data.class_names.size(), 0));
    for (const auto& o : outcomes) {
        for (std::size_t f = 0; f < p; ++f) rep.importance[f].mdg += o.gini_decrease[f];
        if (!o.has_oob) continue;
        ++trees_with_oob;
        for (std::size_t f = 0; f < p; ++f) rep.importance[f].mda += o.accuracy_drop[f];
        for (const auto& [i, c] : o.oob_votes) ++votes[i][static_cast<std::size_t>(c)];
    }
    for (std::size_t f = 0; f < p; ++f) {
        rep.importance[f].feature = data.feature_names[f];
        rep.importance[f].mdg /= static_cast<double>(config.n_trees);
        rep.importance[f].mda = trees_with_oob ? 100.0 * rep.importance[f].mda / static_cast<double>(trees_with_oob) : 0;
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        std::size_t total = 0;
        for (auto v : votes[i]) total += v;
        if (total == 0) continue;
        ++rep.oob_rows;
        auto best = std::max_element(votes[i].begin(), votes[i].end()) - votes[i].begin();
        correct += best == data.labels[i];
    }
    rep.oob_accuracy = rep.oob_rows ? static_cast<double>(correct) / static_cast<double>(rep.oob_rows) : 0;
    return rep;
}

}  // namespace refwhy::stats
