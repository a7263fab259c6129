#include "datasuite/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "datasuite/error.hpp"
#include "datasuite/metrics.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "eval-downstream";

struct GiniBuilder {
    const Matrix& x;
    const std::vector<std::size_t>& y;  // class indices
    std::size_t n_classes;
    const ForestParams& params;
    std::size_t mtry;
    std::mt19937_64& rng;
    std::vector<ClassNode> nodes;

    static double gini(const std::vector<double>& counts, double total) {
        double s = 0.0;
        for (double c : counts) s += c * c;
        return 1.0 - s / (total * total);
    }

    std::int32_t build(std::vector<std::size_t>& idx, std::size_t depth) {
        const std::size_t m = idx.size();
        std::vector<double> counts(n_classes, 0.0);
        for (auto i : idx) counts[y[i]] += 1.0;
        const auto id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(ClassNode{});
        nodes[id].label = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        const double parent = gini(counts, static_cast<double>(m));
        const bool depth_ok = params.max_depth == 0 || depth < params.max_depth;
        if (!depth_ok || m < params.min_samples_split || m < 2 * params.min_samples_leaf || parent <= 0.0) return id;

        const auto d = static_cast<std::size_t>(x.cols());
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), 0);
        std::shuffle(features.begin(), features.end(), rng);

        double best = parent * static_cast<double>(m);  // weighted impurity to beat
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::size_t> order;
        std::vector<double> left(n_classes);
        for (std::size_t visited = 0; visited < d; ++visited) {
            if (visited >= mtry && best_feature >= 0) break;
            const auto f = static_cast<Eigen::Index>(features[visited]);
            order = idx;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x(static_cast<Eigen::Index>(a), f) < x(static_cast<Eigen::Index>(b), f);
            });
            std::fill(left.begin(), left.end(), 0.0);
            double ls = 0.0;  // sum of squared left counts, maintained incrementally
            double rs = 0.0;
            std::vector<double> right = counts;
            for (double c : right) rs += c * c;
            for (std::size_t p = 1; p < m; ++p) {
                const std::size_t c = y[order[p - 1]];
                ls += 2.0 * left[c] + 1.0;
                left[c] += 1.0;
                rs -= 2.0 * right[c] - 1.0;
                right[c] -= 1.0;
                if (p < params.min_samples_leaf || m - p < params.min_samples_leaf) continue;
                const double xa = x(static_cast<Eigen::Index>(order[p - 1]), f);
                const double xb = x(static_cast<Eigen::Index>(order[p]), f);
                if (!(xa < xb)) continue;
                const double nl = static_cast<double>(p), nr = static_cast<double>(m - p);
                const double w = (nl - ls / nl) + (nr - rs / nr);  // nl*gini_l + nr*gini_r
                if (w < best - 1e-12) {
                    best = w;
                    best_feature = static_cast<int>(f);
                    best_threshold = xa + 0.5 * (xb - xa);
                    if (!(best_threshold < xb)) best_threshold = xa;
                }
            }
        }
        if (best_feature < 0) return id;
        std::vector<std::size_t> li, ri;
        const auto bf = static_cast<Eigen::Index>(best_feature);
        for (auto i : idx) (x(static_cast<Eigen::Index>(i), bf) <= best_threshold ? li : ri).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        nodes[id].feature = best_feature;
        nodes[id].threshold = best_threshold;
        const auto l = build(li, depth + 1);
        const auto r = build(ri, depth + 1);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }
};

std::size_t tree_predict(const std::vector<ClassNode>& nodes, std::span<const double> row) {
    std::size_t k = 0;
    while (!nodes[k].is_leaf()) {
        const auto& nd = nodes[k];
        k = static_cast<std::size_t>(row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
    }
    return static_cast<std::size_t>(nodes[k].label);
}

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
    return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

TreeEnsembleClassifier fit_classifier(const Matrix& x, std::span<const int> labels, std::uint64_t seed,
                                      const ForestParams& params) {
    const auto n = static_cast<std::size_t>(x.rows());
    if (labels.size() != n) throw DataError(kModule, "label count does not match training rows");
    if (n == 0) throw DataError(kModule, "empty training set");
    if (params.trees == 0) throw UsageError(kModule, "forest needs at least one tree");
    TreeEnsembleClassifier clf;
    clf.classes_.assign(labels.begin(), labels.end());
    std::sort(clf.classes_.begin(), clf.classes_.end());
    clf.classes_.erase(std::unique(clf.classes_.begin(), clf.classes_.end()), clf.classes_.end());
    if (clf.classes_.size() < 2) throw DataError(kModule, "labels contain a single class");
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = static_cast<std::size_t>(std::lower_bound(clf.classes_.begin(), clf.classes_.end(), labels[i]) -
                                        clf.classes_.begin());

    const auto d = static_cast<std::size_t>(x.cols());
    const std::size_t mtry = params.max_features
                                 ? std::min(params.max_features, d)
                                 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    const std::size_t k = clf.classes_.size();
    std::vector<std::vector<double>> oob_votes(n, std::vector<double>(k, 0.0));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < params.trees; ++t) {
        std::vector<std::size_t> sample(n);
        std::vector<bool> in_bag(n, false);
        for (auto& s : sample) {
            s = pick(rng);
            in_bag[s] = true;
        }
        GiniBuilder b{x, y, k, params, mtry, rng, {}};
        b.build(sample, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (!in_bag[i]) oob_votes[i][tree_predict(b.nodes, row_span(x, static_cast<Eigen::Index>(i)))] += 1.0;
        clf.trees_.push_back(std::move(b.nodes));
    }
    std::size_t evaluated = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = oob_votes[i];
        if (std::accumulate(v.begin(), v.end(), 0.0) == 0.0) continue;
        ++evaluated;
        correct += static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()) == y[i] ? 1 : 0;
    }
    clf.oob_accuracy_ = evaluated ? static_cast<double>(correct) / static_cast<double>(evaluated) : 0.0;
    return clf;
}

std::size_t TreeEnsembleClassifier::predict_index(std::span<const double> row) const {
    if (trees_.empty()) throw UsageError(kModule, "classifier is not fitted");
    std::vector<std::size_t> votes(classes_.size(), 0);
    for (const auto& t : trees_) ++votes[tree_predict(t, row)];
    // max_element returns the first maximum: ties go to the lower class index
    return static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

int TreeEnsembleClassifier::predict(std::span<const double> row) const { return classes_[predict_index(row)]; }

std::vector<int> TreeEnsembleClassifier::predict(const Matrix& x) const {
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = predict(row_span(x, i));
    return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels, const IndexList& subset) {
    if (predicted.size() != labels.size()) throw DataError(kModule, "prediction and label counts differ");
    if (subset.empty()) throw DataError(kModule, "accuracy of an empty group");
    std::size_t correct = 0;
    for (auto i : subset) correct += predicted[i] == labels[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(subset.size());
}

StratificationAccuracy evaluate_stratification(const TreeEnsembleClassifier& clf, const Matrix& test,
                                               std::span<const int> labels, const StratificationReport& report,
                                               const std::vector<double>& proportions, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(test.rows());
    if (report.instances() != n || labels.size() != n)
        throw DataError(kModule, "stratification report does not cover the test set");
    const auto pred = clf.predict(test);
    StratificationAccuracy out;
    IndexList all(n);
    std::iota(all.begin(), all.end(), 0);
    out.baseline = accuracy(pred, labels, all);
    const auto flagged = report.inconsistency.flagged_indices();
    if (!flagged.empty()) out.inconsistent = accuracy(pred, labels, flagged);
    std::mt19937_64 rng(seed);
    for (double p : proportions) {
        const std::size_t count = std::min(group_size(p, n), n);
        if (count == 0) {
            out.skipped.push_back(p);
            continue;
        }
        const auto g = ranking_tails(report.ranking, count);
        GroupAccuracy ga;
        ga.proportion = p;
        ga.group_size = count;
        ga.certain = accuracy(pred, labels, g.certain);
        ga.uncertain = accuracy(pred, labels, g.uncertain);
        IndexList perm = all;
        std::shuffle(perm.begin(), perm.end(), rng);
        perm.resize(count);
        ga.random_control = accuracy(pred, labels, perm);
        out.groups.push_back(ga);
    }
    return out;
}

void write_accuracy_curve_csv(const std::string& path, const StratificationAccuracy& acc) {
    std::ofstream f(path);
    if (!f) throw DataError(kModule, "cannot write '" + path + "'");
    f.precision(17);
    f << "proportion,group_size,certain_accuracy,uncertain_accuracy,random_accuracy,baseline_accuracy\n";
    auto put = [&](const std::optional<double>& v) -> std::ofstream& {
        if (v)
            f << *v;
        else
            f << "NA";
        return f;
    };
    for (const auto& g : acc.groups) {
        f << g.proportion << ',' << g.group_size << ',';
        put(g.certain) << ',';
        put(g.uncertain) << ',';
        put(g.random_control) << ',' << acc.baseline << '\n';
    }
}

}  // namespace datasuite
