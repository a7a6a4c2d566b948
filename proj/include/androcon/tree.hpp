// CART-style decision tree shared by the classifiers: Gini splits for
// classification, squared-error splits on pseudo-residuals for boosting.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "androcon/common.hpp"

namespace androcon {

struct TreeGrowth {
    int max_depth = 10;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    int feature_subsample = 0;  // 0 = consider all features at each split
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Eigen::VectorXd value;  // class fractions, or a single regression mean
    int n_samples = 0;
};

class DecisionTree {
public:
    /// Gini-impurity classification tree. rng enables per-split feature
    /// subsampling (random forest); null considers every feature.
    static DecisionTree fit_classifier(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                       int num_classes, const TreeGrowth& growth,
                                       Rng* rng = nullptr) {
        DecisionTree tree;
        tree.num_classes_ = num_classes;
        std::vector<int> idx(static_cast<size_t>(x.rows()));
        std::iota(idx.begin(), idx.end(), 0);
        tree.grow(x, &y, nullptr, idx, 0, growth, rng);
        return tree;
    }

    /// Squared-error regression tree.
    static DecisionTree fit_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const TreeGrowth& growth, Rng* rng = nullptr) {
        DecisionTree tree;
        tree.num_classes_ = 0;
        std::vector<int> idx(static_cast<size_t>(x.rows()));
        std::iota(idx.begin(), idx.end(), 0);
        tree.grow(x, nullptr, &y, idx, 0, growth, rng);
        return tree;
    }

    int leaf_index(const Eigen::RowVectorXd& row) const {
        int node = 0;
        while (nodes_[static_cast<size_t>(node)].feature >= 0) {
            const TreeNode& n = nodes_[static_cast<size_t>(node)];
            node = row(n.feature) <= n.threshold ? n.left : n.right;
        }
        return node;
    }

    const Eigen::VectorXd& predict_value(const Eigen::RowVectorXd& row) const {
        return nodes_[static_cast<size_t>(leaf_index(row))].value;
    }

    /// Argmax class with lowest-id tie-break.
    int predict_class(const Eigen::RowVectorXd& row) const {
        const Eigen::VectorXd& v = predict_value(row);
        int best = 0;
        for (int c = 1; c < v.size(); ++c)
            if (v(c) > v(best)) best = c;
        return best;
    }

    int depth() const {
        return node_depth(0);
    }

    std::vector<TreeNode>& nodes() { return nodes_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    int num_classes() const { return num_classes_; }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& n : nodes_) {
            arr.push_back({{"f", n.feature},
                           {"t", n.threshold},
                           {"l", n.left},
                           {"r", n.right},
                           {"v", std::vector<double>(n.value.data(), n.value.data() + n.value.size())},
                           {"n", n.n_samples}});
        }
        return {{"num_classes", num_classes_}, {"nodes", arr}};
    }

    static DecisionTree from_json(const nlohmann::json& j) {
        DecisionTree tree;
        tree.num_classes_ = j.at("num_classes").get<int>();
        for (const auto& nj : j.at("nodes")) {
            TreeNode n;
            n.feature = nj.at("f").get<int>();
            n.threshold = nj.at("t").get<double>();
            n.left = nj.at("l").get<int>();
            n.right = nj.at("r").get<int>();
            auto v = nj.at("v").get<std::vector<double>>();
            n.value = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
            n.n_samples = nj.at("n").get<int>();
            tree.nodes_.push_back(std::move(n));
        }
        if (tree.nodes_.empty()) throw Error(ErrorCode::InvalidSpec, "tree without nodes");
        return tree;
    }

private:
    std::vector<TreeNode> nodes_;
    int num_classes_ = 0;

    int node_depth(int node) const {
        const TreeNode& n = nodes_[static_cast<size_t>(node)];
        if (n.feature < 0) return 0;
        return 1 + std::max(node_depth(n.left), node_depth(n.right));
    }

    Eigen::VectorXd leaf_value(const std::vector<int>& idx, const std::vector<int>* labels,
                               const Eigen::VectorXd* targets) const {
        if (labels) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(num_classes_);
            for (int i : idx) v((*labels)[static_cast<size_t>(i)]) += 1.0;
            v /= static_cast<double>(idx.size());
            return v;
        }
        double sum = 0.0;
        for (int i : idx) sum += (*targets)(i);
        return Eigen::VectorXd::Constant(1, sum / static_cast<double>(idx.size()));
    }

    struct Split {
        bool found = false;
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    /// Best split over the candidate features. Features and thresholds are
    /// scanned in ascending order and ties keep the first candidate, so the
    /// result is deterministic.
    Split best_split(const Eigen::MatrixXd& x, const std::vector<int>* labels,
                     const Eigen::VectorXd* targets, const std::vector<int>& idx,
                     const TreeGrowth& growth, Rng* rng) const {
        const int d = static_cast<int>(x.cols());
        const int n = static_cast<int>(idx.size());

        std::vector<int> features(static_cast<size_t>(d));
        std::iota(features.begin(), features.end(), 0);
        if (growth.feature_subsample > 0 && growth.feature_subsample < d && rng) {
            // Partial Fisher-Yates, then restore ascending order.
            for (int i = 0; i < growth.feature_subsample; ++i) {
                int j = i + static_cast<int>(rng->uniform_int(static_cast<uint64_t>(d - i)));
                std::swap(features[static_cast<size_t>(i)], features[static_cast<size_t>(j)]);
            }
            features.resize(static_cast<size_t>(growth.feature_subsample));
            std::sort(features.begin(), features.end());
        }

        double parent_score;  // impurity * n (classification) or SSE (regression)
        std::vector<double> class_counts;
        if (labels) {
            class_counts.assign(static_cast<size_t>(num_classes_), 0.0);
            for (int i : idx) class_counts[static_cast<size_t>((*labels)[static_cast<size_t>(i)])] += 1.0;
            double sq = 0.0;
            for (double c : class_counts) sq += c * c;
            parent_score = static_cast<double>(n) - sq / static_cast<double>(n);  // n * Gini
        } else {
            double s = 0.0, s2 = 0.0;
            for (int i : idx) {
                s += (*targets)(i);
                s2 += (*targets)(i) * (*targets)(i);
            }
            parent_score = s2 - s * s / static_cast<double>(n);
        }
        if (parent_score <= 1e-12) return {};  // already pure

        Split best;
        std::vector<int> order;
        for (int f : features) {
            order = idx;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                double va = x(a, f), vb = x(b, f);
                if (va != vb) return va < vb;
                return a < b;
            });

            // Incremental left-side statistics.
            std::vector<double> left_counts;
            double left_sum = 0.0, left_sq = 0.0;
            double total_sum = 0.0, total_sq = 0.0;
            if (labels) {
                left_counts.assign(static_cast<size_t>(num_classes_), 0.0);
            } else {
                for (int i : order) {
                    total_sum += (*targets)(i);
                    total_sq += (*targets)(i) * (*targets)(i);
                }
            }

            for (int pos = 0; pos < n - 1; ++pos) {
                int i = order[static_cast<size_t>(pos)];
                if (labels) {
                    left_counts[static_cast<size_t>((*labels)[static_cast<size_t>(i)])] += 1.0;
                } else {
                    left_sum += (*targets)(i);
                    left_sq += (*targets)(i) * (*targets)(i);
                }
                const int n_left = pos + 1;
                const int n_right = n - n_left;
                if (n_left < growth.min_samples_leaf || n_right < growth.min_samples_leaf)
                    continue;
                double a = x(i, f);
                double b = x(order[static_cast<size_t>(pos + 1)], f);
                if (a == b) continue;  // cannot split between equal values

                double child_score;
                if (labels) {
                    double left_sq_counts = 0.0, right_sq_counts = 0.0;
                    for (int c = 0; c < num_classes_; ++c) {
                        double lc = left_counts[static_cast<size_t>(c)];
                        double rc = class_counts[static_cast<size_t>(c)] - lc;
                        left_sq_counts += lc * lc;
                        right_sq_counts += rc * rc;
                    }
                    child_score = (n_left - left_sq_counts / n_left) +
                                  (n_right - right_sq_counts / n_right);
                } else {
                    double right_sum = total_sum - left_sum;
                    double right_sq = total_sq - left_sq;
                    child_score = (left_sq - left_sum * left_sum / n_left) +
                                  (right_sq - right_sum * right_sum / n_right);
                }

                double gain = parent_score - child_score;
                if (gain > best.gain + 1e-12) {
                    double thr = 0.5 * (a + b);
                    if (!(thr >= a) || thr >= b) thr = a;  // keep the scanned partition exact
                    best.found = true;
                    best.feature = f;
                    best.threshold = thr;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int grow(const Eigen::MatrixXd& x, const std::vector<int>* labels,
             const Eigen::VectorXd* targets, const std::vector<int>& idx, int depth,
             const TreeGrowth& growth, Rng* rng) {
        const int me = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[static_cast<size_t>(me)].n_samples = static_cast<int>(idx.size());
        nodes_[static_cast<size_t>(me)].value = leaf_value(idx, labels, targets);

        if (depth >= growth.max_depth ||
            static_cast<int>(idx.size()) < growth.min_samples_split)
            return me;

        Split split = best_split(x, labels, targets, idx, growth, rng);
        if (!split.found) return me;

        std::vector<int> left_idx, right_idx;
        for (int i : idx)
            (x(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);

        nodes_[static_cast<size_t>(me)].feature = split.feature;
        nodes_[static_cast<size_t>(me)].threshold = split.threshold;
        int l = grow(x, labels, targets, left_idx, depth + 1, growth, rng);
        int r = grow(x, labels, targets, right_idx, depth + 1, growth, rng);
        nodes_[static_cast<size_t>(me)].left = l;
        nodes_[static_cast<size_t>(me)].right = r;
        return me;
    }
};

}  // namespace androcon
