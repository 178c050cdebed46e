#pragma once

#include "approxdt/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace approxdt {

using NodeId = std::int32_t;

struct TreeNode {
    bool is_leaf = true;
    // split nodes
    std::int32_t feature = -1;
    double threshold = 0.0;
    NodeId left = -1;
    NodeId right = -1;
    // leaves
    std::int32_t class_label = 0;

    static TreeNode leaf(std::int32_t label) noexcept { return TreeNode{.is_leaf = true, .class_label = label}; }
    static TreeNode split(std::int32_t feature, double threshold, NodeId left, NodeId right) noexcept
    {
        return TreeNode{.is_leaf = false, .feature = feature, .threshold = threshold, .left = left, .right = right};
    }

    friend bool operator==(TreeNode const&, TreeNode const&) = default;
};

/// Binary decision tree of `x[feature] <= threshold` comparators.
///
/// Node ids are positions in `nodes()`. Comparators (split nodes) are indexed
/// 0..N-1 in ascending node-id order; that order is the gene order of a
/// chromosome.
class DecisionTree {
public:
    DecisionTree() = default;

    /// Validates the structure: proper binary arity, no cycles, every node
    /// reachable exactly once from `root`, thresholds in [0,1], labels < C.
    DecisionTree(std::vector<TreeNode> nodes, NodeId root, std::size_t class_count);

    [[nodiscard]] std::span<TreeNode const> nodes() const noexcept { return nodes_; }
    [[nodiscard]] TreeNode const& node(NodeId id) const noexcept { return nodes_[static_cast<std::size_t>(id)]; }
    [[nodiscard]] NodeId root() const noexcept { return root_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return class_count_; }

    /// N, the number of split nodes.
    [[nodiscard]] std::size_t comparator_count() const noexcept { return comparators_.size(); }
    /// Node ids of the split nodes, ascending.
    [[nodiscard]] std::span<NodeId const> comparators() const noexcept { return comparators_; }
    /// Comparator index of a split node, -1 for leaves.
    [[nodiscard]] std::int32_t comparator_index(NodeId id) const noexcept
    {
        return comparator_of_node_[static_cast<std::size_t>(id)];
    }

    /// Largest feature index read by any split, or -1.
    [[nodiscard]] std::int32_t max_feature() const noexcept { return max_feature_; }
    [[nodiscard]] std::size_t depth() const noexcept { return depth_; }

    friend bool operator==(DecisionTree const& a, DecisionTree const& b) noexcept
    {
        return a.root_ == b.root_ && a.class_count_ == b.class_count_ && a.nodes_ == b.nodes_;
    }

private:
    std::vector<TreeNode> nodes_;
    NodeId root_ = 0;
    std::size_t class_count_ = 0;
    std::vector<NodeId> comparators_;
    std::vector<std::int32_t> comparator_of_node_;
    std::int32_t max_feature_ = -1;
    std::size_t depth_ = 0;
};

struct CartConfig {
    std::optional<std::size_t> max_depth;
    std::size_t min_samples_split = 2;
    // The split search is exhaustive and tie-broken deterministically, so
    // nothing consumes this; kept so configs round-trip.
    std::uint64_t seed = 0;
};

/// Greedy Gini CART. Candidate thresholds are midpoints between consecutive
/// distinct feature values. A node is split whenever a candidate exists and
/// it is impure, large enough and above the depth limit. Best split: lowest
/// weighted Gini, ties to lower feature then lower threshold.
DecisionTree train_cart(Dataset const& train, CartConfig const& config = {});

/// Goes left iff sample[feature] <= threshold.
int predict(DecisionTree const& tree, std::span<double const> sample);

double accuracy(DecisionTree const& tree, Dataset const& data);

nlohmann::json tree_to_json(DecisionTree const& tree);
DecisionTree tree_from_json(nlohmann::json const& j);

void export_json(DecisionTree const& tree, std::filesystem::path const& path);
DecisionTree import_json(std::filesystem::path const& path);

} // namespace approxdt
