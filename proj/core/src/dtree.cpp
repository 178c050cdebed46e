#include "approxdt/dtree.hpp"

#include "approxdt/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

namespace approxdt {

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, NodeId root, std::size_t class_count)
    : nodes_(std::move(nodes)), root_(root), class_count_(class_count)
{
    auto const n = static_cast<NodeId>(nodes_.size());
    if (n == 0) {
        throw InputError("tree: no nodes");
    }
    if (root_ < 0 || root_ >= n) {
        throw InputError("tree: root id " + std::to_string(root_) + " does not exist");
    }
    if (class_count_ < 1) {
        throw InputError("tree: class_count must be positive");
    }
    for (NodeId id = 0; id < n; ++id) {
        auto const& nd = nodes_[static_cast<std::size_t>(id)];
        if (nd.is_leaf) {
            if (nd.class_label < 0 || static_cast<std::size_t>(nd.class_label) >= class_count_) {
                throw InputError("tree: leaf " + std::to_string(id) + " has class " + std::to_string(nd.class_label) +
                                 " outside 0.." + std::to_string(class_count_ - 1));
            }
            continue;
        }
        if (nd.feature < 0) {
            throw InputError("tree: node " + std::to_string(id) + " has negative feature index");
        }
        if (!std::isfinite(nd.threshold) || nd.threshold < 0.0 || nd.threshold > 1.0) {
            throw InputError("tree: node " + std::to_string(id) + " threshold " + std::to_string(nd.threshold) +
                             " outside [0,1]");
        }
        for (NodeId child : {nd.left, nd.right}) {
            if (child < 0 || child >= n) {
                throw InputError("tree: node " + std::to_string(id) + " references missing child " +
                                 std::to_string(child));
            }
        }
        if (nd.left == nd.right) {
            throw InputError("tree: node " + std::to_string(id) + " has identical children");
        }
    }

    // 0 = unseen, 1 = on current path, 2 = finished
    std::vector<std::uint8_t> state(nodes_.size(), 0);
    struct Frame {
        NodeId id;
        std::size_t depth;
        int next_child;
    };
    std::vector<Frame> stack{{root_, 0, 0}};
    state[static_cast<std::size_t>(root_)] = 1;
    while (!stack.empty()) {
        auto& top = stack.back();
        auto const& nd = nodes_[static_cast<std::size_t>(top.id)];
        depth_ = std::max(depth_, top.depth);
        if (nd.is_leaf || top.next_child == 2) {
            state[static_cast<std::size_t>(top.id)] = 2;
            stack.pop_back();
            continue;
        }
        NodeId const child = top.next_child == 0 ? nd.left : nd.right;
        ++top.next_child;
        auto& s = state[static_cast<std::size_t>(child)];
        if (s == 1) {
            throw InputError("tree: cycle through node " + std::to_string(child));
        }
        if (s == 2) {
            throw InputError("tree: node " + std::to_string(child) + " is reachable more than once");
        }
        s = 1;
        stack.push_back({child, top.depth + 1, 0});
    }
    for (NodeId id = 0; id < n; ++id) {
        if (state[static_cast<std::size_t>(id)] != 2) {
            throw InputError("tree: node " + std::to_string(id) + " is unreachable from the root");
        }
    }

    comparator_of_node_.assign(nodes_.size(), -1);
    for (NodeId id = 0; id < n; ++id) {
        auto const& nd = nodes_[static_cast<std::size_t>(id)];
        if (!nd.is_leaf) {
            comparator_of_node_[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(comparators_.size());
            comparators_.push_back(id);
            max_feature_ = std::max(max_feature_, nd.feature);
        }
    }
}

namespace {

using u128 = unsigned __int128;

// Weighted Gini of a split is n - (S_L/n_L + S_R/n_R) with S = sum of squared
// class counts, so the best split maximizes the bracket. Kept as an exact
// fraction to make ties reproducible.
struct SplitScore {
    u128 num = 0;
    u128 den = 1;

    [[nodiscard]] bool better_than(SplitScore const& o) const noexcept { return num * o.den > o.num * den; }
};

class CartBuilder {
public:
    CartBuilder(Dataset const& data, CartConfig const& cfg) : data_(data), cfg_(cfg) {}

    NodeId grow(std::vector<std::size_t>& rows, std::size_t depth)
    {
        auto const counts = class_counts(rows);
        int const majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        auto const distinct = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });

        bool const stop = distinct <= 1 || rows.size() < cfg_.min_samples_split ||
                          (cfg_.max_depth && depth >= *cfg_.max_depth);
        std::optional<Best> best;
        if (!stop) {
            best = find_split(rows);
        }
        if (!best) {
            nodes_.push_back(TreeNode::leaf(majority));
            return static_cast<NodeId>(nodes_.size() - 1);
        }

        auto const id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back(TreeNode::split(best->feature, best->threshold, -1, -1));

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (data_.at(r, static_cast<std::size_t>(best->feature)) <= best->threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        NodeId const l = grow(left, depth + 1);
        NodeId const r = grow(right, depth + 1);
        nodes_[static_cast<std::size_t>(id)].left = l;
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    std::vector<TreeNode> take() { return std::move(nodes_); }

private:
    struct Best {
        std::int32_t feature;
        double threshold;
        SplitScore score;
    };

    std::vector<std::uint64_t> class_counts(std::vector<std::size_t> const& rows) const
    {
        std::vector<std::uint64_t> counts(data_.class_count(), 0);
        for (auto r : rows) {
            ++counts[static_cast<std::size_t>(data_.label(r))];
        }
        return counts;
    }

    std::optional<Best> find_split(std::vector<std::size_t> const& rows) const
    {
        std::optional<Best> best;
        auto const n = rows.size();
        auto const C = data_.class_count();
        std::vector<std::size_t> order(rows);
        std::vector<std::uint64_t> left(C);
        auto const total = class_counts(rows);

        for (std::size_t f = 0; f < data_.cols(); ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                double const va = data_.at(a, f);
                double const vb = data_.at(b, f);
                return va < vb || (va == vb && a < b);
            });
            std::fill(left.begin(), left.end(), 0);
            u128 sq_left = 0;
            u128 sq_right = 0;
            for (auto c : total) {
                sq_right += static_cast<u128>(c) * c;
            }
            for (std::size_t i = 0; i + 1 < n; ++i) {
                auto const y = static_cast<std::size_t>(data_.label(order[i]));
                // moving one sample of class y across updates the square sums
                auto const lc = left[y];
                auto const rc = total[y] - lc;
                sq_left += 2 * static_cast<u128>(lc) + 1;
                sq_right -= 2 * static_cast<u128>(rc) - 1;
                ++left[y];

                double const a = data_.at(order[i], f);
                double const b = data_.at(order[i + 1], f);
                if (!(a < b)) {
                    continue;
                }
                u128 const n_left = i + 1;
                u128 const n_right = n - n_left;
                SplitScore const score{sq_left * n_right + sq_right * n_left, n_left * n_right};
                if (!best || score.better_than(best->score)) {
                    double t = (a + b) / 2.0;
                    if (!(t < b)) {
                        t = a;
                    }
                    best = Best{static_cast<std::int32_t>(f), t, score};
                }
            }
        }
        return best;
    }

    Dataset const& data_;
    CartConfig const& cfg_;
    std::vector<TreeNode> nodes_;
};

} // namespace

DecisionTree train_cart(Dataset const& train, CartConfig const& config)
{
    if (train.rows() == 0) {
        throw InputError("train_cart: empty training set");
    }
    if (config.min_samples_split < 2) {
        throw InputError("train_cart: min_samples_split must be at least 2");
    }
    std::vector<std::size_t> rows(train.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    CartBuilder builder{train, config};
    NodeId const root = builder.grow(rows, 0);
    return DecisionTree{builder.take(), root, train.class_count()};
}

int predict(DecisionTree const& tree, std::span<double const> sample)
{
    if (static_cast<std::int64_t>(sample.size()) <= tree.max_feature()) {
        throw InputError("predict: sample has " + std::to_string(sample.size()) + " features, tree reads feature " +
                         std::to_string(tree.max_feature()));
    }
    NodeId id = tree.root();
    while (true) {
        auto const& nd = tree.node(id);
        if (nd.is_leaf) {
            return nd.class_label;
        }
        id = sample[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
}

double accuracy(DecisionTree const& tree, Dataset const& data)
{
    if (data.rows() == 0) {
        throw InputError("accuracy: empty dataset");
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        hits += predict(tree, data.row(r)) == data.label(r) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows());
}

nlohmann::json tree_to_json(DecisionTree const& tree)
{
    nlohmann::json nodes = nlohmann::json::array();
    auto const all = tree.nodes();
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto const& nd = all[i];
        if (nd.is_leaf) {
            nodes.push_back({{"id", i}, {"kind", "leaf"}, {"class", nd.class_label}});
        } else {
            nodes.push_back({{"id", i},
                             {"kind", "split"},
                             {"feature", nd.feature},
                             {"threshold", nd.threshold},
                             {"left", nd.left},
                             {"right", nd.right}});
        }
    }
    return {{"class_count", tree.class_count()}, {"root", tree.root()}, {"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(nlohmann::json const& j)
{
    try {
        if (!j.is_object() || !j.contains("nodes") || !j.at("nodes").is_array()) {
            throw InputError("tree json: expected an object with a \"nodes\" array");
        }
        auto const class_count = j.at("class_count").get<std::int64_t>();
        if (class_count < 1) {
            throw InputError("tree json: class_count must be positive");
        }
        // external ids may be sparse; map them onto positions in id order
        std::map<std::int64_t, nlohmann::json const*> by_id;
        for (auto const& n : j.at("nodes")) {
            auto const id = n.at("id").get<std::int64_t>();
            if (!by_id.emplace(id, &n).second) {
                throw InputError("tree json: duplicate node id " + std::to_string(id));
            }
        }
        std::map<std::int64_t, NodeId> index;
        for (auto const& [id, _] : by_id) {
            index.emplace(id, static_cast<NodeId>(index.size()));
        }
        auto resolve = [&](std::int64_t id) -> NodeId {
            auto it = index.find(id);
            if (it == index.end()) {
                throw InputError("tree json: dangling node id " + std::to_string(id));
            }
            return it->second;
        };

        std::vector<TreeNode> nodes;
        nodes.reserve(by_id.size());
        for (auto const& [id, n] : by_id) {
            auto const kind = n->at("kind").get<std::string>();
            if (kind == "leaf") {
                nodes.push_back(TreeNode::leaf(n->at("class").get<std::int32_t>()));
            } else if (kind == "split") {
                nodes.push_back(TreeNode::split(n->at("feature").get<std::int32_t>(), n->at("threshold").get<double>(),
                                                resolve(n->at("left").get<std::int64_t>()),
                                                resolve(n->at("right").get<std::int64_t>())));
            } else {
                throw InputError("tree json: node " + std::to_string(id) + " has unknown kind '" + kind + "'");
            }
        }
        return DecisionTree{std::move(nodes), resolve(j.at("root").get<std::int64_t>()),
                            static_cast<std::size_t>(class_count)};
    } catch (nlohmann::json::exception const& e) {
        throw InputError(std::string{"tree json: "} + e.what());
    }
}

void export_json(DecisionTree const& tree, std::filesystem::path const& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << tree_to_json(tree).dump(2) << '\n';
}

DecisionTree import_json(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open tree file '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return tree_from_json(j);
}

} // namespace approxdt
