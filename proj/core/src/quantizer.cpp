#include "approxdt/quantizer.hpp"

#include "approxdt/error.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace approxdt {

void GeneBounds::validate() const
{
    if (p_min < 1 || p_min > p_max || p_max > 30) {
        throw InputError("precision bounds must satisfy 1 <= pmin <= pmax <= 30");
    }
    if (margin < 0) {
        throw InputError("margin must be non-negative");
    }
}

std::size_t ChromosomeHash::operator()(Chromosome const& c) const noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto const& g : c.genes) {
        for (auto v : {g.precision, g.delta}) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 0x100000001b3ULL;
        }
    }
    return static_cast<std::size_t>(h);
}

std::uint32_t quantize_threshold(double t, int precision)
{
    if (precision < 1 || precision > 30) {
        throw InputError("quantize_threshold: precision " + std::to_string(precision) + " out of range");
    }
    double const scale = std::ldexp(1.0, precision);
    double const max_code = scale - 1.0;
    double const code = std::floor(t * scale + 0.5);
    return static_cast<std::uint32_t>(std::clamp(code, 0.0, max_code));
}

std::uint32_t quantize_feature(double v, int precision) noexcept
{
    double const scale = std::ldexp(1.0, precision);
    double const code = std::floor(v * scale);
    return static_cast<std::uint32_t>(std::clamp(code, 0.0, scale - 1.0));
}

double QuantizedComparator::fixed_threshold() const noexcept
{
    return std::ldexp(static_cast<double>(int_threshold), -precision);
}

QuantizedTree::QuantizedTree(DecisionTree tree, std::vector<QuantizedComparator> comparators)
    : tree_(std::move(tree)), comparators_(std::move(comparators))
{
    if (comparators_.size() != tree_.comparator_count()) {
        throw InputError("quantized tree: " + std::to_string(comparators_.size()) + " comparators for a tree with " +
                         std::to_string(tree_.comparator_count()));
    }
    for (auto const& c : comparators_) {
        if (c.precision < 1 || c.precision > 30 || c.int_threshold > (std::uint32_t{1} << c.precision) - 1U) {
            throw InputError("quantized tree: threshold code " + std::to_string(c.int_threshold) +
                             " does not fit in " + std::to_string(c.precision) + " bits");
        }
    }
}

QuantizedTree apply_chromosome(DecisionTree const& tree, Chromosome const& chrom, GeneBounds const& bounds)
{
    if (chrom.size() != tree.comparator_count()) {
        throw InputError("chromosome has " + std::to_string(chrom.size()) + " genes, tree has " +
                         std::to_string(tree.comparator_count()) + " comparators");
    }
    std::vector<QuantizedComparator> out;
    out.reserve(chrom.size());
    auto const ids = tree.comparators();
    for (std::size_t i = 0; i < chrom.size(); ++i) {
        auto const& g = chrom.genes[i];
        if (!bounds.contains(g)) {
            throw InputError("gene " + std::to_string(i) + " (p=" + std::to_string(g.precision) +
                             ", d=" + std::to_string(g.delta) + ") outside bounds");
        }
        auto const base = static_cast<std::int64_t>(quantize_threshold(tree.node(ids[i]).threshold, g.precision));
        auto const max_code = (std::int64_t{1} << g.precision) - 1;
        auto const code = std::clamp<std::int64_t>(base + g.delta, 0, max_code);
        out.push_back({g.precision, static_cast<std::uint32_t>(code)});
    }
    return QuantizedTree{tree, std::move(out)};
}

int predict_quantized(QuantizedTree const& qtree, std::span<double const> sample)
{
    auto const& tree = qtree.tree();
    if (static_cast<std::int64_t>(sample.size()) <= tree.max_feature()) {
        throw InputError("predict_quantized: sample has " + std::to_string(sample.size()) +
                         " features, tree reads feature " + std::to_string(tree.max_feature()));
    }
    NodeId id = tree.root();
    while (true) {
        auto const& nd = tree.node(id);
        if (nd.is_leaf) {
            return nd.class_label;
        }
        auto const& cmp = qtree.at_node(id);
        auto const v = quantize_feature(sample[static_cast<std::size_t>(nd.feature)], cmp.precision);
        id = v <= cmp.int_threshold ? nd.left : nd.right;
    }
}

double quantized_accuracy(QuantizedTree const& qtree, Dataset const& data)
{
    if (data.rows() == 0) {
        throw InputError("quantized_accuracy: empty dataset");
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        hits += predict_quantized(qtree, data.row(r)) == data.label(r) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows());
}

nlohmann::json quantized_tree_to_json(QuantizedTree const& qtree)
{
    auto j = tree_to_json(qtree.tree());
    for (auto& n : j.at("nodes")) {
        if (n.at("kind") != "split") {
            continue;
        }
        auto const& c = qtree.at_node(n.at("id").get<NodeId>());
        n["precision"] = c.precision;
        n["int_threshold"] = c.int_threshold;
        n["threshold"] = c.fixed_threshold();
    }
    return j;
}

QuantizedTree quantized_tree_from_json(nlohmann::json const& j)
{
    auto tree = tree_from_json(j);
    std::vector<QuantizedComparator> comps(tree.comparator_count());
    try {
        // tree_from_json orders nodes by id, so sorted ids line up with comparator order
        std::vector<std::pair<std::int64_t, nlohmann::json const*>> splits;
        for (auto const& n : j.at("nodes")) {
            if (n.at("kind") == "split") {
                splits.emplace_back(n.at("id").get<std::int64_t>(), &n);
            }
        }
        std::sort(splits.begin(), splits.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < splits.size(); ++i) {
            comps[i].precision = splits[i].second->at("precision").get<std::int32_t>();
            comps[i].int_threshold = splits[i].second->at("int_threshold").get<std::uint32_t>();
        }
    } catch (nlohmann::json::exception const& e) {
        throw InputError(std::string{"quantized tree json: "} + e.what());
    }
    return QuantizedTree{std::move(tree), std::move(comps)};
}

nlohmann::json chromosome_to_json(Chromosome const& c)
{
    nlohmann::json genes = nlohmann::json::array();
    for (auto const& g : c.genes) {
        genes.push_back({g.precision, g.delta});
    }
    return genes;
}

Chromosome chromosome_from_json(nlohmann::json const& j)
{
    Chromosome c;
    try {
        for (auto const& g : j) {
            c.genes.push_back({g.at(0).get<std::int32_t>(), g.at(1).get<std::int32_t>()});
        }
    } catch (nlohmann::json::exception const& e) {
        throw InputError(std::string{"chromosome json: "} + e.what());
    }
    return c;
}

} // namespace approxdt
