#pragma once

#include "approxdt/dataset.hpp"
#include "approxdt/dtree.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace approxdt {

/// One comparator's approximation: bit width and signed offset applied to
/// the integer threshold at that width.
struct Gene {
    std::int32_t precision = 8;
    std::int32_t delta = 0;

    friend bool operator==(Gene const&, Gene const&) = default;
    friend auto operator<=>(Gene const&, Gene const&) = default;
};

struct GeneBounds {
    std::int32_t p_min = 2;
    std::int32_t p_max = 8;
    std::int32_t margin = 5;

    friend bool operator==(GeneBounds const&, GeneBounds const&) = default;

    [[nodiscard]] bool contains(Gene const& g) const noexcept
    {
        return g.precision >= p_min && g.precision <= p_max && g.delta >= -margin && g.delta <= margin;
    }
    /// Throws InputError unless 1 <= p_min <= p_max <= 30 and margin >= 0.
    void validate() const;
};

/// N genes (2N scalars), in comparator order.
struct Chromosome {
    std::vector<Gene> genes;

    [[nodiscard]] std::size_t size() const noexcept { return genes.size(); }

    /// Every comparator at `precision` with zero offset.
    static Chromosome uniform(std::size_t n, std::int32_t precision) { return {std::vector<Gene>(n, Gene{precision, 0})}; }

    friend bool operator==(Chromosome const&, Chromosome const&) = default;
    friend auto operator<=>(Chromosome const&, Chromosome const&) = default;
};

struct ChromosomeHash {
    std::size_t operator()(Chromosome const& c) const noexcept;
};

/// T = clamp(round_half_up(t * 2^p), 0, 2^p - 1).
std::uint32_t quantize_threshold(double t, int precision);

/// V = min(floor(v * 2^p), 2^p - 1). Values below 0 map to 0.
std::uint32_t quantize_feature(double v, int precision) noexcept;

struct QuantizedComparator {
    std::int32_t precision = 0;
    std::uint32_t int_threshold = 0;

    /// T / 2^p
    [[nodiscard]] double fixed_threshold() const noexcept;
};

/// A tree with every comparator replaced by an integer comparison.
class QuantizedTree {
public:
    QuantizedTree(DecisionTree tree, std::vector<QuantizedComparator> comparators);

    [[nodiscard]] DecisionTree const& tree() const noexcept { return tree_; }
    /// Indexed by comparator index, not node id.
    [[nodiscard]] std::span<QuantizedComparator const> comparators() const noexcept { return comparators_; }
    [[nodiscard]] QuantizedComparator const& at_node(NodeId id) const noexcept
    {
        return comparators_[static_cast<std::size_t>(tree_.comparator_index(id))];
    }

private:
    DecisionTree tree_;
    std::vector<QuantizedComparator> comparators_;
};

/// T_i = clamp(quantize_threshold(t_i, p_i) + d_i, 0, 2^p_i - 1).
QuantizedTree apply_chromosome(DecisionTree const& tree, Chromosome const& chrom, GeneBounds const& bounds = {});

/// Goes left iff quantize_feature(sample[f], p) <= T.
int predict_quantized(QuantizedTree const& qtree, std::span<double const> sample);

double quantized_accuracy(QuantizedTree const& qtree, Dataset const& data);

/// Tree schema with split nodes extended by "precision" and "int_threshold";
/// "threshold" holds T / 2^p.
nlohmann::json quantized_tree_to_json(QuantizedTree const& qtree);
QuantizedTree quantized_tree_from_json(nlohmann::json const& j);

nlohmann::json chromosome_to_json(Chromosome const& c);
Chromosome chromosome_from_json(nlohmann::json const& j);

} // namespace approxdt
