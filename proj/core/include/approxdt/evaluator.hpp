#pragma once

#include "approxdt/area_model.hpp"
#include "approxdt/dataset.hpp"
#include "approxdt/dtree.hpp"
#include "approxdt/quantizer.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace approxdt {

/// Both minimized. error = 1 - test accuracy; area in model units.
struct Objectives {
    double error = 0.0;
    double area = 0.0;

    friend bool operator==(Objectives const&, Objectives const&) = default;
};

/// Memo of chromosome -> objectives; safe for concurrent use.
class ObjectiveCache {
public:
    [[nodiscard]] std::optional<Objectives> find(Chromosome const& c) const;
    /// Keeps the first value stored for `c` and returns it.
    Objectives insert(Chromosome const& c, Objectives const& obj);
    [[nodiscard]] std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<Chromosome, Objectives, ChromosomeHash> map_;
};

struct EvalContext {
    DecisionTree tree;
    Dataset test;
    AreaModel model = AnalyticalModel{};
    GeneBounds bounds;
    std::shared_ptr<ObjectiveCache> cache; // optional
};

Objectives evaluate(Chromosome const& chrom, EvalContext const& ctx);

/// Evaluates every chromosome; results are in input order whatever `threads` is.
std::vector<Objectives> evaluate_all(std::span<Chromosome const> chroms, EvalContext const& ctx, unsigned threads = 1);

/// p = bounds.p_max, d = 0 on every comparator.
Chromosome baseline_chromosome(DecisionTree const& tree, GeneBounds const& bounds);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions from
/// workers are rethrown on the caller (the first one by index wins).
void parallel_for(std::size_t n, unsigned threads, std::function<void(std::size_t)> const& fn);

} // namespace approxdt
