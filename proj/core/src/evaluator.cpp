#include "approxdt/evaluator.hpp"

#include "approxdt/error.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace approxdt {

std::optional<Objectives> ObjectiveCache::find(Chromosome const& c) const
{
    std::lock_guard lock{mutex_};
    auto it = map_.find(c);
    if (it == map_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Objectives ObjectiveCache::insert(Chromosome const& c, Objectives const& obj)
{
    std::lock_guard lock{mutex_};
    return map_.try_emplace(c, obj).first->second;
}

std::size_t ObjectiveCache::size() const
{
    std::lock_guard lock{mutex_};
    return map_.size();
}

Objectives evaluate(Chromosome const& chrom, EvalContext const& ctx)
{
    if (ctx.cache) {
        if (auto hit = ctx.cache->find(chrom)) {
            return *hit;
        }
    }
    auto const qt = apply_chromosome(ctx.tree, chrom, ctx.bounds);
    Objectives const obj{1.0 - quantized_accuracy(qt, ctx.test), tree_area(qt, ctx.model)};
    if (ctx.cache) {
        return ctx.cache->insert(chrom, obj);
    }
    return obj;
}

std::vector<Objectives> evaluate_all(std::span<Chromosome const> chroms, EvalContext const& ctx, unsigned threads)
{
    std::vector<Objectives> out(chroms.size());
    parallel_for(chroms.size(), threads, [&](std::size_t i) { out[i] = evaluate(chroms[i], ctx); });
    return out;
}

Chromosome baseline_chromosome(DecisionTree const& tree, GeneBounds const& bounds)
{
    return Chromosome::uniform(tree.comparator_count(), bounds.p_max);
}

void parallel_for(std::size_t n, unsigned threads, std::function<void(std::size_t)> const& fn)
{
    auto const workers = static_cast<std::size_t>(std::max(1U, threads));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        auto const used = std::min(workers, n);
        pool.reserve(used);
        for (std::size_t w = 0; w < used; ++w) {
            // strided assignment; each index is written by exactly one worker
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += used) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto const& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace approxdt
