#pragma once

#include "approxdt/evaluator.hpp"
#include "approxdt/quantizer.hpp"
#include "approxdt/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace approxdt {

struct Individual {
    Chromosome chrom;
    Objectives obj;
    std::size_t rank = 0;
    double crowding = 0.0;
};

struct GaConfig {
    std::size_t population_size = 100;
    std::size_t generations = 100;
    double eta_c = 20.0;
    double eta_m = 20.0;
    double crossover_prob = 0.9;
    /// Per scalar gene. Unset means 1 / (2N).
    std::optional<double> mutation_prob;
    std::uint64_t seed = 0;
    GeneBounds bounds;
    /// Evaluation workers. Results do not depend on it.
    unsigned threads = 1;

    void validate() const;
    [[nodiscard]] double mutation_probability(std::size_t comparator_count) const noexcept;
};

struct GenerationStats {
    std::size_t generation = 0;
    double best_error = 0.0;
    double min_area = 0.0;
    std::size_t front_size = 0;
    double hypervolume = 0.0;
};

/// Rank-0 members, unique by chromosome, sorted by (error, area, genes).
struct ParetoFront {
    std::vector<Individual> members;
    GaConfig config;
    std::size_t generations = 0;
};

struct EvolveResult {
    ParetoFront front;
    std::vector<GenerationStats> history;
    Objectives baseline;
    Objectives hv_reference;
};

/// Optional instrumentation; called for every chromosome the engine creates
/// (initial population and offspring) before evaluation.
struct EvolveHooks {
    std::function<void(Chromosome const&)> on_created;
};

/// Pareto dominance for minimization.
bool dominates(Objectives const& a, Objectives const& b) noexcept;

/// Deb's O(M n^2) sort. Sets `rank` on every individual; each returned front
/// lists population indices in ascending order.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<Individual> pop);

/// Crowding distance of the members of `front`, in the same order. Fronts of
/// one or two members are all +inf; an objective with zero range adds 0.
std::vector<double> crowding_distance(std::span<Individual const> pop, std::span<std::size_t const> front);

/// Sorts into fronts and stores rank and crowding on every individual.
std::vector<std::vector<std::size_t>> assign_rank_and_crowding(std::span<Individual> pop);

/// Binary tournament over two distinct uniform draws: lower rank, then larger
/// crowding, then the first draw. Returns the winner's index.
std::size_t tournament_select(std::span<Individual const> pop, CounterRng& rng);

/// SBX on every gene pair with real-valued arithmetic, then rounded half up
/// and clamped into the gene's bounds.
std::pair<Chromosome, Chromosome> sbx_crossover(Chromosome const& a, Chromosome const& b, GaConfig const& cfg,
                                                CounterRng& rng);

/// Polynomial mutation of each scalar gene with probability
/// cfg.mutation_probability(N), rounded half up and clamped.
Chromosome polynomial_mutation(Chromosome const& c, GaConfig const& cfg, CounterRng& rng);

/// Area dominated by `points` inside the box bounded by `reference`.
double hypervolume_2d(std::span<Objectives const> points, Objectives const& reference);

/// Elitist (mu + lambda) NSGA-II. Individual 0 of the initial population is
/// the baseline chromosome. The hypervolume reference point is
/// (1.0, 2 * baseline area).
EvolveResult evolve(EvalContext const& ctx, GaConfig const& cfg, EvolveHooks const& hooks = {});

} // namespace approxdt
