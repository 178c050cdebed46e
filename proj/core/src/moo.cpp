#include "approxdt/moo.hpp"

#include "approxdt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace approxdt {

void GaConfig::validate() const
{
    if (population_size < 4 || population_size % 2 != 0) {
        throw InputError("population size must be even and at least 4");
    }
    if (generations < 1) {
        throw InputError("generation count must be at least 1");
    }
    if (!(eta_c > 0.0) || !(eta_m > 0.0)) {
        throw InputError("distribution indices must be positive");
    }
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
        throw InputError("crossover probability must lie in [0,1]");
    }
    if (mutation_prob && !(*mutation_prob >= 0.0 && *mutation_prob <= 1.0)) {
        throw InputError("mutation probability must lie in [0,1]");
    }
    bounds.validate();
}

double GaConfig::mutation_probability(std::size_t comparator_count) const noexcept
{
    if (mutation_prob) {
        return *mutation_prob;
    }
    return comparator_count == 0 ? 0.0 : 1.0 / (2.0 * static_cast<double>(comparator_count));
}

bool dominates(Objectives const& a, Objectives const& b) noexcept
{
    return a.error <= b.error && a.area <= b.area && (a.error < b.error || a.area < b.area);
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<Individual> pop)
{
    auto const n = pop.size();
    std::vector<std::vector<std::size_t>> dominated_by(n); // S_p
    std::vector<std::size_t> count(n, 0);                 // n_p
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(pop[p].obj, pop[q].obj)) {
                dominated_by[p].push_back(q);
                ++count[q];
            } else if (dominates(pop[q].obj, pop[p].obj)) {
                dominated_by[q].push_back(p);
                ++count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (count[p] == 0) {
            current.push_back(p);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            pop[p].rank = fronts.size();
            for (auto q : dominated_by[p]) {
                if (--count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        fronts.push_back(std::move(current));
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<Individual const> pop, std::span<std::size_t const> front)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto const n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    std::vector<std::size_t> order(n);
    for (auto key : {&Objectives::error, &Objectives::area}) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[front[a]].obj.*key < pop[front[b]].obj.*key; });
        double const lo = pop[front[order.front()]].obj.*key;
        double const hi = pop[front[order.back()]].obj.*key;
        double const range = hi - lo;
        if (!(range > 0.0)) {
            continue;
        }
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (std::isinf(dist[order[k]])) {
                continue;
            }
            double const prev = pop[front[order[k - 1]]].obj.*key;
            double const next = pop[front[order[k + 1]]].obj.*key;
            dist[order[k]] += (next - prev) / range;
        }
    }
    return dist;
}

std::vector<std::vector<std::size_t>> assign_rank_and_crowding(std::span<Individual> pop)
{
    auto fronts = fast_nondominated_sort(pop);
    for (auto const& f : fronts) {
        auto const d = crowding_distance(pop, f);
        for (std::size_t k = 0; k < f.size(); ++k) {
            pop[f[k]].crowding = d[k];
        }
    }
    return fronts;
}

std::size_t tournament_select(std::span<Individual const> pop, CounterRng& rng)
{
    if (pop.size() < 2) {
        throw InputError("tournament selection needs at least 2 individuals");
    }
    auto const first = static_cast<std::size_t>(rng.below(pop.size()));
    auto second = static_cast<std::size_t>(rng.below(pop.size() - 1));
    if (second >= first) {
        ++second;
    }
    auto const& a = pop[first];
    auto const& b = pop[second];
    if (b.rank < a.rank || (b.rank == a.rank && b.crowding > a.crowding)) {
        return second;
    }
    return first;
}

namespace {

std::int32_t round_clamp(double x, std::int32_t lo, std::int32_t hi) noexcept
{
    double const r = std::floor(x + 0.5);
    return static_cast<std::int32_t>(std::clamp(r, static_cast<double>(lo), static_cast<double>(hi)));
}

// gene k of a chromosome: even k = precision of comparator k/2, odd k = delta
struct ScalarRange {
    std::int32_t lo;
    std::int32_t hi;
};

ScalarRange range_of(bool is_precision, GeneBounds const& b) noexcept
{
    return is_precision ? ScalarRange{b.p_min, b.p_max} : ScalarRange{-b.margin, b.margin};
}

std::int32_t& scalar(Gene& g, bool is_precision) noexcept { return is_precision ? g.precision : g.delta; }

} // namespace

std::pair<Chromosome, Chromosome> sbx_crossover(Chromosome const& a, Chromosome const& b, GaConfig const& cfg,
                                                CounterRng& rng)
{
    if (a.size() != b.size()) {
        throw InputError("sbx_crossover: parents have different lengths");
    }
    Chromosome c1 = a;
    Chromosome c2 = b;
    if (rng.uniform() >= cfg.crossover_prob) {
        return {std::move(c1), std::move(c2)};
    }
    double const exponent = 1.0 / (cfg.eta_c + 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (bool is_precision : {true, false}) {
            double const u = rng.uniform();
            double const beta = u <= 0.5 ? std::pow(2.0 * u, exponent) : std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
            auto const x1 = static_cast<double>(scalar(c1.genes[i], is_precision));
            auto const x2 = static_cast<double>(scalar(c2.genes[i], is_precision));
            auto const [lo, hi] = range_of(is_precision, cfg.bounds);
            scalar(c1.genes[i], is_precision) = round_clamp(0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2), lo, hi);
            scalar(c2.genes[i], is_precision) = round_clamp(0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2), lo, hi);
        }
    }
    return {std::move(c1), std::move(c2)};
}

Chromosome polynomial_mutation(Chromosome const& c, GaConfig const& cfg, CounterRng& rng)
{
    Chromosome out = c;
    double const pm = cfg.mutation_probability(c.size());
    double const exponent = 1.0 / (cfg.eta_m + 1.0);
    for (auto& g : out.genes) {
        for (bool is_precision : {true, false}) {
            if (rng.uniform() >= pm) {
                continue;
            }
            double const u = rng.uniform();
            double const delta =
                u < 0.5 ? std::pow(2.0 * u, exponent) - 1.0 : 1.0 - std::pow(2.0 * (1.0 - u), exponent);
            auto const [lo, hi] = range_of(is_precision, cfg.bounds);
            auto& x = scalar(g, is_precision);
            x = round_clamp(static_cast<double>(x) + delta * static_cast<double>(hi - lo), lo, hi);
        }
    }
    return out;
}

double hypervolume_2d(std::span<Objectives const> points, Objectives const& reference)
{
    std::vector<Objectives> inside;
    for (auto const& p : points) {
        if (p.error < reference.error && p.area < reference.area) {
            inside.push_back(p);
        }
    }
    std::sort(inside.begin(), inside.end(),
              [](auto const& a, auto const& b) { return a.error < b.error || (a.error == b.error && a.area < b.area); });
    double hv = 0.0;
    double ceiling = reference.area;
    for (auto const& p : inside) {
        if (p.area < ceiling) {
            hv += (reference.error - p.error) * (ceiling - p.area);
            ceiling = p.area;
        }
    }
    return hv;
}

namespace {

GenerationStats summarize(std::span<Individual const> pop, std::size_t generation, Objectives const& ref)
{
    GenerationStats s;
    s.generation = generation;
    s.best_error = std::numeric_limits<double>::infinity();
    s.min_area = std::numeric_limits<double>::infinity();
    std::vector<Objectives> front;
    for (auto const& ind : pop) {
        s.best_error = std::min(s.best_error, ind.obj.error);
        s.min_area = std::min(s.min_area, ind.obj.area);
        if (ind.rank == 0) {
            front.push_back(ind.obj);
        }
    }
    s.front_size = front.size();
    s.hypervolume = hypervolume_2d(front, ref);
    return s;
}

void evaluate_population(std::vector<Individual>& pop, std::size_t from, EvalContext const& ctx, unsigned threads)
{
    parallel_for(pop.size() - from, threads, [&](std::size_t k) {
        auto& ind = pop[from + k];
        ind.obj = evaluate(ind.chrom, ctx);
    });
}

} // namespace

EvolveResult evolve(EvalContext const& ctx, GaConfig const& cfg, EvolveHooks const& hooks)
{
    cfg.validate();
    if (ctx.tree.comparator_count() == 0) {
        throw InputError("tree has no comparators");
    }
    if (cfg.bounds != ctx.bounds) {
        throw InputError("GA gene bounds differ from the evaluation context bounds");
    }
    auto const n = ctx.tree.comparator_count();
    auto const mu = cfg.population_size;
    auto rng = CounterRng{cfg.seed}.split("moo.evolve");

    EvolveResult result;
    auto const baseline = baseline_chromosome(ctx.tree, cfg.bounds);
    result.baseline = evaluate(baseline, ctx);
    result.hv_reference = {1.0, 2.0 * result.baseline.area};

    auto created = [&](Chromosome const& c) {
        if (hooks.on_created) {
            hooks.on_created(c);
        }
    };

    std::vector<Individual> pop(mu);
    pop[0].chrom = baseline;
    for (std::size_t i = 1; i < mu; ++i) {
        pop[i].chrom.genes.resize(n);
        for (auto& g : pop[i].chrom.genes) {
            g.precision = static_cast<std::int32_t>(rng.between(cfg.bounds.p_min, cfg.bounds.p_max));
            g.delta = static_cast<std::int32_t>(rng.between(-cfg.bounds.margin, cfg.bounds.margin));
        }
    }
    for (auto const& ind : pop) {
        created(ind.chrom);
    }
    evaluate_population(pop, 0, ctx, cfg.threads);
    assign_rank_and_crowding(pop);
    result.history.push_back(summarize(pop, 0, result.hv_reference));

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Individual> pool = pop;
        pool.reserve(2 * mu);
        for (std::size_t k = 0; k < mu / 2; ++k) {
            auto const& p1 = pop[tournament_select(pop, rng)];
            auto const& p2 = pop[tournament_select(pop, rng)];
            auto [c1, c2] = sbx_crossover(p1.chrom, p2.chrom, cfg, rng);
            for (auto* c : {&c1, &c2}) {
                Individual child;
                child.chrom = polynomial_mutation(*c, cfg, rng);
                created(child.chrom);
                pool.push_back(std::move(child));
            }
        }
        evaluate_population(pool, mu, ctx, cfg.threads);

        auto const fronts = fast_nondominated_sort(pool);
        std::vector<Individual> next;
        next.reserve(mu);
        for (auto const& f : fronts) {
            if (next.size() + f.size() <= mu) {
                for (auto i : f) {
                    next.push_back(pool[i]);
                }
                if (next.size() == mu) {
                    break;
                }
                continue;
            }
            auto const d = crowding_distance(pool, f);
            std::vector<std::size_t> order(f.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
            for (std::size_t k = 0; next.size() < mu; ++k) {
                next.push_back(pool[f[order[k]]]);
            }
            break;
        }
        pop = std::move(next);
        assign_rank_and_crowding(pop);
        result.history.push_back(summarize(pop, gen, result.hv_reference));
    }

    std::set<Chromosome> seen;
    for (auto const& ind : pop) {
        if (ind.rank == 0 && seen.insert(ind.chrom).second) {
            result.front.members.push_back(ind);
        }
    }
    std::sort(result.front.members.begin(), result.front.members.end(), [](auto const& a, auto const& b) {
        if (a.obj.error != b.obj.error) {
            return a.obj.error < b.obj.error;
        }
        if (a.obj.area != b.obj.area) {
            return a.obj.area < b.obj.area;
        }
        return a.chrom < b.chrom;
    });
    result.front.config = cfg;
    result.front.generations = cfg.generations;
    return result;
}

} // namespace approxdt
