#include "grnmod/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <cmath>
#include <string>

namespace grnmod {

// ---------------------------------------------------------------------------
// Schedule and config

TargetSchedule::TargetSchedule(std::vector<Stage> stages) : stages_(std::move(stages))
{
    if (stages_.empty())
        throw std::invalid_argument("target schedule needs at least one target");
    if (stages_.front().generation != 0)
        throw std::invalid_argument("first target must be introduced at generation 0");
    for (std::size_t k = 1; k < stages_.size(); ++k) {
        if (stages_[k].generation <= stages_[k - 1].generation)
            throw std::invalid_argument("target generations must increase strictly");
        if (stages_[k].target.size() != stages_.front().target.size())
            throw std::invalid_argument("targets differ in length");
    }
    if (stages_.front().target.size() < 2)
        throw std::invalid_argument("targets need at least two genes");
}

TargetSchedule TargetSchedule::two_target_default()
{
    return TargetSchedule({{0, Pattern::parse("+-+-+-+-+-")}, {500, Pattern::parse("+-+-++-+-+")}});
}

std::vector<Pattern> TargetSchedule::targets() const
{
    std::vector<Pattern> out;
    out.reserve(stages_.size());
    for (const auto& s : stages_)
        out.push_back(s.target);
    return out;
}

int TargetSchedule::active_count(int generation) const
{
    int count = 0;
    for (const auto& s : stages_)
        if (s.generation <= generation)
            ++count;
    return count;
}

void EvoConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (schedule.stages().empty())
        fail("no targets configured");
    const int n = schedule.gene_count();
    if (population_size < 1)
        fail("population_size must be >= 1");
    if (elite_size < 0 || elite_size >= population_size)
        fail("elite_size must satisfy 0 <= elite_size < population_size");
    if (!(reproduction_rate > 0.0 && reproduction_rate <= 1.0))
        fail("reproduction_rate must be in (0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        fail("mutation_rate must be in [0, 1]");
    if (!(perturbation_rate >= 0.0 && perturbation_rate <= 1.0))
        fail("perturbation_rate must be in [0, 1]");
    if (perturbation_count < 1 || static_perturbation_count < 1)
        fail("perturbation counts must be >= 1");
    if (selection.type == SelectionType::Tournament && selection.tournament_size < 1)
        fail("tournament_size must be >= 1");
    if (edge_size < 0 || edge_size > n * n)
        fail("edge_size must be in [0, n*n]");
    if (max_generation < 0)
        fail("max_generation must be >= 0");
    if (fitness.max_steps < 1)
        fail("max_steps must be >= 1");
    if (partition && partition->size() != n)
        fail("partition length does not match the gene count");
}

Partition EvoConfig::effective_partition() const
{
    if (partition)
        return *partition;
    const auto t = schedule.targets();
    return derive_partition(t);
}

// ---------------------------------------------------------------------------
// Operators

double loss_probability(int regulators, int n)
{
    const double r = regulators;
    const double denom = 4.0 * r + n - r;
    return denom > 0.0 ? 4.0 * r / denom : 0.0;
}

std::vector<Individual> init_population(const EvoConfig& cfg, int n, Rng& rng)
{
    if (cfg.edge_size < 0 || cfg.edge_size > n * n)
        throw std::invalid_argument("edge_size exceeds n*n");
    if (cfg.population_size < 1)
        throw std::invalid_argument("population_size must be >= 1");

    auto random_genome = [&] {
        Genome g(n);
        std::vector<int> cells(static_cast<std::size_t>(n) * n);
        std::iota(cells.begin(), cells.end(), 0);
        // Partial Fisher-Yates: the first edge_size cells are a uniform sample.
        for (int k = 0; k < cfg.edge_size; ++k) {
            const auto pick = k + static_cast<int>(rng.below(cells.size() - k));
            std::swap(cells[k], cells[pick]);
            g.set(cells[k] / n, cells[k] % n, rng.bernoulli(0.5) ? 1 : -1);
        }
        return g;
    };

    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    if (cfg.init_mode == InitMode::Founder) {
        const Genome founder = random_genome();
        pop.assign(cfg.population_size, Individual{founder, 0.0, std::nullopt});
    } else {
        for (int k = 0; k < cfg.population_size; ++k)
            pop.push_back(Individual{random_genome(), 0.0, std::nullopt});
    }
    return pop;
}

namespace {

/// Index of the k-th set bit of mask (k is zero-based).
int nth_set_bit(GeneMask mask, int k)
{
    for (int i = 0; i < k; ++i)
        mask &= mask - 1;
    return std::countr_zero(mask);
}

} // namespace

Genome mutate(const Genome& g, double mu, Rng& rng)
{
    Genome out = g;
    const int n = g.size();
    const GeneMask all = low_mask(n);
    for (int u = 0; u < n; ++u) {
        if (!rng.bernoulli(mu))
            continue;
        GeneMask pos = out.activators(u);
        GeneMask neg = out.repressors(u);
        const GeneMask regs = pos | neg;
        const int r = std::popcount(regs);
        if (rng.bernoulli(loss_probability(r, n))) {
            const GeneMask bit = GeneMask{1} << nth_set_bit(regs, static_cast<int>(rng.below(r)));
            pos &= ~bit;
            neg &= ~bit;
        } else {
            const GeneMask empty = ~regs & all;
            const int free = std::popcount(empty);
            const GeneMask bit =
                GeneMask{1} << nth_set_bit(empty, static_cast<int>(rng.below(free)));
            if (rng.bernoulli(0.5))
                pos |= bit;
            else
                neg |= bit;
        }
        out.set_column(u, pos, neg);
    }
    return out;
}

std::pair<Genome, Genome> crossover_horizontal(const Genome& a, const Genome& b, int row)
{
    const int n = a.size();
    if (b.size() != n)
        throw std::invalid_argument("crossover: parents differ in size");
    if (row < 1 || row > n - 1)
        throw std::invalid_argument("crossover: cut row must be in [1, n-1]");
    // Row j of the matrix is bit j of every column mask.
    const GeneMask top = low_mask(row);
    Genome c1(n), c2(n);
    for (int i = 0; i < n; ++i) {
        c1.set_column(i, (a.activators(i) & top) | (b.activators(i) & ~top),
                      (a.repressors(i) & top) | (b.repressors(i) & ~top));
        c2.set_column(i, (b.activators(i) & top) | (a.activators(i) & ~top),
                      (b.repressors(i) & top) | (a.repressors(i) & ~top));
    }
    return {c1, c2};
}

std::pair<Genome, Genome> crossover_horizontal(const Genome& a, const Genome& b, Rng& rng)
{
    return crossover_horizontal(a, b, 1 + static_cast<int>(rng.below(a.size() - 1)));
}

std::pair<Genome, Genome> crossover_diagonal(const Genome& a, const Genome& b,
                                             const Partition& partition)
{
    const int n = a.size();
    if (b.size() != n)
        throw std::invalid_argument("crossover: parents differ in size");
    if (partition.size() != n)
        throw std::invalid_argument("crossover: partition does not cover the genome");
    const GeneMask all = low_mask(n);
    Genome c1(n), c2(n);
    for (int i = 0; i < n; ++i) {
        const GeneMask intra = partition.same_module(i);
        const GeneMask inter = ~intra & all;
        c1.set_column(i, (a.activators(i) & intra) | (b.activators(i) & inter),
                      (a.repressors(i) & intra) | (b.repressors(i) & inter));
        c2.set_column(i, (b.activators(i) & intra) | (a.activators(i) & inter),
                      (b.repressors(i) & intra) | (a.repressors(i) & inter));
    }
    return {c1, c2};
}

// ---------------------------------------------------------------------------
// Selection

Selector::Selector(std::span<const Individual> population, SelectionScheme scheme)
    : pop_(population), scheme_(scheme)
{
    if (pop_.empty())
        throw std::invalid_argument("selection from an empty population");
    if (scheme_.type == SelectionType::Tournament) {
        if (scheme_.tournament_size < 1)
            throw std::invalid_argument("tournament size must be >= 1");
        return;
    }
    cumulative_.reserve(pop_.size());
    double total = 0.0;
    for (const auto& ind : pop_) {
        if (ind.fitness < 0.0)
            throw std::invalid_argument("proportional selection needs non-negative fitness");
        total += ind.fitness;
        cumulative_.push_back(total);
    }
    fallback_ = !(total > 0.0);
}

std::size_t Selector::pick(Rng& rng) const
{
    if (scheme_.type == SelectionType::Tournament) {
        std::size_t best = rng.below(pop_.size());
        std::uint64_t ties = 1;
        for (int k = 1; k < scheme_.tournament_size; ++k) {
            const std::size_t c = rng.below(pop_.size());
            if (pop_[c].fitness > pop_[best].fitness) {
                best = c;
                ties = 1;
            } else if (pop_[c].fitness == pop_[best].fitness) {
                // Reservoir step keeps each tied contestant equally likely.
                if (rng.below(++ties) == 0)
                    best = c;
            }
        }
        return best;
    }
    if (fallback_)
        return rng.below(pop_.size());
    const double r = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(idx, pop_.size() - 1);
}

const Individual& select(std::span<const Individual> population, SelectionScheme scheme, Rng& rng)
{
    return population[Selector(population, scheme).pick(rng)];
}

// ---------------------------------------------------------------------------
// Generations

TrialStreams::TrialStreams(std::uint64_t seed)
    : init(derive_seed(seed, "init"))
    , perturbation(derive_seed(seed, "perturbation"))
    , mutation(derive_seed(seed, "mutation"))
    , selection(derive_seed(seed, "selection"))
    , crossover(derive_seed(seed, "crossover"))
{
}

double EvaluationCache::evaluate(const Genome& g, const FitnessContext& ctx)
{
    if (values_.size() > (1U << 20))
        values_.clear();
    const auto [it, inserted] = values_.try_emplace(g, 0.0);
    if (inserted)
        it->second = ctx.evaluate(g);
    return it->second;
}

void evaluate_generation(std::vector<Individual>& population, const EvoConfig& cfg,
                         const Partition& partition, int generation, FitnessContext& ctx,
                         TrialStreams& streams, EvaluationCache* cache)
{
    const int active = cfg.schedule.active_count(generation);
    const bool changed = ctx.mode() == FitnessMode::Dynamic || ctx.active_count() != active;
    if (changed) {
        ctx.refresh(active, streams.perturbation);
        if (cache)
            cache->clear();
    }
    for (auto& ind : population) {
        ind.fitness = cache ? cache->evaluate(ind.genome, ctx) : ctx.evaluate(ind.genome);
        ind.q = q_score(ind.genome, partition, cfg.edge_collapse);
    }
}

std::vector<Individual> breed(std::span<const Individual> population, const EvoConfig& cfg,
                              const Partition& partition, TrialStreams& streams, long* fallbacks)
{
    const auto size = population.size();
    const auto elites = static_cast<std::size_t>(cfg.elite_size);
    if (elites >= size)
        throw std::invalid_argument("elite_size must be smaller than the population");

    std::vector<Individual> next;
    next.reserve(size);

    if (elites > 0) {
        std::vector<std::size_t> order(size);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return population[a].fitness > population[b].fitness;
        });
        for (std::size_t k = 0; k < elites; ++k)
            next.push_back(population[order[k]]);
    }

    const std::size_t slots = size - elites;
    const std::size_t clones =
        cfg.crossover == CrossoverType::None
            ? slots
            : std::min(slots, static_cast<std::size_t>(
                                  std::llround(cfg.reproduction_rate * static_cast<double>(slots))));

    const Selector selector(population, cfg.selection);
    if (selector.uniform_fallback() && fallbacks)
        ++*fallbacks;

    auto offspring = [](const Genome& g) { return Individual{g, 0.0, std::nullopt}; };

    for (std::size_t k = 0; k < clones; ++k)
        next.push_back(offspring(population[selector.pick(streams.selection)].genome));

    while (next.size() < size) {
        const Genome& a = population[selector.pick(streams.selection)].genome;
        const Genome& b = population[selector.pick(streams.selection)].genome;
        auto children = cfg.crossover == CrossoverType::Horizontal
                            ? crossover_horizontal(a, b, streams.crossover)
                            : crossover_diagonal(a, b, partition);
        next.push_back(offspring(children.first));
        if (next.size() < size)
            next.push_back(offspring(children.second));
    }

    for (std::size_t k = elites; k < size; ++k)
        next[k].genome = mutate(next[k].genome, cfg.mutation_rate, streams.mutation);
    return next;
}

std::vector<Individual> advance_generation(std::vector<Individual>& population,
                                           const EvoConfig& cfg, int generation,
                                           FitnessContext& ctx, TrialStreams& streams)
{
    const Partition partition = cfg.effective_partition();
    evaluate_generation(population, cfg, partition, generation, ctx, streams);
    return breed(population, cfg, partition, streams);
}

GenerationStats summarize_generation(int generation, int active_targets,
                                     std::span<const Individual> population)
{
    GenerationStats row;
    row.generation = generation;
    row.active_targets = active_targets;
    if (population.empty())
        return row;
    std::size_t fittest = 0;
    double fitness_sum = 0.0;
    double q_sum = 0.0;
    int q_count = 0;
    for (std::size_t k = 0; k < population.size(); ++k) {
        const auto& ind = population[k];
        fitness_sum += ind.fitness;
        if (ind.fitness > population[fittest].fitness)
            fittest = k;
        if (ind.q) {
            q_sum += *ind.q;
            ++q_count;
            if (!row.best_q || *ind.q > *row.best_q)
                row.best_q = *ind.q;
        }
    }
    row.best_fitness = population[fittest].fitness;
    row.mean_fitness = fitness_sum / static_cast<double>(population.size());
    if (q_count > 0)
        row.mean_q = q_sum / q_count;
    row.fittest_q = population[fittest].q;
    return row;
}

TrialRecord run_trial(const EvoConfig& cfg, std::uint64_t seed, const GenerationObserver& observer)
{
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    TrialRecord record;
    record.config = cfg;
    record.seed = seed;
    record.rows.reserve(static_cast<std::size_t>(cfg.max_generation) + 1);

    TrialStreams streams(seed);
    const int n = cfg.schedule.gene_count();
    const Partition partition = cfg.effective_partition();
    const int set_size = cfg.fitness_mode == FitnessMode::Static ? cfg.static_perturbation_count
                                                                 : cfg.perturbation_count;

    auto population = init_population(cfg, n, streams.init);
    FitnessContext ctx(cfg.fitness_mode, cfg.schedule.targets(), set_size, cfg.perturbation_rate,
                       cfg.fitness, streams.perturbation);
    EvaluationCache cache;

    for (int gen = 0; gen <= cfg.max_generation; ++gen) {
        evaluate_generation(population, cfg, partition, gen, ctx, streams, &cache);
        record.rows.push_back(summarize_generation(gen, ctx.active_count(), population));
        if (observer)
            observer(gen, population);
        if (cfg.keep_history)
            record.history.push_back(population);
        if (gen < cfg.max_generation)
            population = breed(population, cfg, partition, streams, &record.proportional_fallbacks);
    }
    record.final_population = std::move(population);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return record;
}

} // namespace grnmod
