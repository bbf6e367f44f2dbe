#include "grnmod/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace grnmod {

namespace {

// Undefined Q (edgeless graph) ranks below every defined value.
double q_rank(const std::optional<double>& q)
{
    return q ? *q : -1.0e300;
}

bool more_modular(const Individual& a, const Individual& b)
{
    if (q_rank(a.q) != q_rank(b.q))
        return q_rank(a.q) > q_rank(b.q);
    return a.fitness > b.fitness;
}

bool fitter_less_modular(const Individual& a, const Individual& b)
{
    if (a.fitness != b.fitness)
        return a.fitness > b.fitness;
    return q_rank(a.q) < q_rank(b.q);
}

} // namespace

DominanceTracker::DominanceTracker(int first_generation, int last_generation)
    : first_(first_generation), last_(last_generation)
{
    if (last_generation < first_generation)
        throw std::invalid_argument("dominance: empty generation range");
}

void DominanceTracker::observe(int generation, std::span<const Individual> population)
{
    if (generation < first_ || generation > last_)
        return;
    for (const auto& ind : population) {
        if (!modular_ || more_modular(ind, modular_->individual))
            modular_ = DominanceEntry{ind, generation};
        if (!fittest_ || fitter_less_modular(ind, fittest_->individual))
            fittest_ = DominanceEntry{ind, generation};
    }
}

DominancePair DominanceTracker::result() const
{
    if (empty())
        throw std::logic_error("dominance: no individuals observed in the generation range");
    return {*modular_, *fittest_};
}

DominancePair extract_dominance(const TrialRecord& record, int first_generation,
                                int last_generation)
{
    DominanceTracker tracker(first_generation, last_generation);
    for (std::size_t gen = 0; gen < record.history.size(); ++gen)
        tracker.observe(static_cast<int>(gen), record.history[gen]);
    if (tracker.empty())
        throw std::invalid_argument("dominance: record has no generations in the requested range");
    return tracker.result();
}

Genome trim_inter_module(const Genome& g, const Partition& partition)
{
    if (partition.size() != g.size())
        throw std::invalid_argument("trim: partition does not cover the genome");
    Genome out = g;
    for (int i = 0; i < g.size(); ++i) {
        const GeneMask intra = partition.same_module(i);
        out.set_column(i, g.activators(i) & intra, g.repressors(i) & intra);
    }
    return out;
}

std::vector<std::pair<int, int>> inter_module_edges(const Genome& g, const Partition& partition)
{
    if (partition.size() != g.size())
        throw std::invalid_argument("partition does not cover the genome");
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.size(); ++i)
            if (partition.module_of(j) != partition.module_of(i) && g.get(j, i) != 0)
                edges.emplace_back(j, i);
    return edges;
}

RemovalLattice removal_paths(const Genome& g, const Partition& partition,
                             std::span<const PerturbationSet> sets, const FitnessEvaluator& eval,
                             const RemovalOptions& options, Rng& rng)
{
    if (options.subset_cap < 1)
        throw std::invalid_argument("removal_paths: cap must be >= 1");
    RemovalLattice lattice;
    lattice.inter_edges = inter_module_edges(g, partition);
    const auto k = lattice.inter_edges.size();

    auto without = [&](const std::vector<bool>& removed) {
        Genome h = g;
        for (std::size_t e = 0; e < k; ++e)
            if (removed[e])
                h.set(lattice.inter_edges[e].first, lattice.inter_edges[e].second, 0);
        return h;
    };

    const bool exhaustive = k < 64 && (std::uint64_t{1} << k) <= options.subset_cap;
    lattice.exhaustive = exhaustive;
    if (exhaustive) {
        const std::uint64_t count = std::uint64_t{1} << k;
        lattice.points.reserve(count);
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            LatticePoint p;
            p.removed.resize(k);
            for (std::size_t e = 0; e < k; ++e)
                p.removed[e] = (mask >> e) & 1U;
            p.removed_count = std::popcount(mask);
            p.fitness = eval.multi(without(p.removed), sets);
            lattice.points.push_back(std::move(p));
        }
        return lattice;
    }

    std::vector<std::size_t> order(k);
    for (int path = 0; path < options.sampled_orders; ++path) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = k; i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        LatticePoint p;
        p.removed.assign(k, false);
        p.path = path;
        for (std::size_t step = 0;; ++step) {
            p.removed_count = static_cast<int>(step);
            p.fitness = eval.multi(without(p.removed), sets);
            lattice.points.push_back(p);
            if (step == k)
                break;
            p.removed[order[step]] = true;
        }
    }
    return lattice;
}

NeighborProbe neighbor_probe(const Genome& g, int neighbor_count, double mutation_rate,
                             std::span<const PerturbationSet> sets, const FitnessEvaluator& eval,
                             const Partition& partition, EdgeCollapse collapse, Rng& rng)
{
    if (neighbor_count < 1)
        throw std::invalid_argument("neighbor_probe: neighbor_count must be >= 1");
    NeighborProbe probe;
    probe.samples.reserve(static_cast<std::size_t>(neighbor_count) + 1);
    auto record = [&](int id, const Genome& h) {
        NeighborSample s{id, eval.multi(h, sets), q_score(h, partition, collapse)};
        if (id == 0 || s.fitness > probe.max_fitness)
            probe.max_fitness = s.fitness;
        if (s.q && (!probe.max_q || *s.q > *probe.max_q))
            probe.max_q = s.q;
        probe.samples.push_back(s);
    };
    record(0, g);
    probe.self_fitness = probe.samples.front().fitness;
    probe.self_q = probe.samples.front().q;
    for (int id = 1; id <= neighbor_count; ++id)
        record(id, mutate(g, mutation_rate, rng));
    return probe;
}

std::vector<PerturbationSet> frozen_sets(std::span<const Pattern> targets, int count, double rate,
                                         Rng& rng)
{
    std::vector<PerturbationSet> sets;
    sets.reserve(targets.size());
    for (const auto& t : targets)
        sets.push_back(sample_perturbations(t, count, rate, rng));
    return sets;
}

} // namespace grnmod
