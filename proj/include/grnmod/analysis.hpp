#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grnmod/evolution.hpp"
#include "grnmod/fitness.hpp"
#include "grnmod/modularity.hpp"

namespace grnmod {

struct DominanceEntry
{
    Individual individual;
    int generation = -1;
};

/// The two extremal individuals of a generation window.
struct DominancePair
{
    DominanceEntry fittest_of_most_modular;   ///< max Q, ties by higher fitness
    DominanceEntry least_modular_of_fittest;  ///< max fitness, ties by lower Q
};

/// Incremental dominance extraction; feed it every evaluated generation.
class DominanceTracker
{
  public:
    DominanceTracker(int first_generation, int last_generation);

    void observe(int generation, std::span<const Individual> population);
    bool empty() const noexcept { return !modular_ || !fittest_; }
    /// Throws std::logic_error when nothing inside the window was observed.
    DominancePair result() const;

  private:
    int first_;
    int last_;
    std::optional<DominanceEntry> modular_;
    std::optional<DominanceEntry> fittest_;
};

/// Dominance over record.history restricted to [first, last].
DominancePair extract_dominance(const TrialRecord& record, int first_generation,
                                int last_generation);

/// Copy of g without entries whose regulator and target lie in different modules.
Genome trim_inter_module(const Genome& g, const Partition& partition);

/// Nonzero inter-module entries as (regulator, target), row-major order.
std::vector<std::pair<int, int>> inter_module_edges(const Genome& g, const Partition& partition);

struct LatticePoint
{
    std::vector<bool> removed; ///< over RemovalLattice::inter_edges
    int removed_count = 0;
    double fitness = 0.0;
    int path = -1;             ///< sampled removal order index; -1 in full enumeration
};

struct RemovalLattice
{
    std::vector<std::pair<int, int>> inter_edges;
    bool exhaustive = true;
    std::vector<LatticePoint> points;
};

struct RemovalOptions
{
    std::uint64_t subset_cap = std::uint64_t{1} << 16;
    int sampled_orders = 1000;
};

/// Fitness at every subset of removed inter-module edges when 2^k <= cap,
/// otherwise along `sampled_orders` random removal orders (k+1 points each).
RemovalLattice removal_paths(const Genome& g, const Partition& partition,
                             std::span<const PerturbationSet> sets, const FitnessEvaluator& eval,
                             const RemovalOptions& options, Rng& rng);

struct NeighborSample
{
    int id = 0;          ///< 0 is the probed genome itself
    double fitness = 0.0;
    std::optional<double> q;
};

struct NeighborProbe
{
    double self_fitness = 0.0;
    std::optional<double> self_q;
    double max_fitness = 0.0;
    std::optional<double> max_q;
    std::vector<NeighborSample> samples; ///< self first, then neighbors
};

/// Evaluates g and `neighbor_count` independent one-pass mutants of it.
NeighborProbe neighbor_probe(const Genome& g, int neighbor_count, double mutation_rate,
                             std::span<const PerturbationSet> sets, const FitnessEvaluator& eval,
                             const Partition& partition, EdgeCollapse collapse, Rng& rng);

/// Fresh perturbation sets, one per target, for noise-controlled comparisons.
std::vector<PerturbationSet> frozen_sets(std::span<const Pattern> targets, int count, double rate,
                                         Rng& rng);

} // namespace grnmod
