#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "grnmod/fitness.hpp"
#include "grnmod/grn.hpp"
#include "grnmod/modularity.hpp"
#include "grnmod/random.hpp"

namespace grnmod {

enum class SelectionType { Proportional, Tournament };
enum class CrossoverType { None, Horizontal, Diagonal };
enum class InitMode { Random, Founder };

struct SelectionScheme
{
    SelectionType type = SelectionType::Proportional;
    int tournament_size = 2;
};

/// Targets and the generation at which each is introduced.
class TargetSchedule
{
  public:
    struct Stage
    {
        int generation;
        Pattern target;
    };

    TargetSchedule() = default;
    /// Generations must start at 0 and increase strictly; targets share a length.
    explicit TargetSchedule(std::vector<Stage> stages);

    /// The two-target schedule used throughout the reference experiments:
    /// +-+-+-+-+- from generation 0, +-+-++-+-+ from generation 500.
    static TargetSchedule two_target_default();

    int gene_count() const { return stages_.front().target.size(); }
    const std::vector<Stage>& stages() const noexcept { return stages_; }
    std::vector<Pattern> targets() const;
    /// Number of targets introduced at or before `generation`.
    int active_count(int generation) const;

  private:
    std::vector<Stage> stages_;
};

struct EvoConfig
{
    int population_size = 100;
    double mutation_rate = 0.05;
    double reproduction_rate = 0.9;
    int elite_size = 0;
    SelectionScheme selection{};
    CrossoverType crossover = CrossoverType::Diagonal;
    int edge_size = 20;
    int perturbation_count = 75;
    /// Set size used in Static mode.
    int static_perturbation_count = 75;
    double perturbation_rate = 0.15;
    FitnessMode fitness_mode = FitnessMode::Dynamic;
    int max_generation = 2000;
    std::uint64_t seed = 1;
    TargetSchedule schedule = TargetSchedule::two_target_default();
    /// Overrides the partition derived from the schedule.
    std::optional<Partition> partition;
    FitnessParams fitness{};
    EdgeCollapse edge_collapse = EdgeCollapse::Union;
    InitMode init_mode = InitMode::Random;
    /// Generation window scanned for dominance extraction; -1 means max_generation.
    int dominance_start = 500;
    int dominance_end = -1;
    /// Keep every evaluated generation in the record (memory heavy; for analysis of short runs).
    bool keep_history = false;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    Partition effective_partition() const;
};

struct Individual
{
    Genome genome;
    double fitness = 0.0;
    std::optional<double> q;
};

/// Probability that a mutating gene with `regulators` regulators loses one.
double loss_probability(int regulators, int n);

/// Each genome receives exactly cfg.edge_size nonzero entries at distinct cells.
std::vector<Individual> init_population(const EvoConfig& cfg, int n, Rng& rng);

/// Each gene mutates with probability mu; a mutating gene either loses a random
/// regulator or gains one at a random empty cell, biased by loss_probability().
Genome mutate(const Genome& g, double mu, Rng& rng);

/// Rows [0, row) from `a` and [row, n) from `b` for the first child; converse for the second.
std::pair<Genome, Genome> crossover_horizontal(const Genome& a, const Genome& b, int row);
/// Cut row drawn uniformly from 1..n-1.
std::pair<Genome, Genome> crossover_horizontal(const Genome& a, const Genome& b, Rng& rng);

/// First child: a's intra-module entries with b's inter-module entries; second: the converse.
std::pair<Genome, Genome> crossover_diagonal(const Genome& a, const Genome& b,
                                             const Partition& partition);

/// Draws individuals from an evaluated population.
class Selector
{
  public:
    Selector(std::span<const Individual> population, SelectionScheme scheme);

    std::size_t pick(Rng& rng) const;
    /// True when proportional selection saw zero total fitness and picks uniformly.
    bool uniform_fallback() const noexcept { return fallback_; }

  private:
    std::span<const Individual> pop_;
    SelectionScheme scheme_;
    std::vector<double> cumulative_;
    bool fallback_ = false;
};

const Individual& select(std::span<const Individual> population, SelectionScheme scheme, Rng& rng);

/// Named random streams of one trial.
struct TrialStreams
{
    explicit TrialStreams(std::uint64_t seed);

    Rng init;
    Rng perturbation;
    Rng mutation;
    Rng selection;
    Rng crossover;
};

/// Memoizes fitness for identical genomes while the perturbation sets are unchanged.
class EvaluationCache
{
  public:
    void clear() { values_.clear(); }
    double evaluate(const Genome& g, const FitnessContext& ctx);

  private:
    std::unordered_map<Genome, double, GenomeHash> values_;
};

/// Activates targets for `generation`, resamples (Dynamic mode), then sets every
/// individual's fitness and Q.
void evaluate_generation(std::vector<Individual>& population, const EvoConfig& cfg,
                         const Partition& partition, int generation, FitnessContext& ctx,
                         TrialStreams& streams, EvaluationCache* cache = nullptr);

/// Builds the next population from an evaluated one: elites, clones, crossover
/// offspring, then mutation of every non-elite.
std::vector<Individual> breed(std::span<const Individual> population, const EvoConfig& cfg,
                              const Partition& partition, TrialStreams& streams,
                              long* fallbacks = nullptr);

/// evaluate_generation() followed by breed(). `population` is left evaluated.
std::vector<Individual> advance_generation(std::vector<Individual>& population,
                                           const EvoConfig& cfg, int generation,
                                           FitnessContext& ctx, TrialStreams& streams);

struct GenerationStats
{
    int generation = 0;
    int active_targets = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::optional<double> best_q;    ///< maximum Q in the population
    std::optional<double> mean_q;    ///< over individuals with defined Q
    std::optional<double> fittest_q; ///< Q of the fittest individual
};

struct TrialRecord
{
    EvoConfig config;
    std::uint64_t seed = 0;
    std::vector<GenerationStats> rows;
    std::vector<Individual> final_population;
    /// Every evaluated generation, when config.keep_history is set.
    std::vector<std::vector<Individual>> history;
    long proportional_fallbacks = 0;
    double wall_seconds = 0.0;
};

/// Called after each generation is evaluated.
using GenerationObserver = std::function<void(int generation, std::span<const Individual>)>;

/// Runs generations 0..cfg.max_generation. Fully determined by (cfg, seed).
TrialRecord run_trial(const EvoConfig& cfg, std::uint64_t seed,
                      const GenerationObserver& observer = {});

/// Summary row for an evaluated population.
GenerationStats summarize_generation(int generation, int active_targets,
                                     std::span<const Individual> population);

} // namespace grnmod
