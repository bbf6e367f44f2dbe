#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "grnmod/analysis.hpp"
#include "grnmod/config.hpp"
#include "grnmod/stats.hpp"
#include "grnmod/trial_io.hpp"

namespace grnmod {

struct Treatment
{
    std::string name;
    ConfigEntries overrides;
};

/// A directional test between two treatments on one final-generation metric.
struct ComparisonSpec
{
    std::string metric; ///< "fitness" or "q"
    std::string a;
    std::string b;
    Alternative alternative = Alternative::ALessB;
};

enum class Profile { Desk, Paper };

struct ExperimentSpec
{
    std::string name;
    ConfigEntries base;
    std::vector<Treatment> treatments;
    int trials = 20;
    std::uint64_t master_seed = 1;
    std::vector<ComparisonSpec> comparisons;

    /// Treatment config = base merged with its overrides.
    EvoConfig treatment_config(const Treatment& t) const;
};

/// JSON experiment spec:
/// { "name", "trials", "master_seed", "base": {key: value},
///   "treatments": [{"name", "overrides": {key: value}}],
///   "comparisons": [{"metric", "a", "b", "alternative"}] }
ExperimentSpec parse_experiment_spec(std::istream& is);
ExperimentSpec load_experiment_spec(const std::string& path);

/// Predefined treatment comparisons: crossover, elitism, selection, dynamic,
/// extended. Throws std::invalid_argument for an unknown name.
ExperimentSpec builtin_suite(const std::string& name);
const std::vector<std::string>& builtin_suite_names();

/// Trial counts per profile: desk keeps the spec's count, paper uses 40.
int profile_trials(Profile profile, int spec_trials);

/// Replicate k of every treatment uses this seed, so treatments are paired.
std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& experiment, int trial);

struct TrialSummary
{
    std::string treatment;
    int trial = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_best_fitness = 0.0;
    double final_mean_fitness = 0.0;
    std::optional<double> final_fittest_q;
    std::optional<double> final_best_q;
    std::optional<double> final_mean_q;
};

struct ComparisonResult
{
    ComparisonSpec spec;
    double mean_a = 0.0;
    double mean_b = 0.0;
    int pairs = 0;
    std::optional<WilcoxonResult> test;
};

struct ExperimentResult
{
    std::vector<TrialSummary> trials; ///< treatment-major, trial-minor order
    std::vector<ComparisonResult> comparisons;
};

/// Metric value used in comparisons; nullopt when undefined (e.g. Q of an edgeless genome).
std::optional<double> metric_value(const TrialSummary& s, const std::string& metric);

ComparisonResult compare(const std::vector<TrialSummary>& trials, const ComparisonSpec& spec);

using ProgressCallback = std::function<void(const TrialSummary&)>;

/// Runs every (treatment, trial) pair over `workers` threads, writing
/// out_dir/<treatment>/trial_<k>/ and out_dir/results.csv, comparisons.csv.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                int workers, const ProgressCallback& progress = {});

void write_results_csv(std::ostream& os, const std::vector<TrialSummary>& trials);
void write_comparisons_csv(std::ostream& os, const std::vector<ComparisonResult>& comparisons);
void write_comparisons_text(std::ostream& os, const std::vector<ComparisonResult>& comparisons);

/// Reads results.csv-style trial summaries (optionally only one treatment).
std::vector<TrialSummary> read_trial_summaries(std::istream& is,
                                               const std::string& treatment_filter = {});

// ---------------------------------------------------------------------------
// Post-hoc analyses over stored trials

struct AnalysisOptions
{
    int perturbation_count = 1000;     ///< per target, frozen
    std::uint64_t seed = 0;            ///< mixed with each trial's seed
    int neighbor_count = 499;
    std::optional<double> mutation_rate; ///< defaults to the trial's
    RemovalOptions removal{};
};

/// Frozen evaluation sets for a trial, deterministic in (trial seed, options.seed).
std::vector<PerturbationSet> analysis_sets(const EvoConfig& cfg, std::uint64_t trial_seed,
                                           const AnalysisOptions& options);

struct TrimResult
{
    double fitness_before = 0.0;
    double fitness_after = 0.0;
    std::optional<double> q_before;
    std::optional<double> q_after;
    int edges_before = 0;
    int edges_after = 0;
    bool improved() const { return fitness_after > fitness_before; }
};

TrimResult trim_comparison(const Genome& g, const Partition& partition,
                           std::span<const PerturbationSet> sets, const FitnessEvaluator& eval,
                           EdgeCollapse collapse);

/// `analyze` modes. Each writes its CSVs into out_dir and returns a short
/// human-readable summary.
std::string analyze_dominance(const std::vector<StoredTrial>& trials,
                              const std::filesystem::path& out_dir);
std::string analyze_trim(const std::vector<StoredTrial>& trials, const std::filesystem::path& out_dir,
                         const AnalysisOptions& options);
std::string analyze_paths(const std::vector<StoredTrial>& trials,
                          const std::filesystem::path& out_dir, const AnalysisOptions& options);
std::string analyze_neighbors(const std::vector<StoredTrial>& trials,
                              const std::filesystem::path& out_dir, const AnalysisOptions& options);

std::vector<StoredTrial> load_trials(const std::filesystem::path& root);

/// Lattice rows: removed_mask,removed_count,fitness,path.
void write_lattice_csv(std::ostream& os, const RemovalLattice& lattice);
/// Neighbor rows: neighbor_id,fitness,q.
void write_neighbors_csv(std::ostream& os, const NeighborProbe& probe);

} // namespace grnmod
