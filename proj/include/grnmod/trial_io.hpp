#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "grnmod/analysis.hpp"
#include "grnmod/config.hpp"
#include "grnmod/evolution.hpp"

namespace grnmod {

inline constexpr const char* kVersion = "0.1.0";

/// Column order of trace.csv.
inline constexpr const char* kTraceHeader =
    "generation,active_targets,best_fitness,mean_fitness,best_q,mean_q,fittest_q";

/// Empty string for an undefined value.
std::string format_optional(const std::optional<double>& v);

std::string trace_line(const GenerationStats& row);

/// Appends trace rows to a file as generations complete.
class TraceWriter
{
  public:
    explicit TraceWriter(const std::filesystem::path& path);
    void write(const GenerationStats& row);
    void close();

  private:
    std::ofstream out_;
    int pending_ = 0;
};

/// What a completed trial leaves behind, in memory.
struct TrialOutcome
{
    std::uint64_t seed = 0;
    GenerationStats final_row;
    std::optional<DominancePair> dominance;
    std::vector<Individual> final_population;
    long proportional_fallbacks = 0;
    double wall_seconds = 0.0;
};

/// Runs one trial and writes into `dir`:
///   trace.csv, manifest.json, config.txt, final_pop/genome_<k>.txt,
///   final_pop/summary.csv, dominance.csv and its genome files.
TrialOutcome run_trial_to_dir(const EvoConfig& cfg, std::uint64_t seed,
                              const std::filesystem::path& dir, const std::string& trial_id);

/// A trial directory read back from disk.
struct StoredTrial
{
    std::filesystem::path dir;
    std::string id;
    EvoConfig config;
    std::uint64_t seed = 0;
    std::optional<Genome> most_modular;
    std::optional<Genome> least_modular_fittest;
    std::vector<Genome> final_population;
    std::vector<double> final_fitness;
};

StoredTrial load_trial(const std::filesystem::path& dir, const std::string& id);

/// Trial directories (those holding manifest.json) under root, sorted by path.
std::vector<std::filesystem::path> find_trial_dirs(const std::filesystem::path& root);

/// Dominance CSV header and row writer shared by `run` and `analyze`.
inline constexpr const char* kDominanceHeader = "trial_id,role,fitness,q,genome_file";

} // namespace grnmod
