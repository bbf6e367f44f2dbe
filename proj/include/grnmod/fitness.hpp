#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "grnmod/grn.hpp"
#include "grnmod/random.hpp"

namespace grnmod {

enum class FitnessMode { Dynamic, Static };

struct FitnessParams
{
    int max_steps = 20;         ///< attractor step budget
    int trajectory_exponent = 5;
    double scale = 3.0;         ///< f = 1 - exp(-scale * mean gamma)
};

/// Perturbed copies of one target.
struct PerturbationSet
{
    Pattern target;
    double rate = 0.0;
    std::vector<Pattern> samples;
};

/// Each gene of each sample is flipped independently with probability `rate`.
PerturbationSet sample_perturbations(const Pattern& target, int count, double rate, Rng& rng);

/// Audit format: "target=<+-> rate=<r> P=<count>" then one sample per line.
void write_perturbations(std::ostream& os, const PerturbationSet& set);
PerturbationSet read_perturbations(std::istream& is);

/// (1 - D/N)^exponent where D is the attractor's Hamming distance to the target,
/// and D = N when no fixed point is reached.
double gamma(const Genome& g, const Pattern& perturbed, const Pattern& target,
             const FitnessParams& params = {});

/// Maps a mean gamma to fitness.
double fitness_from_mean_gamma(double mean_gamma, const FitnessParams& params = {});

/// Upper bound of single-target fitness (mean gamma = 1).
double fitness_ceiling(const FitnessParams& params = {});

double fitness_single_target(const Genome& g, const PerturbationSet& set,
                             const FitnessParams& params = {});

/// Mean of single-target fitness over the given sets.
double fitness_multi_target(const Genome& g, std::span<const PerturbationSet> sets,
                            const FitnessParams& params = {});

/// Exact expectation of the mean gamma over the perturbation distribution,
/// by enumerating all 2^N start states. N <= 20.
double exact_mean_gamma(const Genome& g, const Pattern& target, double rate,
                        const FitnessParams& params = {});

/// Exact limit of fitness_single_target as the sample count grows.
double exact_fitness_oracle(const Genome& g, const Pattern& target, double rate,
                            const FitnessParams& params = {});

/// Fast evaluator bound to one parameter set. Precomputes the gamma table.
class FitnessEvaluator
{
  public:
    explicit FitnessEvaluator(int n, FitnessParams params = {});

    const FitnessParams& params() const noexcept { return params_; }

    double mean_gamma(const Genome& g, const PerturbationSet& set) const;
    double single(const Genome& g, const PerturbationSet& set) const;
    double multi(const Genome& g, std::span<const PerturbationSet> sets) const;

  private:
    int n_;
    FitnessParams params_;
    std::array<double, kMaxGenes + 1> gamma_by_distance_{};
};

/// Perturbation sets for every target of a run, refreshed per generation.
///
/// In Dynamic mode the active targets' sets are resampled on every refresh; in
/// Static mode all sets are sampled once at construction and never change.
class FitnessContext
{
  public:
    FitnessContext(FitnessMode mode, std::vector<Pattern> targets, int sample_count, double rate,
                   FitnessParams params, Rng& rng);

    /// Activates the first `active_count` targets; resamples in Dynamic mode.
    void refresh(int active_count, Rng& rng);

    FitnessMode mode() const noexcept { return mode_; }
    int active_count() const noexcept { return active_; }
    std::span<const PerturbationSet> active_sets() const { return {sets_.data(), static_cast<std::size_t>(active_)}; }
    std::span<const PerturbationSet> all_sets() const { return sets_; }
    const FitnessEvaluator& evaluator() const noexcept { return evaluator_; }

    /// Mean fitness over the active targets.
    double evaluate(const Genome& g) const;

  private:
    FitnessMode mode_;
    std::vector<Pattern> targets_;
    int sample_count_;
    double rate_;
    FitnessEvaluator evaluator_;
    std::vector<PerturbationSet> sets_;
    int active_ = 0;
};

} // namespace grnmod
