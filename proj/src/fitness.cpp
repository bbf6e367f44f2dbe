#include "grnmod/fitness.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace grnmod {

namespace {

void check_rate(double rate)
{
    if (!(rate >= 0.0 && rate <= 1.0))
        throw std::invalid_argument("perturbation rate must be in [0, 1]");
}

double trajectory_score(int distance, int n, int exponent)
{
    return std::pow(1.0 - static_cast<double>(distance) / n, exponent);
}

} // namespace

PerturbationSet sample_perturbations(const Pattern& target, int count, double rate, Rng& rng)
{
    if (count < 1)
        throw std::invalid_argument("perturbation count must be >= 1");
    check_rate(rate);
    PerturbationSet set{target, rate, {}};
    set.samples.reserve(count);
    const int n = target.size();
    for (int k = 0; k < count; ++k) {
        GeneMask flips = 0;
        for (int i = 0; i < n; ++i)
            if (rng.bernoulli(rate))
                flips |= GeneMask{1} << i;
        set.samples.emplace_back(n, target.active() ^ flips);
    }
    return set;
}

void write_perturbations(std::ostream& os, const PerturbationSet& set)
{
    os << "target=" << set.target.str() << " rate=" << set.rate << " P=" << set.samples.size()
       << '\n';
    for (const auto& s : set.samples)
        os << s.str() << '\n';
}

PerturbationSet read_perturbations(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("perturbation file: missing header");
    std::istringstream header(line);
    std::string target_tok, rate_tok, count_tok;
    header >> target_tok >> rate_tok >> count_tok;
    if (target_tok.rfind("target=", 0) != 0 || rate_tok.rfind("rate=", 0) != 0 ||
        count_tok.rfind("P=", 0) != 0)
        throw std::runtime_error("perturbation file: bad header '" + line + "'");
    PerturbationSet set{Pattern::parse(target_tok.substr(7)), std::stod(rate_tok.substr(5)), {}};
    const int count = std::stoi(count_tok.substr(2));
    for (int k = 0; k < count; ++k) {
        if (!std::getline(is, line))
            throw std::runtime_error("perturbation file: expected " + std::to_string(count) +
                                     " samples");
        set.samples.push_back(Pattern::parse(line));
        if (set.samples.back().size() != set.target.size())
            throw std::runtime_error("perturbation file: sample length mismatch");
    }
    return set;
}

double gamma(const Genome& g, const Pattern& perturbed, const Pattern& target,
             const FitnessParams& params)
{
    if (perturbed.size() != g.size() || target.size() != g.size())
        throw std::invalid_argument("gamma: dimension mismatch");
    const auto attractor = find_attractor(g, perturbed, params.max_steps);
    const int distance = attractor ? hamming(attractor->state, target) : g.size();
    return trajectory_score(distance, g.size(), params.trajectory_exponent);
}

double fitness_from_mean_gamma(double mean_gamma, const FitnessParams& params)
{
    return 1.0 - std::exp(-params.scale * mean_gamma);
}

double fitness_ceiling(const FitnessParams& params)
{
    return fitness_from_mean_gamma(1.0, params);
}

double fitness_single_target(const Genome& g, const PerturbationSet& set,
                             const FitnessParams& params)
{
    return FitnessEvaluator(g.size(), params).single(g, set);
}

double fitness_multi_target(const Genome& g, std::span<const PerturbationSet> sets,
                            const FitnessParams& params)
{
    return FitnessEvaluator(g.size(), params).multi(g, sets);
}

double exact_mean_gamma(const Genome& g, const Pattern& target, double rate,
                        const FitnessParams& params)
{
    const int n = g.size();
    if (n > 20)
        throw std::invalid_argument("exact oracle limited to N <= 20");
    if (target.size() != n)
        throw std::invalid_argument("exact oracle: dimension mismatch");
    check_rate(rate);
    if (params.max_steps < 1)
        throw std::invalid_argument("max_steps must be >= 1");

    std::array<double, kMaxGenes + 1> prob{};
    std::array<double, kMaxGenes + 1> score{};
    for (int k = 0; k <= n; ++k) {
        prob[k] = std::pow(rate, k) * std::pow(1.0 - rate, n - k);
        score[k] = trajectory_score(k, n, params.trajectory_exponent);
    }
    double total = 0.0;
    const GeneMask count = GeneMask{1} << n;
    for (GeneMask flips = 0; flips < count; ++flips) {
        const double p = prob[std::popcount(flips)];
        if (p == 0.0)
            continue;
        const auto fixed = detail::settle_mask(g, target.active() ^ flips, params.max_steps);
        const int distance = fixed ? std::popcount(*fixed ^ target.active()) : n;
        total += p * score[distance];
    }
    return total;
}

double exact_fitness_oracle(const Genome& g, const Pattern& target, double rate,
                            const FitnessParams& params)
{
    return fitness_from_mean_gamma(exact_mean_gamma(g, target, rate, params), params);
}

// ---------------------------------------------------------------------------

FitnessEvaluator::FitnessEvaluator(int n, FitnessParams params) : n_(n), params_(params)
{
    if (n < 1 || n > kMaxGenes)
        throw std::invalid_argument("gene count out of range");
    if (params.max_steps < 1)
        throw std::invalid_argument("max_steps must be >= 1");
    for (int d = 0; d <= n; ++d)
        gamma_by_distance_[d] = trajectory_score(d, n, params.trajectory_exponent);
}

double FitnessEvaluator::mean_gamma(const Genome& g, const PerturbationSet& set) const
{
    if (g.size() != n_ || set.target.size() != n_)
        throw std::invalid_argument("fitness: dimension mismatch");
    if (set.samples.empty())
        throw std::invalid_argument("fitness: empty perturbation set");
    const GeneMask target = set.target.active();
    double sum = 0.0;
    for (const auto& s : set.samples) {
        const auto fixed = detail::settle_mask(g, s.active(), params_.max_steps);
        sum += gamma_by_distance_[fixed ? std::popcount(*fixed ^ target) : n_];
    }
    return sum / static_cast<double>(set.samples.size());
}

double FitnessEvaluator::single(const Genome& g, const PerturbationSet& set) const
{
    return fitness_from_mean_gamma(mean_gamma(g, set), params_);
}

double FitnessEvaluator::multi(const Genome& g, std::span<const PerturbationSet> sets) const
{
    if (sets.empty())
        throw std::invalid_argument("fitness: no active targets");
    double sum = 0.0;
    for (const auto& set : sets)
        sum += single(g, set);
    return sum / static_cast<double>(sets.size());
}

// ---------------------------------------------------------------------------

FitnessContext::FitnessContext(FitnessMode mode, std::vector<Pattern> targets, int sample_count,
                               double rate, FitnessParams params, Rng& rng)
    : mode_(mode)
    , targets_(std::move(targets))
    , sample_count_(sample_count)
    , rate_(rate)
    , evaluator_(targets_.empty() ? 1 : targets_.front().size(), params)
{
    if (targets_.empty())
        throw std::invalid_argument("fitness context needs at least one target");
    if (sample_count < 1)
        throw std::invalid_argument("perturbation count must be >= 1");
    check_rate(rate);
    sets_.reserve(targets_.size());
    for (const auto& t : targets_) {
        if (t.size() != targets_.front().size())
            throw std::invalid_argument("targets differ in length");
        if (mode_ == FitnessMode::Static)
            sets_.push_back(sample_perturbations(t, sample_count_, rate_, rng));
        else
            sets_.push_back(PerturbationSet{t, rate_, {}});
    }
}

void FitnessContext::refresh(int active_count, Rng& rng)
{
    if (active_count < 1 || active_count > static_cast<int>(targets_.size()))
        throw std::invalid_argument("active target count out of range");
    active_ = active_count;
    if (mode_ == FitnessMode::Dynamic)
        for (int t = 0; t < active_; ++t)
            sets_[t] = sample_perturbations(targets_[t], sample_count_, rate_, rng);
}

double FitnessContext::evaluate(const Genome& g) const
{
    if (active_ < 1)
        throw std::logic_error("fitness context has no active targets; call refresh()");
    return evaluator_.multi(g, active_sets());
}

} // namespace grnmod
