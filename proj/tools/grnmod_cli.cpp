// grnmod command line: run single trials, experiment suites, post-hoc
// analyses, paired comparisons and the exact fitness oracle.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "grnmod/experiment.hpp"

namespace fs = std::filesystem;
using namespace grnmod;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Bad input from the user, as opposed to a failure while doing the work.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

ConfigEntries parse_sets(const std::vector<std::string>& sets)
{
    ConfigEntries out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw UsageError("--set expects key=value, got '" + s + "'");
        std::istringstream in(s);
        for (auto e : read_config_entries(in)) {
            e.line = 0; // not from a file
            out.push_back(e);
        }
    }
    return out;
}

Profile parse_profile(const std::string& p)
{
    if (p == "desk")
        return Profile::Desk;
    if (p == "paper")
        return Profile::Paper;
    throw UsageError("--profile must be desk or paper");
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

struct RunArgs
{
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_run(const RunArgs& a)
{
    ConfigEntries entries;
    if (!a.config.empty())
        entries = load_config_entries(a.config);
    entries = merge_entries(entries, parse_sets(a.sets));
    EvoConfig cfg = config_from_entries(entries);
    const std::uint64_t seed = a.seed.value_or(cfg.seed);
    cfg.seed = seed;
    fs::create_directories(a.out);
    const auto outcome = run_trial_to_dir(cfg, seed, a.out, fs::path(a.out).filename().string());
    const auto& row = outcome.final_row;
    std::cout << "generation " << row.generation << "  best fitness " << format_double(row.best_fitness)
              << "  mean fitness " << format_double(row.mean_fitness) << "  Q of fittest "
              << (row.fittest_q ? format_double(*row.fittest_q) : "undefined") << '\n'
              << std::fixed << std::setprecision(2) << outcome.wall_seconds << " s, wrote "
              << a.out << '\n';
    return 0;
}

struct ExperimentArgs
{
    std::string spec;
    std::string suite;
    std::string out;
    int workers = 0;
    std::string profile = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::vector<std::string> sets;
};

int cmd_experiment(const ExperimentArgs& a)
{
    if (a.spec.empty() == a.suite.empty())
        throw UsageError("give exactly one of --spec or --suite");
    ExperimentSpec spec = a.spec.empty() ? builtin_suite(a.suite) : load_experiment_spec(a.spec);
    spec.trials = profile_trials(parse_profile(a.profile), spec.trials);
    if (a.trials)
        spec.trials = *a.trials;
    if (spec.trials < 1)
        throw UsageError("--trials must be >= 1");
    if (a.seed)
        spec.master_seed = *a.seed;
    spec.base = merge_entries(spec.base, parse_sets(a.sets));
    for (const auto& t : spec.treatments)
        spec.treatment_config(t);

    const int workers = a.workers > 0 ? a.workers
                                      : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    std::cerr << spec.name << ": " << spec.treatments.size() << " treatments x " << spec.trials
              << " trials on " << workers << " workers\n";
    std::size_t done = 0;
    const std::size_t total = spec.treatments.size() * static_cast<std::size_t>(spec.trials);
    const auto result = run_experiment(spec, a.out, workers, [&](const TrialSummary& s) {
        ++done;
        std::cerr << '[' << done << '/' << total << "] " << s.treatment << " trial " << s.trial;
        if (s.ok)
            std::cerr << " fitness " << format_double(s.final_best_fitness);
        else
            std::cerr << " FAILED: " << s.error;
        std::cerr << '\n';
    });

    int failed = 0;
    for (const auto& s : result.trials)
        failed += !s.ok;
    if (failed > 0)
        std::cerr << "warning: " << failed << " trial(s) failed; aggregates use completed trials\n";
    if (!result.comparisons.empty())
        write_comparisons_text(std::cout, result.comparisons);
    std::cout << "results in " << a.out << '\n';
    return failed == static_cast<int>(result.trials.size()) ? kExitRuntime : 0;
}

struct AnalyzeArgs
{
    std::string records;
    std::string mode = "all";
    std::string out;
    std::uint64_t seed = 0;
    int perturbations = 1000;
    int neighbors = 499;
    std::optional<double> mutation_rate;
    std::uint64_t subset_cap = std::uint64_t{1} << 16;
    int orders = 1000;
};

int cmd_analyze(const AnalyzeArgs& a)
{
    if (!fs::exists(a.records))
        throw UsageError("no such record directory: " + a.records);
    const auto trials = load_trials(a.records);
    if (trials.empty())
        throw std::runtime_error("no trial records under " + a.records);
    AnalysisOptions options;
    options.seed = a.seed;
    options.perturbation_count = a.perturbations;
    options.neighbor_count = a.neighbors;
    options.mutation_rate = a.mutation_rate;
    options.removal.subset_cap = a.subset_cap;
    options.removal.sampled_orders = a.orders;
    const fs::path out = a.out.empty() ? fs::path(a.records) / "analysis" : fs::path(a.out);

    const bool all = a.mode == "all";
    if (all || a.mode == "dominance")
        std::cout << "[dominance]\n" << analyze_dominance(trials, out);
    if (all || a.mode == "trim")
        std::cout << "[trim]\n" << analyze_trim(trials, out, options);
    if (all || a.mode == "paths")
        std::cout << "[paths]\n" << analyze_paths(trials, out, options);
    if (all || a.mode == "neighbors")
        std::cout << "[neighbors]\n" << analyze_neighbors(trials, out, options);
    std::cout << "wrote " << out.string() << '\n';
    return 0;
}

struct StatsArgs
{
    std::vector<std::string> files;
    std::string a;
    std::string b;
    std::vector<std::string> metrics{"fitness", "q"};
    std::string alternative = "two_sided";
    std::string out;
};

std::vector<TrialSummary> read_summaries(const std::string& path, const std::string& treatment,
                                         bool single_treatment = true)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open " + path);
    auto rows = read_trial_summaries(in, treatment);
    if (rows.empty())
        throw UsageError("no rows" + (treatment.empty() ? "" : " for treatment '" + treatment + "'") +
                         " in " + path);
    std::set<int> seen;
    for (const auto& r : rows)
        if (single_treatment && !seen.insert(r.trial).second)
            throw UsageError(path + " repeats trial " + std::to_string(r.trial) +
                             "; name the treatment with --a/--b");
    return rows;
}

int cmd_stats(const StatsArgs& a)
{
    std::vector<TrialSummary> rows;
    std::string name_a, name_b;
    if (a.files.size() == 2) {
        name_a = a.a.empty() ? fs::path(a.files[0]).stem().string() : a.a;
        name_b = a.b.empty() ? fs::path(a.files[1]).stem().string() : a.b;
        if (name_a == name_b)
            name_b += "_2";
        for (auto s : read_summaries(a.files[0], a.a)) {
            s.treatment = name_a;
            rows.push_back(s);
        }
        for (auto s : read_summaries(a.files[1], a.b)) {
            s.treatment = name_b;
            rows.push_back(s);
        }
    } else if (a.files.size() == 1) {
        if (a.a.empty() || a.b.empty())
            throw UsageError("with one results file, name both treatments with --a and --b");
        name_a = a.a;
        name_b = a.b;
        rows = read_summaries(a.files[0], {}, false);
    } else {
        throw UsageError("stats takes one results.csv or two trial-summary CSVs");
    }

    std::vector<ComparisonResult> results;
    for (const auto& m : a.metrics) {
        if (m != "fitness" && m != "q")
            throw UsageError("--metric must be fitness or q");
        ComparisonSpec spec{m, name_a, name_b, parse_alternative(a.alternative)};
        results.push_back(compare(rows, spec));
    }
    if (!a.out.empty()) {
        auto out = open_out(a.out);
        write_comparisons_csv(out, results);
    } else {
        write_comparisons_csv(std::cout, results);
        std::cout << '\n';
    }
    write_comparisons_text(std::cout, results);
    return 0;
}

struct OracleArgs
{
    std::string genome;
    std::string target;
    double rate = 0.15;
    int max_steps = 20;
    int samples = 0;
    std::uint64_t seed = 1;
};

int cmd_oracle(const OracleArgs& a)
{
    const Genome g = load_genome(a.genome);
    const Pattern target = Pattern::parse(a.target);
    if (target.size() != g.size())
        throw UsageError("target has " + std::to_string(target.size()) + " genes, genome has " +
                         std::to_string(g.size()));
    if (g.size() > 20)
        throw UsageError("exact oracle enumerates 2^N states; N must be <= 20");
    FitnessParams params;
    params.max_steps = a.max_steps;
    const double exact_gamma = exact_mean_gamma(g, target, a.rate, params);
    std::cout << std::setprecision(12) << "exact mean gamma " << exact_gamma << "\nexact fitness    "
              << fitness_from_mean_gamma(exact_gamma, params) << '\n';
    if (a.samples > 0) {
        Rng rng(a.seed);
        const auto set = sample_perturbations(target, a.samples, a.rate, rng);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& s : set.samples) {
            const double v = gamma(g, s, target, params);
            sum += v;
            sum_sq += v * v;
        }
        const double n = static_cast<double>(a.samples);
        const double mean = sum / n;
        const double var = a.samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
        // Delta method through the fitness transform.
        const double slope = params.scale * std::exp(-params.scale * mean);
        const double se = slope * std::sqrt(var / n);
        const double mc = fitness_from_mean_gamma(mean, params);
        const double exact = fitness_from_mean_gamma(exact_gamma, params);
        std::cout << "sampled fitness  " << mc << "  (P=" << a.samples << ", se " << se << ")\n";
        if (se > 0)
            std::cout << "z                " << (mc - exact) / se << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Boolean gene regulatory network evolution and modularity experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one trial and write its records");
    run_cmd->add_option("--config", run.config, "key = value configuration file")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--set", run.sets, "Override one setting, key=value (repeatable)");
    run_cmd->add_option("--seed", run.seed, "Trial seed (default: the config's seed)");
    run_cmd->add_option("--out", run.out, "Output directory")->required();
    run_cmd->add_option("--profile", [](const CLI::results_t& r) { parse_profile(r[0]); return true; },
                        "desk|paper (no effect on a single trial)");

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Run every treatment of an experiment");
    exp_cmd->add_option("--spec", exp.spec, "JSON experiment spec")->check(CLI::ExistingFile);
    exp_cmd->add_option("--suite", exp.suite, "Built-in suite")
        ->check(CLI::IsMember(builtin_suite_names()));
    exp_cmd->add_option("--out", exp.out, "Output directory")->required();
    exp_cmd->add_option("--workers", exp.workers, "Worker threads (default: all cores)");
    exp_cmd->add_option("--profile", exp.profile, "desk keeps the spec's trial count, paper uses 40")
        ->check(CLI::IsMember({"desk", "paper"}));
    exp_cmd->add_option("--seed", exp.seed, "Master seed override");
    exp_cmd->add_option("--trials", exp.trials, "Trials per treatment override");
    exp_cmd->add_option("--set", exp.sets, "Override a base setting, key=value (repeatable)");

    AnalyzeArgs an;
    auto* an_cmd = app.add_subcommand("analyze", "Post-hoc analyses of stored trials");
    an_cmd->add_option("records", an.records, "Trial or experiment directory")->required();
    an_cmd->add_option("--mode", an.mode, "dominance|trim|paths|neighbors|all")
        ->check(CLI::IsMember({"dominance", "trim", "paths", "neighbors", "all"}));
    an_cmd->add_option("--out", an.out, "Output directory (default: <records>/analysis)");
    an_cmd->add_option("--seed", an.seed, "Mixed into each trial's analysis streams");
    an_cmd->add_option("--perturbations", an.perturbations, "Frozen samples per target")
        ->check(CLI::PositiveNumber);
    an_cmd->add_option("--neighbors", an.neighbors, "Mutants per probed genome")
        ->check(CLI::PositiveNumber);
    an_cmd->add_option("--mutation-rate", an.mutation_rate, "Probe mutation rate")
        ->check(CLI::Range(0.0, 1.0));
    an_cmd->add_option("--subset-cap", an.subset_cap, "Largest exhaustive removal lattice");
    an_cmd->add_option("--orders", an.orders, "Sampled removal orders beyond the cap")
        ->check(CLI::PositiveNumber);

    StatsArgs st;
    auto* st_cmd = app.add_subcommand("stats", "Paired Wilcoxon comparison of two treatments");
    st_cmd->add_option("files", st.files, "results.csv, or two trial-summary CSVs")
        ->required()
        ->check(CLI::ExistingFile);
    st_cmd->add_option("--a", st.a, "First treatment");
    st_cmd->add_option("--b", st.b, "Second treatment");
    st_cmd->add_option("--metric", st.metrics, "fitness and/or q");
    st_cmd->add_option("--alternative", st.alternative, "a_less_b|a_greater_b|two_sided")
        ->check(CLI::IsMember({"a_less_b", "a_greater_b", "two_sided", "less", "greater"}));
    st_cmd->add_option("--out", st.out, "Write the comparison CSV here");

    OracleArgs orc;
    auto* orc_cmd = app.add_subcommand("oracle", "Exact expected fitness of a genome");
    orc_cmd->add_option("--genome", orc.genome, "Genome text file")->required()->check(CLI::ExistingFile);
    orc_cmd->add_option("--target", orc.target, "Target pattern, e.g. +-+-+-+-")->required();
    orc_cmd->add_option("--rate", orc.rate, "Per-gene flip probability")->check(CLI::Range(0.0, 1.0));
    orc_cmd->add_option("--max-steps", orc.max_steps, "Update limit")->check(CLI::PositiveNumber);
    orc_cmd->add_option("--samples", orc.samples, "Also estimate by sampling this many perturbations")
        ->check(CLI::NonNegativeNumber);
    orc_cmd->add_option("--seed", orc.seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run_cmd)
            return cmd_run(run);
        if (*exp_cmd)
            return cmd_experiment(exp);
        if (*an_cmd)
            return cmd_analyze(an);
        if (*st_cmd)
            return cmd_stats(st);
        if (*orc_cmd)
            return cmd_oracle(orc);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error:\n";
        for (const auto& p : e.problems())
            std::cerr << "  " << p << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
