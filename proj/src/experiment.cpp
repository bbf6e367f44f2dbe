#include "grnmod/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace grnmod {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

ConfigEntries entries_from_json(const json& obj, const std::string& where)
{
    if (!obj.is_object())
        throw std::runtime_error(where + " must be an object");
    ConfigEntries out;
    for (const auto& [key, value] : obj.items()) {
        std::string text;
        if (value.is_string())
            text = value.get<std::string>();
        else if (value.is_number_integer())
            text = std::to_string(value.get<long long>());
        else if (value.is_number())
            text = format_double(value.get<double>());
        else
            throw std::runtime_error(where + "." + key + " must be a string or number");
        out.push_back({key, text, 0});
    }
    return out;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string file_safe(std::string id)
{
    for (char& c : id)
        if (c == '/' || c == '\\')
            c = '_';
    return id;
}

std::string trial_dir_name(int trial)
{
    std::ostringstream ss;
    ss << "trial_" << std::setw(3) << std::setfill('0') << trial;
    return ss.str();
}

} // namespace

EvoConfig ExperimentSpec::treatment_config(const Treatment& t) const
{
    return config_from_entries(merge_entries(base, t.overrides));
}

ExperimentSpec parse_experiment_spec(std::istream& is)
{
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("experiment spec is not valid JSON: ") + e.what());
    }
    ExperimentSpec spec;
    spec.name = doc.value("name", std::string("experiment"));
    spec.trials = doc.value("trials", 20);
    spec.master_seed = doc.value("master_seed", std::uint64_t{1});
    if (spec.trials < 1)
        throw std::runtime_error("experiment spec: trials must be >= 1");
    if (doc.contains("base"))
        spec.base = entries_from_json(doc["base"], "base");
    if (!doc.contains("treatments") || !doc["treatments"].is_array() || doc["treatments"].empty())
        throw std::runtime_error("experiment spec: 'treatments' must be a non-empty array");
    for (const auto& t : doc["treatments"]) {
        Treatment treatment;
        treatment.name = t.at("name").get<std::string>();
        if (treatment.name.empty() || treatment.name.find_first_of("/\\,") != std::string::npos)
            throw std::runtime_error("experiment spec: bad treatment name '" + treatment.name + "'");
        for (const auto& other : spec.treatments)
            if (other.name == treatment.name)
                throw std::runtime_error("experiment spec: duplicate treatment '" + treatment.name + "'");
        if (t.contains("overrides"))
            treatment.overrides = entries_from_json(t["overrides"], "treatments." + treatment.name);
        spec.treatments.push_back(std::move(treatment));
    }
    if (doc.contains("comparisons")) {
        for (const auto& c : doc["comparisons"]) {
            ComparisonSpec cmp;
            cmp.metric = c.at("metric").get<std::string>();
            cmp.a = c.at("a").get<std::string>();
            cmp.b = c.at("b").get<std::string>();
            cmp.alternative = parse_alternative(c.value("alternative", std::string("a_less_b")));
            if (cmp.metric != "fitness" && cmp.metric != "q")
                throw std::runtime_error("experiment spec: metric must be 'fitness' or 'q'");
            auto known = [&](const std::string& n) {
                return std::any_of(spec.treatments.begin(), spec.treatments.end(),
                                   [&](const Treatment& t) { return t.name == n; });
            };
            if (!known(cmp.a) || !known(cmp.b))
                throw std::runtime_error("experiment spec: comparison names an unknown treatment");
            spec.comparisons.push_back(cmp);
        }
    }
    // Surface config problems before any trial starts.
    for (const auto& t : spec.treatments)
        spec.treatment_config(t);
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open experiment spec " + path);
    return parse_experiment_spec(in);
}

namespace {

// Every suite starts from the default configuration; overrides name only what
// the treatment changes.
constexpr const char* kCrossoverSuite = R"({
  "name": "crossover", "trials": 20, "master_seed": 1,
  "treatments": [
    {"name": "none", "overrides": {"crossover_type": "none"}},
    {"name": "horizontal", "overrides": {"crossover_type": "horizontal"}},
    {"name": "diagonal", "overrides": {"crossover_type": "diagonal"}}
  ],
  "comparisons": [
    {"metric": "fitness", "a": "none", "b": "horizontal", "alternative": "a_less_b"},
    {"metric": "fitness", "a": "horizontal", "b": "diagonal", "alternative": "a_less_b"},
    {"metric": "q", "a": "none", "b": "horizontal", "alternative": "a_less_b"},
    {"metric": "q", "a": "horizontal", "b": "diagonal", "alternative": "a_less_b"},
    {"metric": "q", "a": "none", "b": "diagonal", "alternative": "a_less_b"}
  ]
})";

constexpr const char* kElitismSuite = R"({
  "name": "elitism", "trials": 20, "master_seed": 1,
  "treatments": [
    {"name": "elite0", "overrides": {"elite_size": 0}},
    {"name": "elite10", "overrides": {"elite_size": 10}}
  ],
  "comparisons": [
    {"metric": "fitness", "a": "elite10", "b": "elite0", "alternative": "a_greater_b"},
    {"metric": "q", "a": "elite10", "b": "elite0", "alternative": "a_less_b"}
  ]
})";

constexpr const char* kSelectionSuite = R"({
  "name": "selection", "trials": 20, "master_seed": 1,
  "treatments": [
    {"name": "proportional", "overrides": {"selection_type": "proportional"}},
    {"name": "tournament2", "overrides": {"selection_type": "tournament", "tournament_size": 2}},
    {"name": "tournament3", "overrides": {"selection_type": "tournament", "tournament_size": 3}},
    {"name": "tournament10", "overrides": {"selection_type": "tournament", "tournament_size": 10}}
  ],
  "comparisons": [
    {"metric": "fitness", "a": "proportional", "b": "tournament2", "alternative": "a_greater_b"},
    {"metric": "fitness", "a": "tournament3", "b": "tournament2", "alternative": "a_less_b"},
    {"metric": "fitness", "a": "tournament10", "b": "tournament3", "alternative": "a_less_b"},
    {"metric": "q", "a": "proportional", "b": "tournament2", "alternative": "a_greater_b"},
    {"metric": "q", "a": "tournament3", "b": "tournament2", "alternative": "a_less_b"},
    {"metric": "q", "a": "tournament10", "b": "tournament3", "alternative": "a_less_b"}
  ]
})";

constexpr const char* kDynamicSuite = R"({
  "name": "dynamic", "trials": 20, "master_seed": 1,
  "treatments": [
    {"name": "dynamic", "overrides": {"fitness_mode": "dynamic"}},
    {"name": "static", "overrides": {"fitness_mode": "static"}}
  ],
  "comparisons": [
    {"metric": "fitness", "a": "static", "b": "dynamic", "alternative": "a_less_b"},
    {"metric": "q", "a": "static", "b": "dynamic", "alternative": "a_less_b"}
  ]
})";

// 15 genes in three blocks of five; consecutive targets flip one block at a
// time in Gray-code order, so the seven targets are distinct and the change
// profiles split the genes into the three blocks.
constexpr const char* kExtendedSuite = R"({
  "name": "extended", "trials": 20, "master_seed": 1,
  "base": {
    "targets": "+-+-+-+-+-+-+-+,-+-+--+-+-+-+-+,-+-+-+-+-++-+-+,+-+-++-+-++-+-+,+-+-++-+-+-+-+-,-+-+-+-+-+-+-+-,-+-+--+-+--+-+-",
    "target_generations": "0,5000,10000,14000,18000,22000,26000",
    "max_generation": 35000,
    "dominance_start": 26000
  },
  "treatments": [
    {"name": "diagonal", "overrides": {}}
  ]
})";

ExperimentSpec parse_suite(const char* text)
{
    std::istringstream in(text);
    return parse_experiment_spec(in);
}

} // namespace

const std::vector<std::string>& builtin_suite_names()
{
    static const std::vector<std::string> names{"crossover", "elitism", "selection", "dynamic",
                                                "extended"};
    return names;
}

ExperimentSpec builtin_suite(const std::string& name)
{
    if (name == "crossover")
        return parse_suite(kCrossoverSuite);
    if (name == "elitism")
        return parse_suite(kElitismSuite);
    if (name == "selection")
        return parse_suite(kSelectionSuite);
    if (name == "dynamic")
        return parse_suite(kDynamicSuite);
    if (name == "extended")
        return parse_suite(kExtendedSuite);
    throw std::invalid_argument("unknown suite '" + name + "'");
}

int profile_trials(Profile profile, int spec_trials)
{
    return profile == Profile::Paper ? 40 : spec_trials;
}

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& experiment, int trial)
{
    return derive_seed(derive_seed(master_seed, experiment), static_cast<std::uint64_t>(trial));
}

std::optional<double> metric_value(const TrialSummary& s, const std::string& metric)
{
    if (!s.ok)
        return std::nullopt;
    if (metric == "fitness")
        return s.final_best_fitness;
    if (metric == "q")
        return s.final_fittest_q;
    throw std::invalid_argument("unknown metric '" + metric + "'");
}

ComparisonResult compare(const std::vector<TrialSummary>& trials, const ComparisonSpec& spec)
{
    ComparisonResult result;
    result.spec = spec;
    std::vector<std::pair<double, double>> pairs;
    for (const auto& a : trials) {
        if (a.treatment != spec.a)
            continue;
        const auto b = std::find_if(trials.begin(), trials.end(), [&](const TrialSummary& s) {
            return s.treatment == spec.b && s.trial == a.trial;
        });
        if (b == trials.end())
            continue;
        const auto va = metric_value(a, spec.metric);
        const auto vb = metric_value(*b, spec.metric);
        if (va && vb)
            pairs.emplace_back(*va, *vb);
    }
    result.pairs = static_cast<int>(pairs.size());
    if (pairs.empty())
        return result;
    for (const auto& [a, b] : pairs) {
        result.mean_a += a;
        result.mean_b += b;
    }
    result.mean_a /= static_cast<double>(pairs.size());
    result.mean_b /= static_cast<double>(pairs.size());
    result.test = wilcoxon_signed_rank(pairs, spec.alternative);
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const fs::path& out_dir, int workers,
                                const ProgressCallback& progress)
{
    struct Task
    {
        const Treatment* treatment;
        int trial;
    };
    std::vector<Task> tasks;
    for (const auto& t : spec.treatments)
        for (int k = 0; k < spec.trials; ++k)
            tasks.push_back({&t, k});

    std::vector<EvoConfig> configs;
    for (const auto& t : spec.treatments)
        configs.push_back(spec.treatment_config(t));

    fs::create_directories(out_dir);
    ExperimentResult result;
    result.trials.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& task = tasks[i];
            const auto t_index = static_cast<std::size_t>(task.treatment - spec.treatments.data());
            TrialSummary& s = result.trials[i];
            s.treatment = task.treatment->name;
            s.trial = task.trial;
            s.seed = trial_seed(spec.master_seed, spec.name, task.trial);
            try {
                const std::string id = s.treatment + "/" + trial_dir_name(task.trial);
                const auto outcome = run_trial_to_dir(configs[t_index], s.seed, out_dir / id, id);
                s.final_best_fitness = outcome.final_row.best_fitness;
                s.final_mean_fitness = outcome.final_row.mean_fitness;
                s.final_fittest_q = outcome.final_row.fittest_q;
                s.final_best_q = outcome.final_row.best_q;
                s.final_mean_q = outcome.final_row.mean_q;
                s.ok = true;
            } catch (const std::exception& e) {
                s.ok = false;
                s.error = e.what();
            }
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(s);
            }
        }
    };

    const int count = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < count; ++w)
            pool.emplace_back(worker);
        worker();
    }

    for (const auto& c : spec.comparisons)
        result.comparisons.push_back(compare(result.trials, c));

    {
        auto out = open_out(out_dir / "results.csv");
        write_results_csv(out, result.trials);
    }
    {
        auto out = open_out(out_dir / "comparisons.csv");
        write_comparisons_csv(out, result.comparisons);
    }
    return result;
}

void write_results_csv(std::ostream& os, const std::vector<TrialSummary>& trials)
{
    os << "treatment,trial,seed,status,final_best_fitness,final_mean_fitness,final_fittest_q,"
          "final_best_q,final_mean_q\n";
    for (const auto& s : trials) {
        os << s.treatment << ',' << s.trial << ',' << s.seed << ',' << (s.ok ? "ok" : "failed");
        if (s.ok)
            os << ',' << format_double(s.final_best_fitness) << ','
               << format_double(s.final_mean_fitness) << ',' << format_optional(s.final_fittest_q)
               << ',' << format_optional(s.final_best_q) << ',' << format_optional(s.final_mean_q);
        else
            os << ",,,,,";
        os << '\n';
    }
}

void write_comparisons_csv(std::ostream& os, const std::vector<ComparisonResult>& comparisons)
{
    os << "metric,treatment_a,treatment_b,alternative,pairs,mean_a,mean_b,w,p_value,exact\n";
    for (const auto& c : comparisons) {
        os << c.spec.metric << ',' << c.spec.a << ',' << c.spec.b << ','
           << to_string(c.spec.alternative) << ',' << c.pairs << ',' << format_double(c.mean_a)
           << ',' << format_double(c.mean_b) << ',';
        if (c.test)
            os << format_double(c.test->w) << ',' << format_double(c.test->p_value) << ','
               << (c.test->exact ? "true" : "false");
        else
            os << ",,";
        os << '\n';
    }
}

void write_comparisons_text(std::ostream& os, const std::vector<ComparisonResult>& comparisons)
{
    os << std::left << std::setw(9) << "metric" << std::setw(28) << "comparison" << std::right
       << std::setw(6) << "pairs" << std::setw(11) << "mean_a" << std::setw(11) << "mean_b"
       << std::setw(9) << "W" << std::setw(12) << "p" << '\n';
    for (const auto& c : comparisons) {
        const char* op = c.spec.alternative == Alternative::ALessB      ? " < "
                         : c.spec.alternative == Alternative::AGreaterB ? " > "
                                                                        : " != ";
        std::ostringstream w, p;
        if (c.test) {
            w << std::fixed << std::setprecision(1) << c.test->w;
            p << std::setprecision(4) << c.test->p_value;
        } else {
            w << "n/a";
            p << "n/a";
        }
        os << std::left << std::setw(9) << c.spec.metric << std::setw(28)
           << (c.spec.a + op + c.spec.b) << std::right << std::setw(6) << c.pairs << std::fixed
           << std::setprecision(4) << std::setw(11) << c.mean_a << std::setw(11) << c.mean_b
           << std::defaultfloat << std::setw(9) << w.str() << std::setw(12) << p.str() << '\n';
    }
}

std::vector<TrialSummary> read_trial_summaries(std::istream& is, const std::string& treatment_filter)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("trial summary CSV is empty");
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string col;
        while (std::getline(h, col, ','))
            header.push_back(col);
    }
    auto column = [&](const std::string& name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    const int c_trial = column("trial");
    const int c_fit = column("final_best_fitness");
    const int c_q = column("final_fittest_q");
    const int c_treat = column("treatment");
    const int c_status = column("status");
    if (c_trial < 0 || c_fit < 0 || c_q < 0)
        throw std::runtime_error(
            "trial summary CSV needs columns trial, final_best_fitness, final_fittest_q");

    std::vector<TrialSummary> out;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ','))
            cells.push_back(cell);
        cells.resize(header.size());
        TrialSummary s;
        s.treatment = c_treat >= 0 ? cells[c_treat] : std::string{};
        if (!treatment_filter.empty() && s.treatment != treatment_filter)
            continue;
        s.trial = std::stoi(cells[c_trial]);
        s.ok = c_status < 0 || cells[c_status] == "ok";
        if (s.ok) {
            s.final_best_fitness = std::stod(cells[c_fit]);
            if (!cells[c_q].empty())
                s.final_fittest_q = std::stod(cells[c_q]);
        }
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<PerturbationSet> analysis_sets(const EvoConfig& cfg, std::uint64_t seed,
                                           const AnalysisOptions& options)
{
    Rng rng(derive_seed(derive_seed(seed, "analysis"), options.seed));
    const auto targets = cfg.schedule.targets();
    return frozen_sets(targets, options.perturbation_count, cfg.perturbation_rate, rng);
}

TrimResult trim_comparison(const Genome& g, const Partition& partition,
                           std::span<const PerturbationSet> sets, const FitnessEvaluator& eval,
                           EdgeCollapse collapse)
{
    const Genome trimmed = trim_inter_module(g, partition);
    TrimResult r;
    r.fitness_before = eval.multi(g, sets);
    r.fitness_after = eval.multi(trimmed, sets);
    r.q_before = q_score(g, partition, collapse);
    r.q_after = q_score(trimmed, partition, collapse);
    r.edges_before = g.edge_count();
    r.edges_after = trimmed.edge_count();
    return r;
}

std::vector<StoredTrial> load_trials(const fs::path& root)
{
    std::vector<StoredTrial> out;
    for (const auto& dir : find_trial_dirs(root)) {
        std::string id = fs::relative(dir, root).generic_string();
        if (id.empty() || id == ".")
            id = dir.filename().string();
        out.push_back(load_trial(dir, id));
    }
    return out;
}

std::string analyze_dominance(const std::vector<StoredTrial>& trials, const fs::path& out_dir)
{
    fs::create_directories(out_dir);
    auto out = open_out(out_dir / "dominance.csv");
    out << kDominanceHeader << '\n';
    std::vector<double> mq, mf, lq, lf;
    for (const auto& t : trials) {
        if (!t.most_modular || !t.least_modular_fittest)
            continue;
        // Fitness and Q as recorded during the run, not re-evaluated. Genome
        // paths are relative to the records root so reruns compare equal.
        std::ifstream src(t.dir / "dominance.csv");
        std::string line;
        std::getline(src, line);
        while (std::getline(src, line)) {
            if (line.empty())
                continue;
            std::istringstream row(line);
            std::string id, role, fit, q, file;
            std::getline(row, id, ',');
            std::getline(row, role, ',');
            std::getline(row, fit, ',');
            std::getline(row, q, ',');
            std::getline(row, file, ',');
            out << t.id << ',' << role << ',' << fit << ',' << q << ','
                << (fs::path(t.id) / file).lexically_normal().generic_string() << '\n';
            auto& qs = role == "fittest_of_most_modular" ? mq : lq;
            auto& fs_ = role == "fittest_of_most_modular" ? mf : lf;
            fs_.push_back(std::stod(fit));
            if (!q.empty())
                qs.push_back(std::stod(q));
        }
    }
    std::ostringstream summary;
    summary << std::fixed << std::setprecision(4);
    if (!mf.empty() && !mq.empty() && !lf.empty() && !lq.empty())
        summary << "fittest of most modular: Q " << summarize(mq).mean << " fitness "
                << summarize(mf).mean << "\nleast modular of fittest: Q " << summarize(lq).mean
                << " fitness " << summarize(lf).mean << "\n";
    summary << "trials: " << mf.size() << "\n";
    return summary.str();
}

std::string analyze_trim(const std::vector<StoredTrial>& trials, const fs::path& out_dir,
                         const AnalysisOptions& options)
{
    fs::create_directories(out_dir);
    auto out = open_out(out_dir / "trim.csv");
    out << "trial_id,fitness_before,fitness_after,q_before,q_after,edges_before,edges_after,improved\n";
    int improved = 0;
    int total = 0;
    for (const auto& t : trials) {
        if (!t.least_modular_fittest)
            continue;
        const auto sets = analysis_sets(t.config, t.seed, options);
        const FitnessEvaluator eval(t.config.schedule.gene_count(), t.config.fitness);
        const auto r = trim_comparison(*t.least_modular_fittest, t.config.effective_partition(),
                                       sets, eval, t.config.edge_collapse);
        out << t.id << ',' << format_double(r.fitness_before) << ',' << format_double(r.fitness_after)
            << ',' << format_optional(r.q_before) << ',' << format_optional(r.q_after) << ','
            << r.edges_before << ',' << r.edges_after << ',' << (r.improved() ? 1 : 0) << '\n';
        improved += r.improved();
        ++total;
    }
    std::ostringstream summary;
    summary << "improved after trimming: " << improved << " of " << total << '\n';
    return summary.str();
}

void write_lattice_csv(std::ostream& os, const RemovalLattice& lattice)
{
    os << "removed_mask,removed_count,fitness,path\n";
    for (const auto& p : lattice.points) {
        std::string mask;
        for (bool b : p.removed)
            mask += b ? '1' : '0';
        if (mask.empty())
            mask = "-";
        os << mask << ',' << p.removed_count << ',' << format_double(p.fitness) << ',' << p.path
           << '\n';
    }
}

void write_neighbors_csv(std::ostream& os, const NeighborProbe& probe)
{
    os << "neighbor_id,fitness,q\n";
    for (const auto& s : probe.samples)
        os << s.id << ',' << format_double(s.fitness) << ',' << format_optional(s.q) << '\n';
}

std::string analyze_paths(const std::vector<StoredTrial>& trials, const fs::path& out_dir,
                          const AnalysisOptions& options)
{
    fs::create_directories(out_dir);
    std::ostringstream summary;
    for (const auto& t : trials) {
        if (!t.least_modular_fittest)
            continue;
        const auto sets = analysis_sets(t.config, t.seed, options);
        const FitnessEvaluator eval(t.config.schedule.gene_count(), t.config.fitness);
        Rng rng(derive_seed(derive_seed(t.seed, "paths"), options.seed));
        const auto lattice = removal_paths(*t.least_modular_fittest, t.config.effective_partition(),
                                           sets, eval, options.removal, rng);
        const std::string name = "lattice_" + file_safe(t.id) + ".csv";
        auto out = open_out(out_dir / name);
        write_lattice_csv(out, lattice);
        summary << t.id << ": " << lattice.inter_edges.size() << " inter-module edges, "
                << lattice.points.size() << " points -> " << name << '\n';
    }
    return summary.str();
}

std::string analyze_neighbors(const std::vector<StoredTrial>& trials, const fs::path& out_dir,
                              const AnalysisOptions& options)
{
    fs::create_directories(out_dir);
    auto summary_csv = open_out(out_dir / "neighbors_summary.csv");
    summary_csv << "trial_id,self_fitness,max_fitness,self_q,max_q\n";
    int plateau = 0;
    int total = 0;
    for (const auto& t : trials) {
        if (t.final_population.empty())
            continue;
        const auto best = static_cast<std::size_t>(
            std::max_element(t.final_fitness.begin(), t.final_fitness.end()) - t.final_fitness.begin());
        const auto sets = analysis_sets(t.config, t.seed, options);
        const FitnessEvaluator eval(t.config.schedule.gene_count(), t.config.fitness);
        Rng rng(derive_seed(derive_seed(t.seed, "neighbors"), options.seed));
        const auto probe = neighbor_probe(
            t.final_population[best], options.neighbor_count,
            options.mutation_rate.value_or(t.config.mutation_rate), sets, eval,
            t.config.effective_partition(), t.config.edge_collapse, rng);
        auto out = open_out(out_dir / ("neighbors_" + file_safe(t.id) + ".csv"));
        write_neighbors_csv(out, probe);
        summary_csv << t.id << ',' << format_double(probe.self_fitness) << ','
                    << format_double(probe.max_fitness) << ',' << format_optional(probe.self_q)
                    << ',' << format_optional(probe.max_q) << '\n';
        plateau += probe.max_fitness == probe.self_fitness;
        ++total;
    }
    std::ostringstream summary;
    summary << "best neighbor no fitter than original: " << plateau << " of " << total << '\n';
    return summary.str();
}

} // namespace grnmod
