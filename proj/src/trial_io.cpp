#include "grnmod/trial_io.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace grnmod {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string format_optional(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string{};
}

std::string trace_line(const GenerationStats& row)
{
    std::string line = std::to_string(row.generation);
    line += ',' + std::to_string(row.active_targets);
    line += ',' + format_double(row.best_fitness);
    line += ',' + format_double(row.mean_fitness);
    line += ',' + format_optional(row.best_q);
    line += ',' + format_optional(row.mean_q);
    line += ',' + format_optional(row.fittest_q);
    return line;
}

TraceWriter::TraceWriter(const fs::path& path) : out_(open_out(path))
{
    out_ << kTraceHeader << '\n';
}

void TraceWriter::write(const GenerationStats& row)
{
    out_ << trace_line(row) << '\n';
    // Flush in batches so long runs can be inspected while they execute.
    if (++pending_ >= 100) {
        out_.flush();
        pending_ = 0;
    }
}

void TraceWriter::close()
{
    out_.flush();
    out_.close();
}

TrialOutcome run_trial_to_dir(const EvoConfig& cfg, std::uint64_t seed, const fs::path& dir,
                              const std::string& trial_id)
{
    cfg.validate();
    fs::create_directories(dir / "final_pop");

    {
        auto out = open_out(dir / "config.txt");
        write_config(out, cfg);
    }

    const int last = cfg.dominance_end < 0 ? cfg.max_generation
                                           : std::min(cfg.dominance_end, cfg.max_generation);
    const int first = std::min(cfg.dominance_start, last);
    DominanceTracker tracker(first, last);
    TraceWriter trace(dir / "trace.csv");

    EvoConfig run_cfg = cfg;
    run_cfg.keep_history = false;
    TrialRecord record = run_trial(run_cfg, seed, [&](int gen, std::span<const Individual> pop) {
        tracker.observe(gen, pop);
        trace.write(summarize_generation(gen, cfg.schedule.active_count(gen), pop));
    });
    trace.close();

    TrialOutcome outcome;
    outcome.seed = seed;
    outcome.final_row = record.rows.back();
    outcome.final_population = record.final_population;
    outcome.proportional_fallbacks = record.proportional_fallbacks;
    outcome.wall_seconds = record.wall_seconds;
    if (!tracker.empty())
        outcome.dominance = tracker.result();

    {
        auto summary = open_out(dir / "final_pop" / "summary.csv");
        summary << "index,fitness,q,edges\n";
        for (std::size_t k = 0; k < record.final_population.size(); ++k) {
            const auto& ind = record.final_population[k];
            save_genome((dir / "final_pop" / ("genome_" + std::to_string(k) + ".txt")).string(),
                        ind.genome);
            summary << k << ',' << format_double(ind.fitness) << ',' << format_optional(ind.q) << ','
                    << ind.genome.edge_count() << '\n';
        }
    }

    if (outcome.dominance) {
        auto out = open_out(dir / "dominance.csv");
        out << kDominanceHeader << '\n';
        const std::pair<const char*, const DominanceEntry*> roles[] = {
            {"fittest_of_most_modular", &outcome.dominance->fittest_of_most_modular},
            {"least_modular_of_fittest", &outcome.dominance->least_modular_of_fittest},
        };
        for (const auto& [role, entry] : roles) {
            const std::string file = std::string("dominance_") + role + ".txt";
            save_genome((dir / file).string(), entry->individual.genome);
            out << trial_id << ',' << role << ',' << format_double(entry->individual.fitness) << ','
                << format_optional(entry->individual.q) << ',' << file << '\n';
        }
    }

    json manifest;
    manifest["version"] = kVersion;
    manifest["trial_id"] = trial_id;
    manifest["seed"] = seed;
    json config = json::object();
    for (const auto& e : config_to_entries(cfg))
        config[e.key] = e.value;
    manifest["config"] = config;
    manifest["dominance_window"] = {first, last};
    manifest["proportional_fallbacks"] = record.proportional_fallbacks;
    manifest["generations"] = record.rows.size();
    {
        auto out = open_out(dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }
    return outcome;
}

StoredTrial load_trial(const fs::path& dir, const std::string& id)
{
    StoredTrial t;
    t.dir = dir;
    t.id = id;
    const json manifest = json::parse(read_file(dir / "manifest.json"));
    t.seed = manifest.at("seed").get<std::uint64_t>();
    ConfigEntries entries;
    for (const auto& [key, value] : manifest.at("config").items())
        entries.push_back({key, value.get<std::string>(), 0});
    t.config = config_from_entries(entries);

    if (fs::exists(dir / "dominance_fittest_of_most_modular.txt"))
        t.most_modular = load_genome((dir / "dominance_fittest_of_most_modular.txt").string());
    if (fs::exists(dir / "dominance_least_modular_of_fittest.txt"))
        t.least_modular_fittest =
            load_genome((dir / "dominance_least_modular_of_fittest.txt").string());

    const fs::path summary = dir / "final_pop" / "summary.csv";
    if (fs::exists(summary)) {
        std::istringstream in(read_file(summary));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            std::istringstream row(line);
            std::string index, fitness;
            std::getline(row, index, ',');
            std::getline(row, fitness, ',');
            t.final_population.push_back(
                load_genome((dir / "final_pop" / ("genome_" + index + ".txt")).string()));
            t.final_fitness.push_back(std::stod(fitness));
        }
    }
    return t;
}

std::vector<fs::path> find_trial_dirs(const fs::path& root)
{
    std::vector<fs::path> dirs;
    if (!fs::exists(root))
        return dirs;
    if (fs::exists(root / "manifest.json")) {
        dirs.push_back(root);
        return dirs;
    }
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().filename() == "manifest.json")
            dirs.push_back(entry.path().parent_path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

} // namespace grnmod
