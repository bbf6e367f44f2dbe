#include "grnmod/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace grnmod {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string join_problems(const std::vector<std::string>& problems)
{
    std::string out = "invalid configuration:";
    for (const auto& p : problems)
        out += "\n  " + p;
    return out;
}

std::vector<std::string> split_list(const std::string& value, char sep = ',')
{
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(value);
    while (std::getline(in, token, sep))
        parts.push_back(trim(token));
    return parts;
}

long long parse_int(const std::string& v)
{
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("expected an integer, got '" + v + "'");
    return out;
}

int parse_int32(const std::string& v)
{
    const long long x = parse_int(v);
    if (x < INT32_MIN || x > INT32_MAX)
        throw std::invalid_argument("integer out of range: '" + v + "'");
    return static_cast<int>(x);
}

double parse_real(const std::string& v)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("expected a number, got '" + v + "'");
    return out;
}

template <class Enum>
Enum parse_enum(const std::string& v, std::initializer_list<std::pair<const char*, Enum>> names)
{
    std::string lower = v;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& [name, value] : names)
        if (lower == name)
            return value;
    std::string allowed;
    for (const auto& [name, value] : names)
        allowed += (allowed.empty() ? "" : "|") + std::string(name);
    throw std::invalid_argument("expected one of " + allowed + ", got '" + v + "'");
}

using Setter = std::function<void(EvoConfig&, const std::string&)>;

// Schedule keys are collected separately and combined at the end.
struct PendingSchedule
{
    std::vector<Pattern> targets;
    std::vector<int> generations;
    bool have_targets = false;
    bool have_generations = false;
};

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"population_size", [](EvoConfig& c, const std::string& v) { c.population_size = parse_int32(v); }},
        {"mutation_rate", [](EvoConfig& c, const std::string& v) { c.mutation_rate = parse_real(v); }},
        {"reproduction_rate", [](EvoConfig& c, const std::string& v) { c.reproduction_rate = parse_real(v); }},
        {"elite_size", [](EvoConfig& c, const std::string& v) { c.elite_size = parse_int32(v); }},
        {"selection_type",
         [](EvoConfig& c, const std::string& v) {
             c.selection.type = parse_enum<SelectionType>(
                 v, {{"proportional", SelectionType::Proportional},
                     {"tournament", SelectionType::Tournament}});
         }},
        {"tournament_size", [](EvoConfig& c, const std::string& v) { c.selection.tournament_size = parse_int32(v); }},
        {"crossover_type",
         [](EvoConfig& c, const std::string& v) {
             c.crossover = parse_enum<CrossoverType>(v, {{"none", CrossoverType::None},
                                                         {"horizontal", CrossoverType::Horizontal},
                                                         {"diagonal", CrossoverType::Diagonal}});
         }},
        {"edge_size", [](EvoConfig& c, const std::string& v) { c.edge_size = parse_int32(v); }},
        {"perturbation_count", [](EvoConfig& c, const std::string& v) { c.perturbation_count = parse_int32(v); }},
        {"static_perturbation_count",
         [](EvoConfig& c, const std::string& v) { c.static_perturbation_count = parse_int32(v); }},
        {"perturbation_rate", [](EvoConfig& c, const std::string& v) { c.perturbation_rate = parse_real(v); }},
        {"fitness_mode",
         [](EvoConfig& c, const std::string& v) {
             c.fitness_mode = parse_enum<FitnessMode>(
                 v, {{"dynamic", FitnessMode::Dynamic}, {"static", FitnessMode::Static}});
         }},
        {"max_generation", [](EvoConfig& c, const std::string& v) { c.max_generation = parse_int32(v); }},
        {"seed",
         [](EvoConfig& c, const std::string& v) {
             const long long s = parse_int(v);
             if (s < 0)
                 throw std::invalid_argument("seed must be non-negative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"partition",
         [](EvoConfig& c, const std::string& v) {
             if (trim(v).empty() || v == "auto")
                 c.partition.reset();
             else
                 c.partition = Partition::parse(v);
         }},
        {"max_steps", [](EvoConfig& c, const std::string& v) { c.fitness.max_steps = parse_int32(v); }},
        {"trajectory_exponent",
         [](EvoConfig& c, const std::string& v) { c.fitness.trajectory_exponent = parse_int32(v); }},
        {"fitness_scale", [](EvoConfig& c, const std::string& v) { c.fitness.scale = parse_real(v); }},
        {"edge_collapse",
         [](EvoConfig& c, const std::string& v) {
             c.edge_collapse = parse_enum<EdgeCollapse>(
                 v, {{"union", EdgeCollapse::Union}, {"multi", EdgeCollapse::Multi}});
         }},
        {"init_mode",
         [](EvoConfig& c, const std::string& v) {
             c.init_mode =
                 parse_enum<InitMode>(v, {{"random", InitMode::Random}, {"founder", InitMode::Founder}});
         }},
        {"dominance_start", [](EvoConfig& c, const std::string& v) { c.dominance_start = parse_int32(v); }},
        {"dominance_end", [](EvoConfig& c, const std::string& v) { c.dominance_end = parse_int32(v); }},
    };
    return table;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems))
{
}

ConfigEntries read_config_entries(std::istream& is)
{
    ConfigEntries entries;
    std::vector<std::string> problems;
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                               line + "'");
            continue;
        }
        ConfigEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (e.key.empty()) {
            problems.push_back("line " + std::to_string(line_no) + ": missing key");
            continue;
        }
        entries.push_back(std::move(e));
    }
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    return entries;
}

ConfigEntries load_config_entries(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({"cannot open config file " + path});
    return read_config_entries(in);
}

ConfigEntries merge_entries(const ConfigEntries& base, const ConfigEntries& overrides)
{
    ConfigEntries out = base;
    for (const auto& o : overrides) {
        auto it = std::find_if(out.begin(), out.end(), [&](const ConfigEntry& e) { return e.key == o.key; });
        if (it != out.end())
            *it = o;
        else
            out.push_back(o);
    }
    return out;
}

EvoConfig config_from_entries(const ConfigEntries& entries)
{
    EvoConfig cfg;
    PendingSchedule schedule;
    std::vector<std::string> problems;
    auto where = [](const ConfigEntry& e) {
        return e.line > 0 ? "line " + std::to_string(e.line) + ": " : std::string{};
    };

    for (const auto& e : entries) {
        try {
            if (e.key == "targets") {
                schedule.targets.clear();
                for (const auto& t : split_list(e.value))
                    schedule.targets.push_back(Pattern::parse(t));
                schedule.have_targets = true;
            } else if (e.key == "target_generations") {
                schedule.generations.clear();
                for (const auto& g : split_list(e.value))
                    schedule.generations.push_back(parse_int32(g));
                schedule.have_generations = true;
            } else if (const auto it = setters().find(e.key); it != setters().end()) {
                it->second(cfg, e.value);
            } else {
                problems.push_back(where(e) + "unknown key '" + e.key + "'");
            }
        } catch (const std::exception& ex) {
            problems.push_back(where(e) + e.key + ": " + ex.what());
        }
    }

    if (schedule.have_targets || schedule.have_generations) {
        try {
            if (!schedule.have_targets)
                throw std::invalid_argument("target_generations given without targets");
            if (!schedule.have_generations) {
                if (schedule.targets.size() != 1)
                    throw std::invalid_argument("target_generations is required with several targets");
                schedule.generations = {0};
            }
            if (schedule.targets.size() != schedule.generations.size())
                throw std::invalid_argument("targets and target_generations differ in length");
            std::vector<TargetSchedule::Stage> stages;
            for (std::size_t k = 0; k < schedule.targets.size(); ++k)
                stages.push_back({schedule.generations[k], schedule.targets[k]});
            cfg.schedule = TargetSchedule(std::move(stages));
        } catch (const std::exception& ex) {
            problems.push_back(std::string("targets: ") + ex.what());
        }
    }

    if (problems.empty()) {
        try {
            cfg.validate();
        } catch (const std::exception& ex) {
            problems.push_back(ex.what());
        }
    }
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    return cfg;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string to_string(SelectionType t)
{
    return t == SelectionType::Proportional ? "proportional" : "tournament";
}

std::string to_string(CrossoverType t)
{
    switch (t) {
    case CrossoverType::None: return "none";
    case CrossoverType::Horizontal: return "horizontal";
    case CrossoverType::Diagonal: return "diagonal";
    }
    return "?";
}

std::string to_string(FitnessMode m)
{
    return m == FitnessMode::Dynamic ? "dynamic" : "static";
}

std::string to_string(EdgeCollapse c)
{
    return c == EdgeCollapse::Union ? "union" : "multi";
}

std::string to_string(InitMode m)
{
    return m == InitMode::Random ? "random" : "founder";
}

ConfigEntries config_to_entries(const EvoConfig& cfg)
{
    std::string targets, generations;
    for (const auto& s : cfg.schedule.stages()) {
        targets += (targets.empty() ? "" : ",") + s.target.str();
        generations += (generations.empty() ? "" : ",") + std::to_string(s.generation);
    }
    const auto i = [](long long v) { return std::to_string(v); };
    return {
        {"population_size", i(cfg.population_size)},
        {"mutation_rate", format_double(cfg.mutation_rate)},
        {"reproduction_rate", format_double(cfg.reproduction_rate)},
        {"elite_size", i(cfg.elite_size)},
        {"selection_type", to_string(cfg.selection.type)},
        {"tournament_size", i(cfg.selection.tournament_size)},
        {"crossover_type", to_string(cfg.crossover)},
        {"edge_size", i(cfg.edge_size)},
        {"perturbation_count", i(cfg.perturbation_count)},
        {"static_perturbation_count", i(cfg.static_perturbation_count)},
        {"perturbation_rate", format_double(cfg.perturbation_rate)},
        {"fitness_mode", to_string(cfg.fitness_mode)},
        {"max_generation", i(cfg.max_generation)},
        {"seed", std::to_string(cfg.seed)},
        {"targets", targets},
        {"target_generations", generations},
        {"partition", cfg.partition ? cfg.partition->str() : "auto"},
        {"max_steps", i(cfg.fitness.max_steps)},
        {"trajectory_exponent", i(cfg.fitness.trajectory_exponent)},
        {"fitness_scale", format_double(cfg.fitness.scale)},
        {"edge_collapse", to_string(cfg.edge_collapse)},
        {"init_mode", to_string(cfg.init_mode)},
        {"dominance_start", i(cfg.dominance_start)},
        {"dominance_end", i(cfg.dominance_end)},
    };
}

void write_config(std::ostream& os, const EvoConfig& cfg)
{
    for (const auto& e : config_to_entries(cfg))
        os << e.key << " = " << e.value << '\n';
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& e : config_to_entries(EvoConfig{}))
            out.push_back(e.key);
        return out;
    }();
    return keys;
}

} // namespace grnmod
