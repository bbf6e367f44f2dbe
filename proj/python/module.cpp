#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "grnmod/experiment.hpp"

namespace py = pybind11;
using namespace grnmod;

namespace {

ConfigEntries entries_from_dict(const py::dict& d)
{
    ConfigEntries out;
    for (const auto& [k, v] : d) {
        std::string value = py::isinstance<py::str>(v) ? v.cast<std::string>()
                                                       : py::str(v).cast<std::string>();
        out.push_back({k.cast<std::string>(), value, 0});
    }
    return out;
}

py::dict config_dict(const EvoConfig& cfg)
{
    py::dict d;
    for (const auto& e : config_to_entries(cfg))
        d[py::str(e.key)] = e.value;
    return d;
}

py::dict stats_dict(const GenerationStats& s)
{
    py::dict d;
    d["generation"] = s.generation;
    d["active_targets"] = s.active_targets;
    d["best_fitness"] = s.best_fitness;
    d["mean_fitness"] = s.mean_fitness;
    d["best_q"] = s.best_q;
    d["mean_q"] = s.mean_q;
    d["fittest_q"] = s.fittest_q;
    return d;
}

} // namespace

PYBIND11_MODULE(grnmod, m)
{
    m.doc() = "Boolean gene regulatory network evolution and modularity";
    m.attr("__version__") = kVersion;

    py::class_<Pattern>(m, "Pattern")
        .def_static("parse", &Pattern::parse)
        .def_static("from_states", &Pattern::from_states)
        .def("__len__", &Pattern::size)
        .def("states", &Pattern::states)
        .def("__str__", &Pattern::str)
        .def("__repr__", [](const Pattern& p) { return "Pattern('" + p.str() + "')"; })
        .def("__eq__", [](const Pattern& a, const Pattern& b) { return a == b; });

    py::class_<Genome>(m, "Genome")
        .def(py::init<int>())
        .def_static("from_dense", &Genome::from_dense)
        .def_static("identity", &Genome::identity)
        .def_static("parse",
                    [](const std::string& text) {
                        std::istringstream in(text);
                        return read_genome(in);
                    })
        .def("__len__", &Genome::size)
        .def("get", &Genome::get, py::arg("regulator"), py::arg("target"))
        .def("set", &Genome::set, py::arg("regulator"), py::arg("target"), py::arg("value"))
        .def("dense", &Genome::dense)
        .def("edge_count", &Genome::edge_count)
        .def("__str__",
             [](const Genome& g) {
                 std::ostringstream out;
                 write_genome(out, g);
                 return out.str();
             })
        .def("__eq__", [](const Genome& a, const Genome& b) { return a == b; });

    m.def("step", &step);
    m.def(
        "find_attractor",
        [](const Genome& g, const Pattern& start, int max_steps) -> std::optional<Pattern> {
            auto a = find_attractor(g, start, max_steps);
            if (!a)
                return std::nullopt;
            return a->state;
        },
        py::arg("genome"), py::arg("start"), py::arg("max_steps") = 20,
        "Fixed point reached from start, or None.");
    m.def("hamming", &hamming);

    m.def(
        "fitness",
        [](const Genome& g, const Pattern& target, int samples, double rate, std::uint64_t seed) {
            Rng rng(seed);
            return fitness_single_target(g, sample_perturbations(target, samples, rate, rng));
        },
        py::arg("genome"), py::arg("target"), py::arg("samples") = 75, py::arg("rate") = 0.15,
        py::arg("seed") = 1);
    m.def(
        "exact_fitness",
        [](const Genome& g, const Pattern& target, double rate, int max_steps) {
            FitnessParams p;
            p.max_steps = max_steps;
            return exact_fitness_oracle(g, target, rate, p);
        },
        py::arg("genome"), py::arg("target"), py::arg("rate") = 0.15, py::arg("max_steps") = 20);
    m.def("fitness_ceiling", [] { return fitness_ceiling(); });

    py::class_<Partition>(m, "Partition")
        .def(py::init<std::vector<int>>())
        .def_static("parse", &Partition::parse)
        .def_static("single", &Partition::single)
        .def("module_of", &Partition::module_of)
        .def("assignment", &Partition::assignment)
        .def("__str__", &Partition::str)
        .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; });
    m.def(
        "derive_partition",
        [](const std::vector<Pattern>& targets) { return derive_partition(targets); },
        "Groups genes whose values change together across consecutive targets.");
    m.def(
        "q_score",
        [](const Genome& g, const Partition& p, bool multi) {
            return q_score(g, p, multi ? EdgeCollapse::Multi : EdgeCollapse::Union);
        },
        py::arg("genome"), py::arg("partition"), py::arg("multi") = false,
        "Newman modularity of the undirected graph, or None when it has no edges.");
    m.def("trim_inter_module", &trim_inter_module);

    m.def(
        "config",
        [](const py::dict& overrides) { return config_dict(config_from_entries(entries_from_dict(overrides))); },
        py::arg("overrides") = py::dict(), "Full validated configuration as a dict of strings.");

    m.def(
        "run_trial",
        [](const py::dict& overrides, std::optional<std::uint64_t> seed) {
            EvoConfig cfg = config_from_entries(entries_from_dict(overrides));
            TrialRecord record;
            {
                py::gil_scoped_release release;
                record = run_trial(cfg, seed.value_or(cfg.seed));
            }
            py::list rows;
            for (const auto& r : record.rows)
                rows.append(stats_dict(r));
            py::list genomes;
            py::list fitness;
            for (const auto& ind : record.final_population) {
                genomes.append(ind.genome);
                fitness.append(ind.fitness);
            }
            py::dict out;
            out["seed"] = record.seed;
            out["rows"] = rows;
            out["final_genomes"] = genomes;
            out["final_fitness"] = fitness;
            return out;
        },
        py::arg("overrides") = py::dict(), py::arg("seed") = py::none());

    m.def(
        "run_trial_to_dir",
        [](const py::dict& overrides, std::uint64_t seed, const std::filesystem::path& dir) {
            EvoConfig cfg = config_from_entries(entries_from_dict(overrides));
            py::gil_scoped_release release;
            return run_trial_to_dir(cfg, seed, dir, dir.filename().string()).final_row.best_fitness;
        },
        py::arg("overrides"), py::arg("seed"), py::arg("out"),
        "Writes trace.csv, manifest.json and final_pop/; returns final best fitness.");

    m.def(
        "wilcoxon",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& alternative) {
            if (a.size() != b.size())
                throw std::invalid_argument("samples differ in length");
            std::vector<std::pair<double, double>> pairs;
            for (std::size_t k = 0; k < a.size(); ++k)
                pairs.emplace_back(a[k], b[k]);
            const auto r = wilcoxon_signed_rank(pairs, parse_alternative(alternative));
            if (!r)
                return py::object(py::none());
            py::dict d;
            d["w"] = r->w;
            d["p_value"] = r->p_value;
            d["nonzero"] = r->nonzero;
            d["exact"] = r->exact;
            return py::object(d);
        },
        py::arg("a"), py::arg("b"), py::arg("alternative") = "two_sided",
        "Paired signed-rank test on a - b; None when every difference is zero.");

    m.def(
        "run_experiment",
        [](const std::string& spec_json, const std::filesystem::path& out, int workers) {
            std::istringstream in(spec_json);
            const ExperimentSpec spec = parse_experiment_spec(in);
            std::ostringstream csv;
            {
                py::gil_scoped_release release;
                const auto result = run_experiment(spec, out, workers);
                write_results_csv(csv, result.trials);
            }
            return csv.str();
        },
        py::arg("spec_json"), py::arg("out"), py::arg("workers") = 1,
        "Runs a JSON experiment spec; returns results.csv text.");

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
