// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the package wrapper, so both sides share one serialisation.

#include "flcarbon/accounting.hpp"
#include "flcarbon/cli.hpp"
#include "flcarbon/errors.hpp"
#include "flcarbon/fl_sim.hpp"
#include "flcarbon/registry.hpp"
#include "flcarbon/report_io.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace flcarbon;

namespace {

nlohmann::ordered_json request_json(const AccessRequest& r) {
    nlohmann::ordered_json out;
    out["id"] = r.id;
    out["owner"] = r.owner;
    out["description"] = r.description;
    out["dataset_ids"] = r.dataset_ids;
    out["state"] = to_string(r.state);
    out["duplicate_of"] = r.duplicate_of ? nlohmann::ordered_json(*r.duplicate_of) : nlohmann::ordered_json();
    out["assigned_tier"] =
        r.assigned_tier ? nlohmann::ordered_json(to_string(*r.assigned_tier)) : nlohmann::ordered_json();
    out["submitted_at"] = r.submitted_at;
    return out;
}

Scenario load(const std::string& path, const std::optional<double>& total_size_gb) {
    Scenario s = load_scenario_file(path);
    if (total_size_gb) {
        s.resize_dataset(*total_size_gb);
        s.validate();
    }
    return s;
}

SciOptions sci(std::optional<double> functional_units, double embodied_g) {
    return {functional_units, embodied_g};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Carbon accounting for federated vs centralized training";
    m.attr("__version__") = FLCARBON_VERSION;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
    py::register_exception<RegistryError>(m, "RegistryError", PyExc_RuntimeError);

    m.def(
        "compute_energy_kwh",
        [](int units, double tdp, double load, double hours) { return compute_energy_kwh({units, tdp, load, hours}); },
        py::arg("unit_count"), py::arg("tdp_watts"), py::arg("load_fraction"), py::arg("duration_hours"));
    m.def(
        "storage_energy_kwh",
        [](double tb, double hours, const std::string& medium) {
            return storage_energy_kwh(tb, hours, storage_medium_from_string(medium, "medium"), EmissionFactors{});
        },
        py::arg("size_tb"), py::arg("duration_hours"), py::arg("medium"));
    m.def("network_energy_kwh", &network_energy_kwh, py::arg("size_gb"), py::arg("coefficient_kwh_per_gb"));
    m.def(
        "memory_energy_kwh",
        [](double gb, double hours) { return memory_energy_kwh(gb, hours, EmissionFactors{}); }, py::arg("size_gb"),
        py::arg("duration_hours"));
    m.def("emissions_gco2e", &emissions_gco2e, py::arg("energy_kwh"), py::arg("pue"), py::arg("ci_g_per_kwh"));
    m.def(
        "sci_rate",
        [](double e, double i, double m_g, double r) { return sci_rate({e, i, m_g, r}); }, py::arg("energy_kwh"),
        py::arg("carbon_intensity"), py::arg("embodied_g") = 0.0, py::arg("functional_units") = 1.0);
    m.def("default_factors_text", [] { return serialize_factors(EmissionFactors{}); });
    m.def(
        "cluster_tier_for",
        [](double gb) {
            const ClusterTemplate t = cluster_tier_for(gb);
            return py::make_tuple(std::string(to_string(t.tier)), t.node_count);
        },
        py::arg("total_size_gb"));

    m.def(
        "canonical_scenario", [](const std::string& path) { return serialize_scenario(load_scenario_file(path)); },
        py::arg("path"));
    m.def(
        "estimate_json",
        [](const std::string& path, const std::string& mode, std::uint64_t seed, std::optional<double> size,
           std::optional<double> units, double embodied) {
            const Scenario s = load(path, size);
            py::gil_scoped_release release;
            const TraceLog trace = run_mode(mode_from_string(mode), s, default_synthetic(seed));
            nlohmann::ordered_json doc;
            doc["provenance"] = provenance_to_json(make_provenance(s, seed));
            doc["report"] = report_to_json(account(trace, s, sci(units, embodied)));
            doc["final_model"] = {{"weights", trace.final_model.weights},
                                  {"training_loss", trace.final_model.training_loss},
                                  {"eval_loss", trace.final_model.eval_loss}};
            return doc.dump();
        },
        py::arg("path"), py::arg("mode"), py::arg("seed"), py::arg("total_size_gb"), py::arg("functional_units"),
        py::arg("embodied_g"));
    m.def(
        "compare_json",
        [](const std::string& path, std::uint64_t seed, std::optional<double> size) {
            const Scenario s = load(path, size);
            py::gil_scoped_release release;
            const SyntheticDataset data = default_synthetic(seed);
            const ComparisonReport c =
                compare(account(run_federated(s, data), s), account(run_centralized(s, data), s));
            nlohmann::ordered_json doc;
            doc["provenance"] = provenance_to_json(make_provenance(s, seed));
            doc["comparison"] = comparison_to_json(c);
            return doc.dump();
        },
        py::arg("path"), py::arg("seed"), py::arg("total_size_gb"));
    m.def(
        "trace_jsonl",
        [](const std::string& path, const std::string& mode, std::uint64_t seed) {
            const Scenario s = load_scenario_file(path);
            return export_trace(run_mode(mode_from_string(mode), s, default_synthetic(seed)));
        },
        py::arg("path"), py::arg("mode"), py::arg("seed"));
    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "flcarbon");
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));

    m.def("text_similarity", [](const std::string& a, const std::string& b) { return text_similarity(a, b); },
          py::arg("a"), py::arg("b"));
    m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));

    py::class_<RequestStore>(m, "RequestStore")
        .def(py::init<>())
        .def_static("open", &RequestStore::open, py::arg("path"))
        .def_static("replay", [](const std::string& text) { return RequestStore::replay(text); }, py::arg("log_text"))
        .def(
            "submit",
            [](RequestStore& s, const std::string& d, const std::vector<std::string>& ids, const std::string& owner) {
                return request_json(s.submit(d, ids, owner)).dump();
            },
            py::arg("description"), py::arg("dataset_ids"), py::arg("owner"))
        .def(
            "approve", [](RequestStore& s, std::int64_t id, double gb) { return request_json(s.approve(id, gb)).dump(); },
            py::arg("id"), py::arg("total_size_gb"))
        .def("reject", [](RequestStore& s, std::int64_t id) { return request_json(s.reject(id)).dump(); },
             py::arg("id"))
        .def(
            "mark_duplicate",
            [](RequestStore& s, std::int64_t id, std::int64_t of_id) {
                const DuplicateResult r = s.mark_duplicate(id, of_id);
                return py::make_tuple(request_json(r.request).dump(), r.existing_owner);
            },
            py::arg("id"), py::arg("of_id"))
        .def("get", [](const RequestStore& s, std::int64_t id) { return request_json(s.get(id)).dump(); },
             py::arg("id"))
        .def(
            "check",
            [](const RequestStore& s, std::int64_t id, double threshold) {
                const auto history = s.requests();
                std::vector<std::pair<std::int64_t, double>> out;
                for (const Match& match : redundancy_check(s.get(id), history, threshold)) {
                    out.emplace_back(match.id, match.score);
                }
                return out;
            },
            py::arg("id"), py::arg("threshold") = kDefaultSimilarityThreshold)
        .def("ids",
             [](const RequestStore& s) {
                 std::vector<std::int64_t> ids;
                 for (const auto& r : s.requests()) ids.push_back(r.id);
                 return ids;
             })
        .def_property_readonly("log_text", &RequestStore::log_text)
        .def_property_readonly("clock", &RequestStore::clock)
        .def("__eq__", [](const RequestStore& a, const RequestStore& b) { return a == b; });
}
