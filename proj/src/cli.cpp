#include "flcarbon/cli.hpp"

#include "flcarbon/accounting.hpp"
#include "flcarbon/errors.hpp"
#include "flcarbon/fl_sim.hpp"
#include "flcarbon/registry.hpp"
#include "flcarbon/report_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace flcarbon {

namespace {

using nlohmann::ordered_json;

struct RunConfig {
    std::vector<std::string> scenarios;
    std::string mode = "federated";
    std::uint64_t seed = 42;
    std::string factors;
    std::string format = "table";
    std::string out;
    std::vector<std::string> scales;
    std::optional<double> functional_units;
    double embodied_g = 0.0;
};

struct RegistryArgs {
    std::string log = "registry.log";
    std::string description;
    std::vector<std::string> datasets;
    std::string owner;
    std::int64_t id = 0;
    std::int64_t of_id = 0;
    double size_gb = 0.0;
    double threshold = kDefaultSimilarityThreshold;
    std::string format = "table";
};

Scenario load_with_overrides(const std::string& path, const RunConfig& cfg) {
    Scenario scenario = load_scenario_file(path);
    if (!cfg.factors.empty()) {
        scenario.factors = load_factors_file(cfg.factors);
        scenario.validate();
    }
    return scenario;
}

SciOptions sci_of(const RunConfig& cfg) { return {cfg.functional_units, cfg.embodied_g}; }

ComparisonReport run_comparison(const Scenario& scenario, const RunConfig& cfg) {
    const SyntheticDataset data = default_synthetic(cfg.seed);
    const EmissionReport fl = account(run_federated(scenario, data), scenario, sci_of(cfg));
    const EmissionReport cl = account(run_centralized(scenario, data), scenario, sci_of(cfg));
    return compare(fl, cl);
}

void emit(const std::string& text, const RunConfig& cfg, std::ostream& out) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw ValidationError("--out", "cannot write " + cfg.out);
    file << text;
}

std::string structured_text(const ordered_json& doc) { return doc.dump(2) + "\n"; }

void cmd_estimate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.scenarios.size() != 1) throw ValidationError("--scenario", "estimate takes exactly one scenario");
    const Scenario scenario = load_with_overrides(cfg.scenarios.front(), cfg);
    const Mode mode = mode_from_string(cfg.mode);
    const SyntheticDataset data = default_synthetic(cfg.seed);
    const EmissionReport report = account(run_mode(mode, scenario, data), scenario, sci_of(cfg));

    ordered_json doc;
    doc["provenance"] = provenance_to_json(make_provenance(scenario, cfg.seed));
    doc["report"] = report_to_json(report);
    if (cfg.format == "csv") {
        emit(csv_header(false) + report_csv_rows(report), cfg, out);
    } else if (cfg.format == "structured") {
        emit(structured_text(doc), cfg, out);
    } else {
        emit(render_table(doc), cfg, out);
    }
}

void cmd_compare(const RunConfig& cfg, std::ostream& out) {
    if (cfg.scenarios.size() != 1) throw ValidationError("--scenario", "compare takes exactly one scenario");
    const Scenario scenario = load_with_overrides(cfg.scenarios.front(), cfg);
    const ComparisonReport comparison = run_comparison(scenario, cfg);

    ordered_json doc;
    doc["provenance"] = provenance_to_json(make_provenance(scenario, cfg.seed));
    doc["comparison"] = comparison_to_json(comparison);
    if (cfg.format == "csv") {
        emit(csv_header(false) + report_csv_rows(comparison.federated) +
                 report_csv_rows(comparison.centralized),
             cfg, out);
    } else if (cfg.format == "structured") {
        emit(structured_text(doc), cfg, out);
    } else {
        emit(render_table(doc), cfg, out);
    }
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    if (cfg.scenarios.empty()) throw ValidationError("--scenario", "sweep needs a base scenario");

    // Either one base scenario resized to each named scale, or one point per
    // scenario file when no scales are given.
    std::vector<std::pair<std::string, Scenario>> points;
    if (!cfg.scales.empty()) {
        if (cfg.scenarios.size() != 1) {
            throw ValidationError("--scenario", "--scales takes exactly one base scenario");
        }
        const Scenario base = load_with_overrides(cfg.scenarios.front(), cfg);
        for (const auto& name : cfg.scales) {
            Scenario point = base;
            point.resize_dataset(scale_size_gb(name));
            point.validate();
            points.emplace_back(name, std::move(point));
        }
    } else {
        for (const auto& path : cfg.scenarios) {
            points.emplace_back(std::filesystem::path(path).stem().string(),
                                load_with_overrides(path, cfg));
        }
    }

    ordered_json doc;
    doc["provenance"] = provenance_to_json(make_provenance(points.front().second, cfg.seed));
    doc["sweep"] = ordered_json::array();
    std::string csv = csv_header(true);
    for (const auto& [name, scenario] : points) {
        const ComparisonReport comparison = run_comparison(scenario, cfg);
        ordered_json entry;
        entry["scale"] = name;
        entry["total_size_gb"] = scenario.dataset.total_size_gb;
        entry["scenario_digest"] = sha256_digest(serialize_scenario(scenario));
        entry["comparison"] = comparison_to_json(comparison);
        doc["sweep"].push_back(std::move(entry));
        csv += report_csv_rows(comparison.federated, name);
        csv += report_csv_rows(comparison.centralized, name);
    }
    if (cfg.format == "csv") {
        emit(csv, cfg, out);
    } else if (cfg.format == "structured") {
        emit(structured_text(doc), cfg, out);
    } else {
        emit(render_table(doc), cfg, out);
    }
}

ordered_json request_to_json(const AccessRequest& r) {
    ordered_json out;
    out["id"] = r.id;
    out["owner"] = r.owner;
    out["description"] = r.description;
    out["dataset_ids"] = r.dataset_ids;
    out["state"] = to_string(r.state);
    out["duplicate_of"] = r.duplicate_of ? ordered_json(*r.duplicate_of) : ordered_json();
    out["assigned_tier"] = r.assigned_tier ? ordered_json(to_string(*r.assigned_tier)) : ordered_json();
    out["submitted_at"] = r.submitted_at;
    return out;
}

void print_request(const AccessRequest& r, const std::string& format, std::ostream& out) {
    if (format == "structured") {
        out << request_to_json(r).dump() << "\n";
        return;
    }
    out << r.id << "\t" << to_string(r.state);
    if (r.duplicate_of) out << "(" << *r.duplicate_of << ")";
    out << "\t" << (r.assigned_tier ? std::string(to_string(*r.assigned_tier)) : "-") << "\t"
        << r.owner << "\t" << r.description << "\n";
}

void cmd_registry(const std::string& sub, const RegistryArgs& a, std::ostream& out) {
    RequestStore store = RequestStore::open(a.log);
    if (sub == "submit") {
        print_request(store.submit(a.description, a.datasets, a.owner), a.format, out);
    } else if (sub == "approve") {
        print_request(store.approve(a.id, a.size_gb), a.format, out);
    } else if (sub == "reject") {
        print_request(store.reject(a.id), a.format, out);
    } else if (sub == "duplicate") {
        const DuplicateResult result = store.mark_duplicate(a.id, a.of_id);
        print_request(result.request, a.format, out);
        out << "existing owner: " << result.existing_owner << "\n";
    } else if (sub == "check") {
        const auto history = store.requests();
        const auto matches = redundancy_check(store.get(a.id), history, a.threshold);
        if (a.format == "structured") {
            ordered_json doc = ordered_json::array();
            for (const auto& m : matches) {
                doc.push_back({{"id", m.id}, {"score", m.score}, {"owner", store.get(m.id).owner}});
            }
            out << doc.dump() << "\n";
        } else if (matches.empty()) {
            out << "no matches\n";
        } else {
            for (const auto& m : matches) {
                out << m.id << "\t" << std::setprecision(6) << m.score << "\t" << store.get(m.id).owner
                    << "\n";
            }
        }
    } else if (sub == "list") {
        for (const auto& r : store.requests()) print_request(r, a.format, out);
    }
}

} // namespace

double scale_size_gb(const std::string& name) {
    if (name == "small") return 1.2;
    if (name == "medium") return 12.0;
    if (name == "large") return 120.0;
    throw ValidationError("--scales", "unknown scale '" + name + "' (expected small, medium or large)");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Carbon and cost estimates for cross-silo federated vs centralized learning",
                 "flcarbon"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FLCARBON_VERSION);

    RunConfig cfg;
    const std::vector<std::string> formats = {"table", "csv", "structured"};
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", cfg.scenarios, "Scenario file")->required();
        cmd->add_option("--seed", cfg.seed, "Seed of the synthetic workload")->default_val(42);
        cmd->add_option("--factors", cfg.factors, "Emission factors file overriding the scenario's");
        cmd->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember(formats))
            ->default_val("table");
        cmd->add_option("--out", cfg.out, "Write the report to this file");
        cmd->add_option("--functional-units", cfg.functional_units,
                        "Functional units R for a per-unit carbon intensity");
        cmd->add_option("--embodied-g", cfg.embodied_g, "Embodied emissions M in gCO2e")
            ->check(CLI::NonNegativeNumber);
    };

    CLI::App* estimate = app.add_subcommand("estimate", "Simulate one deployment style and report");
    add_common(estimate);
    estimate->add_option("--mode", cfg.mode, "Deployment style")
        ->check(CLI::IsMember({"federated", "centralized"}))
        ->default_val("federated");

    CLI::App* compare_cmd = app.add_subcommand("compare", "Run both styles on one scenario");
    add_common(compare_cmd);

    CLI::App* sweep = app.add_subcommand("sweep", "Compare both styles across dataset scales");
    add_common(sweep);
    sweep->add_option("--scales", cfg.scales, "Comma-separated scales: small, medium, large")
        ->delimiter(',');

    RegistryArgs reg;
    CLI::App* registry = app.add_subcommand("registry", "Data-access request workflow");
    registry->require_subcommand(1);
    registry->add_option("--log", reg.log, "Append-only registry log")->default_val("registry.log");
    registry->add_option("--format", reg.format, "Output format")
        ->check(CLI::IsMember({"table", "structured"}))
        ->default_val("table");
    CLI::App* submit = registry->add_subcommand("submit", "Submit a use case");
    submit->add_option("--description", reg.description, "Use-case description")->required();
    submit->add_option("--datasets", reg.datasets, "Dataset ids")->delimiter(',');
    submit->add_option("--owner", reg.owner, "Application owner")->required();
    CLI::App* check = registry->add_subcommand("check", "Find approved requests similar to one");
    check->add_option("--id", reg.id, "Request id")->required();
    check->add_option("--threshold", reg.threshold, "Similarity threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->default_val(kDefaultSimilarityThreshold);
    CLI::App* approve = registry->add_subcommand("approve", "Approve and assign a cluster tier");
    approve->add_option("--id", reg.id, "Request id")->required();
    approve->add_option("--size-gb", reg.size_gb, "Total size of the requested data")->required();
    CLI::App* reject = registry->add_subcommand("reject", "Reject a pending request");
    reject->add_option("--id", reg.id, "Request id")->required();
    CLI::App* duplicate = registry->add_subcommand("duplicate", "Mark a request as a duplicate");
    duplicate->add_option("--id", reg.id, "Request id")->required();
    duplicate->add_option("--of", reg.of_id, "Approved request it duplicates")->required();
    registry->add_subcommand("list", "List requests in id order");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    if (!argv.empty()) argv.pop_back(); // program name
    try {
        app.parse(argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitValidation;
    }

    try {
        if (estimate->parsed()) {
            cmd_estimate(cfg, out);
        } else if (compare_cmd->parsed()) {
            cmd_compare(cfg, out);
        } else if (sweep->parsed()) {
            cmd_sweep(cfg, out);
        } else if (registry->parsed()) {
            for (const auto* sub : registry->get_subcommands()) {
                cmd_registry(sub->get_name(), reg, out);
            }
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SimulationError& e) {
        err << "simulation failed: " << e.what() << "\n";
        return kExitSimulation;
    } catch (const RegistryError& e) {
        err << "registry error: " << e.what() << "\n";
        return kExitRegistry;
    }
    return kExitOk;
}

} // namespace flcarbon
