#include "flcarbon/report_io.hpp"

#include <array>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace flcarbon {

namespace {

using nlohmann::ordered_json;

// Shortest round-trip decimal, the same text the JSON writer produces.
std::string number_text(double value) { return ordered_json(value).dump(); }

std::array<double, 6> category_energy(const EmissionReport& r) {
    const auto& e = r.energy_kwh;
    return {e.cpu, e.gpu, e.memory, e.network, e.transfer, e.storage};
}

std::array<double, 6> category_emissions(const EmissionReport& r) {
    const auto& g = r.emissions_g;
    return {g.c_cpu, g.c_gpu, g.c_memory, g.c_network, g.c_transfer, g.c_storage};
}

std::string cell(const ordered_json& value) {
    if (value.is_null()) return "-";
    if (value.is_string()) return value.get<std::string>();
    return value.dump();
}

void render_report(std::ostringstream& out, const ordered_json& report) {
    out << "mode: " << cell(report["mode"]) << "\n";
    out << std::left << std::setw(12) << "category" << std::right << std::setw(24) << "energy_kwh"
        << std::setw(24) << "emissions_g" << "\n";
    const auto& energy = report["energy_kwh"];
    const auto& emissions = report["emissions_g"];
    static const std::array<std::pair<const char*, const char*>, 6> rows = {{
        {"cpu", "c_cpu"},
        {"gpu", "c_gpu"},
        {"memory", "c_memory"},
        {"network", "c_network"},
        {"transfer", "c_transfer"},
        {"storage", "c_storage"},
    }};
    for (const auto& [energy_key, emission_key] : rows) {
        out << std::left << std::setw(12) << emission_key << std::right << std::setw(24)
            << cell(energy[energy_key]) << std::setw(24) << cell(emissions[emission_key]) << "\n";
    }
    out << std::left << std::setw(12) << "total" << std::right << std::setw(24)
        << cell(energy["total"]) << std::setw(24) << cell(report["c_total_g"]) << "\n";
    out << "c_train_g: " << cell(report["c_train_g"]) << "\n";
    out << "c_total_g: " << cell(report["c_total_g"]) << "\n";
    const auto& cost = report["cost"];
    out << "cost: compute " << cell(cost["compute"]) << ", storage " << cell(cost["storage"])
        << ", egress " << cell(cost["egress"]) << ", total " << cell(cost["total"]) << "\n";
    out << "wall_clock_hours: " << cell(report["wall_clock_hours"]) << "\n";
    out << "sci_g_per_unit: " << cell(report["sci_g_per_unit"]) << "\n";
}

void render_comparison(std::ostringstream& out, const ordered_json& comparison) {
    out << std::left << std::setw(18) << "category" << std::right << std::setw(24) << "federated"
        << std::setw(24) << "centralized" << std::setw(24) << "ratio_cl_fl" << "\n";
    for (const auto& row : comparison["categories"]) {
        out << std::left << std::setw(18) << cell(row["category"]) << std::right << std::setw(24)
            << cell(row["federated"]) << std::setw(24) << cell(row["centralized"]) << std::setw(24)
            << cell(row["ratio"]) << "\n";
    }
    out << "cl_total_exceeds_fl: " << cell(comparison["cl_total_exceeds_fl"]) << "\n";
    out << "fl_train_exceeds_cl_train: " << cell(comparison["fl_train_exceeds_cl_train"]) << "\n";
}

} // namespace

std::string sha256_digest(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int length = 0;
    EVP_Digest(bytes.data(), bytes.size(), md.data(), &length, EVP_sha256(), nullptr);
    std::ostringstream out;
    out << "sha256:" << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < length; ++i) out << std::setw(2) << static_cast<int>(md[i]);
    return out.str();
}

Provenance make_provenance(const Scenario& scenario, std::uint64_t seed) {
    return {FLCARBON_VERSION, sha256_digest(serialize_scenario(scenario)), seed,
            sha256_digest(serialize_factors(scenario.factors))};
}

ordered_json provenance_to_json(const Provenance& p) {
    ordered_json out;
    out["tool"] = "flcarbon";
    out["tool_version"] = p.tool_version;
    out["scenario_digest"] = p.scenario_digest;
    out["seed"] = p.seed;
    out["factors_digest"] = p.factors_digest;
    return out;
}

ordered_json report_to_json(const EmissionReport& r) {
    ordered_json out;
    out["mode"] = to_string(r.mode);
    auto& energy = out["energy_kwh"];
    energy["cpu"] = r.energy_kwh.cpu;
    energy["gpu"] = r.energy_kwh.gpu;
    energy["memory"] = r.energy_kwh.memory;
    energy["network"] = r.energy_kwh.network;
    energy["transfer"] = r.energy_kwh.transfer;
    energy["storage"] = r.energy_kwh.storage;
    energy["total"] = r.energy_kwh.total;
    auto& emissions = out["emissions_g"];
    emissions["c_cpu"] = r.emissions_g.c_cpu;
    emissions["c_gpu"] = r.emissions_g.c_gpu;
    emissions["c_memory"] = r.emissions_g.c_memory;
    emissions["c_network"] = r.emissions_g.c_network;
    emissions["c_transfer"] = r.emissions_g.c_transfer;
    emissions["c_storage"] = r.emissions_g.c_storage;
    out["c_train_g"] = r.c_train_g;
    out["c_total_g"] = r.c_total_g;
    auto& cost = out["cost"];
    cost["compute"] = r.cost.compute;
    cost["storage"] = r.cost.storage;
    cost["egress"] = r.cost.egress;
    cost["total"] = r.cost.total;
    out["wall_clock_hours"] = r.wall_clock_hours;
    out["sci_g_per_unit"] = r.sci_g_per_unit ? ordered_json(*r.sci_g_per_unit) : ordered_json();
    return out;
}

ordered_json comparison_to_json(const ComparisonReport& c) {
    ordered_json out;
    out["federated"] = report_to_json(c.federated);
    out["centralized"] = report_to_json(c.centralized);
    out["categories"] = ordered_json::array();
    for (const auto& row : c.categories) {
        ordered_json entry;
        entry["category"] = row.category;
        entry["federated"] = row.federated;
        entry["centralized"] = row.centralized;
        entry["delta"] = row.delta;
        entry["ratio"] = row.ratio ? ordered_json(*row.ratio) : ordered_json();
        out["categories"].push_back(std::move(entry));
    }
    out["cl_total_exceeds_fl"] = c.cl_total_exceeds_fl;
    out["fl_train_exceeds_cl_train"] = c.fl_train_exceeds_cl_train;
    return out;
}

const std::vector<std::string>& emission_categories() {
    static const std::vector<std::string> names = {"c_cpu",      "c_gpu",      "c_memory",
                                                   "c_network", "c_transfer", "c_storage"};
    return names;
}

std::string csv_header(bool with_scale) {
    return std::string(with_scale ? "scale," : "") + "mode,category,energy_kwh,emissions_g\n";
}

std::string report_csv_rows(const EmissionReport& report, const std::string& scale) {
    const auto energy = category_energy(report);
    const auto emissions = category_emissions(report);
    std::string out;
    for (std::size_t i = 0; i < energy.size(); ++i) {
        if (!scale.empty()) out += scale + ",";
        out += std::string(to_string(report.mode)) + "," + emission_categories()[i] + "," +
               number_text(energy[i]) + "," + number_text(emissions[i]) + "\n";
    }
    return out;
}

std::string render_table(const ordered_json& document) {
    std::ostringstream out;
    if (document.contains("provenance")) {
        const auto& p = document["provenance"];
        out << "# " << cell(p["tool"]) << " " << cell(p["tool_version"]) << " seed="
            << cell(p["seed"]) << "\n# scenario " << cell(p["scenario_digest"]) << "\n# factors "
            << cell(p["factors_digest"]) << "\n";
    }
    if (document.contains("report")) {
        render_report(out, document["report"]);
    }
    if (document.contains("comparison")) {
        const auto& comparison = document["comparison"];
        render_report(out, comparison["federated"]);
        out << "\n";
        render_report(out, comparison["centralized"]);
        out << "\n";
        render_comparison(out, comparison);
    }
    if (document.contains("sweep")) {
        for (const auto& point : document["sweep"]) {
            out << "\n== scale " << cell(point["scale"]) << " (" << cell(point["total_size_gb"])
                << " GB) ==\n";
            render_comparison(out, point["comparison"]);
        }
    }
    return out.str();
}

} // namespace flcarbon
