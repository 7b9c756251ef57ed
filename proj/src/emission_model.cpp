#include "flcarbon/emission_model.hpp"

#include "flcarbon/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace flcarbon {

namespace {

void require_rate(double value, const std::string& path) {
    if (!std::isfinite(value)) {
        throw ValidationError(path, "must be finite");
    }
    if (value < 0.0) {
        throw ValidationError(path, "must be >= 0");
    }
}

double read_number(const nlohmann::json& value, const std::string& path) {
    if (!value.is_number()) {
        throw ValidationError(path, "expected a number");
    }
    return value.get<double>();
}

std::map<std::string, double> read_number_map(const nlohmann::json& value,
                                              const std::string& path) {
    if (!value.is_object()) {
        throw ValidationError(path, "expected an object");
    }
    std::map<std::string, double> out;
    for (const auto& [key, entry] : value.items()) {
        out[key] = read_number(entry, path + "." + key);
    }
    return out;
}

} // namespace

std::string_view to_string(StorageMedium medium) {
    return medium == StorageMedium::hdd ? "HDD" : "SSD";
}

StorageMedium storage_medium_from_string(std::string_view text, const std::string& path) {
    if (text == "HDD") return StorageMedium::hdd;
    if (text == "SSD") return StorageMedium::ssd;
    throw ValidationError(path, "storage medium must be HDD or SSD, got '" + std::string(text) + "'");
}

void EmissionFactors::validate() const {
    require_rate(storage_hdd_wh_per_tb_hour, "storage_hdd_wh_per_tb_hour");
    require_rate(storage_ssd_wh_per_tb_hour, "storage_ssd_wh_per_tb_hour");
    require_rate(network_kwh_per_gb_low, "network_kwh_per_gb_low");
    require_rate(network_kwh_per_gb_high, "network_kwh_per_gb_high");
    require_rate(memory_kwh_per_gb_hour, "memory_kwh_per_gb_hour");
    for (const auto& [provider, value] : pue_by_provider) {
        const std::string path = "pue_by_provider." + provider;
        if (!std::isfinite(value) || value < 1.0) {
            throw ValidationError(path, "PUE must be finite and >= 1.0");
        }
    }
    for (const auto& [region, value] : ci_by_region) {
        require_rate(value, "ci_by_region." + region);
    }
    if (redundancy_copies < 1) {
        throw ValidationError("redundancy_copies", "must be >= 1");
    }
}

double EmissionFactors::pue(const std::string& provider) const {
    auto it = pue_by_provider.find(provider);
    if (it == pue_by_provider.end()) {
        throw ValidationError("pue_by_provider", "no PUE for provider '" + provider + "'");
    }
    return it->second;
}

double EmissionFactors::carbon_intensity(const std::string& region) const {
    auto it = ci_by_region.find(region);
    if (it == ci_by_region.end()) {
        throw ValidationError("ci_by_region", "no carbon intensity for region '" + region + "'");
    }
    return it->second;
}

nlohmann::ordered_json factors_to_json(const EmissionFactors& factors) {
    nlohmann::ordered_json doc;
    doc["storage_hdd_wh_per_tb_hour"] = factors.storage_hdd_wh_per_tb_hour;
    doc["storage_ssd_wh_per_tb_hour"] = factors.storage_ssd_wh_per_tb_hour;
    doc["network_kwh_per_gb_low"] = factors.network_kwh_per_gb_low;
    doc["network_kwh_per_gb_high"] = factors.network_kwh_per_gb_high;
    doc["memory_kwh_per_gb_hour"] = factors.memory_kwh_per_gb_hour;
    doc["pue_by_provider"] = nlohmann::ordered_json::object();
    for (const auto& [provider, value] : factors.pue_by_provider) {
        doc["pue_by_provider"][provider] = value;
    }
    doc["ci_by_region"] = nlohmann::ordered_json::object();
    for (const auto& [region, value] : factors.ci_by_region) {
        doc["ci_by_region"][region] = value;
    }
    doc["redundancy_copies"] = factors.redundancy_copies;
    return doc;
}

EmissionFactors factors_from_json(const nlohmann::json& doc, const std::string& path) {
    const std::string prefix = path.empty() ? "" : path + ".";
    if (!doc.is_object()) {
        throw ValidationError(path, "factors must be an object");
    }
    EmissionFactors out;
    for (const auto& [key, value] : doc.items()) {
        const std::string field = prefix + key;
        if (key == "storage_hdd_wh_per_tb_hour") {
            out.storage_hdd_wh_per_tb_hour = read_number(value, field);
        } else if (key == "storage_ssd_wh_per_tb_hour") {
            out.storage_ssd_wh_per_tb_hour = read_number(value, field);
        } else if (key == "network_kwh_per_gb_low") {
            out.network_kwh_per_gb_low = read_number(value, field);
        } else if (key == "network_kwh_per_gb_high") {
            out.network_kwh_per_gb_high = read_number(value, field);
        } else if (key == "memory_kwh_per_gb_hour") {
            out.memory_kwh_per_gb_hour = read_number(value, field);
        } else if (key == "pue_by_provider") {
            out.pue_by_provider = read_number_map(value, field);
        } else if (key == "ci_by_region") {
            out.ci_by_region = read_number_map(value, field);
        } else if (key == "redundancy_copies") {
            if (!value.is_number_integer()) {
                throw ValidationError(field, "expected an integer");
            }
            out.redundancy_copies = value.get<int>();
        } else {
            throw ValidationError(field, "unknown key");
        }
    }
    try {
        out.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(prefix + e.path(), e.message());
    }
    return out;
}

std::string serialize_factors(const EmissionFactors& factors) {
    return factors_to_json(factors).dump(2) + "\n";
}

EmissionFactors parse_factors(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("", std::string("malformed factors document: ") + e.what());
    }
    return factors_from_json(doc);
}

EmissionFactors load_factors_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) {
        throw ValidationError(filename, "cannot open factors file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_factors(buffer.str());
}

void ComputeSpec::validate() const {
    if (unit_count < 1) throw ValidationError("unit_count", "must be >= 1");
    if (!std::isfinite(tdp_watts) || tdp_watts < 0.0) {
        throw ValidationError("tdp_watts", "must be finite and >= 0");
    }
    if (!(load_fraction >= 0.0 && load_fraction <= 1.0)) {
        throw ValidationError("load_fraction", "must lie in [0, 1]");
    }
    if (!std::isfinite(duration_hours) || duration_hours < 0.0) {
        throw ValidationError("duration_hours", "must be finite and >= 0");
    }
}

void SciInputs::validate() const {
    if (!std::isfinite(energy_kwh) || energy_kwh < 0.0) {
        throw ValidationError("energy_kwh", "must be finite and >= 0");
    }
    if (!std::isfinite(carbon_intensity_g_per_kwh) || carbon_intensity_g_per_kwh < 0.0) {
        throw ValidationError("carbon_intensity_g_per_kwh", "must be finite and >= 0");
    }
    if (!std::isfinite(embodied_g) || embodied_g < 0.0) {
        throw ValidationError("embodied_g", "must be finite and >= 0");
    }
    if (!std::isfinite(functional_units) || functional_units <= 0.0) {
        throw ValidationError("functional_units", "must be > 0");
    }
}

double compute_energy_kwh(const ComputeSpec& spec) {
    spec.validate();
    return spec.unit_count * spec.tdp_watts * spec.load_fraction * spec.duration_hours / kWhPerKwh;
}

double storage_energy_kwh(double size_tb, double duration_hours, StorageMedium medium,
                          const EmissionFactors& factors) {
    require_rate(size_tb, "size_tb");
    require_rate(duration_hours, "duration_hours");
    const double rate = medium == StorageMedium::hdd ? factors.storage_hdd_wh_per_tb_hour
                                                     : factors.storage_ssd_wh_per_tb_hour;
    return size_tb * duration_hours * rate / kWhPerKwh;
}

double network_energy_kwh(double size_gb, double coefficient_kwh_per_gb) {
    require_rate(size_gb, "size_gb");
    require_rate(coefficient_kwh_per_gb, "coefficient_kwh_per_gb");
    return size_gb * coefficient_kwh_per_gb;
}

double memory_energy_kwh(double size_gb, double duration_hours, const EmissionFactors& factors) {
    require_rate(size_gb, "size_gb");
    require_rate(duration_hours, "duration_hours");
    return size_gb * duration_hours * factors.memory_kwh_per_gb_hour;
}

double emissions_gco2e(double energy_kwh, double pue, double ci_g_per_kwh) {
    require_rate(energy_kwh, "energy_kwh");
    if (!std::isfinite(pue) || pue < 1.0) {
        throw ValidationError("pue", "must be finite and >= 1.0");
    }
    require_rate(ci_g_per_kwh, "ci_g_per_kwh");
    return energy_kwh * pue * ci_g_per_kwh;
}

double sci_rate(const SciInputs& inputs) {
    inputs.validate();
    return (inputs.energy_kwh * inputs.carbon_intensity_g_per_kwh + inputs.embodied_g) /
           inputs.functional_units;
}

} // namespace flcarbon
