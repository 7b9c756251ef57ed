#pragma once

// Cloud energy and carbon coefficients plus the closed-form energy and
// emission formulas built on them.
//
// Units at every public boundary: energy in kWh, emissions in gCO2e, data
// volumes in decimal GB (1 TB = 1000 GB), durations in hours.

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace flcarbon {

inline constexpr double kGbPerTb = 1000.0;
inline constexpr double kWhPerKwh = 1000.0;

enum class StorageMedium { hdd, ssd };

std::string_view to_string(StorageMedium medium);
StorageMedium storage_medium_from_string(std::string_view text, const std::string& path = {});

struct EmissionFactors {
    double storage_hdd_wh_per_tb_hour = 0.65;
    double storage_ssd_wh_per_tb_hour = 1.2;
    // Inter-datacenter coefficient. Published as "kWh/Gb"; used here per GB.
    double network_kwh_per_gb_low = 0.001;
    // Average internet transmission intensity.
    double network_kwh_per_gb_high = 0.06;
    double memory_kwh_per_gb_hour = 0.000392;
    std::map<std::string, double> pue_by_provider = {
        {"AWS", 1.135}, {"GCP", 1.1}, {"Azure", 1.185}};
    // gCO2eq/kWh per region id. Configuration only, no built-in values.
    std::map<std::string, double> ci_by_region;
    // LRS and ZRS both keep three synchronous copies.
    int redundancy_copies = 3;

    // Throws ValidationError naming the first offending field.
    void validate() const;

    double pue(const std::string& provider) const;
    double carbon_intensity(const std::string& region) const;

    bool operator==(const EmissionFactors&) const = default;
};

// Factors document I/O. Field names are exactly the member names above;
// missing fields take the defaults, unknown fields are rejected.
nlohmann::ordered_json factors_to_json(const EmissionFactors& factors);
EmissionFactors factors_from_json(const nlohmann::json& doc, const std::string& path = {});
std::string serialize_factors(const EmissionFactors& factors);
EmissionFactors parse_factors(std::string_view text);
EmissionFactors load_factors_file(const std::string& filename);

struct ComputeSpec {
    int unit_count = 1;
    double tdp_watts = 0.0;
    double load_fraction = 0.0;
    double duration_hours = 0.0;

    void validate() const;
    bool operator==(const ComputeSpec&) const = default;
};

struct SciInputs {
    double energy_kwh = 0.0;
    double carbon_intensity_g_per_kwh = 0.0;
    double embodied_g = 0.0;
    double functional_units = 1.0;

    void validate() const;
};

/// N_c * TDP * load * T / 1000.
double compute_energy_kwh(const ComputeSpec& spec);

/// Energy of holding `size_tb` on one copy of `medium`. Redundancy is the
/// caller's concern: multiply by EmissionFactors::redundancy_copies.
double storage_energy_kwh(double size_tb, double duration_hours, StorageMedium medium,
                          const EmissionFactors& factors);

double network_energy_kwh(double size_gb, double coefficient_kwh_per_gb);

double memory_energy_kwh(double size_gb, double duration_hours, const EmissionFactors& factors);

/// energy * PUE * CI. Requires PUE >= 1.
double emissions_gco2e(double energy_kwh, double pue, double ci_g_per_kwh);

/// ((E * I) + M) / R.
double sci_rate(const SciInputs& inputs);

} // namespace flcarbon
