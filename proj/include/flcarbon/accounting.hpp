#pragma once

// Folds a trace through the emission model into a categorised report.
//
//   C_train = C_CPU + C_GPU + C_memory + C_network
//   C_total = C_train + C_transfer + C_storage
//
// Weight exchange between silos and shared storage (intra_cloud transfers)
// is communication overhead of training and lands in C_network. Raw-data
// movement (internet transfers) is the extra lifecycle cost of pooling data
// and lands in C_transfer.

#include "flcarbon/scenario.hpp"
#include "flcarbon/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flcarbon {

// Billing month used to prorate GB-month storage prices.
inline constexpr double kHoursPerMonth = 730.0;

struct EnergyBreakdown {
    double cpu = 0.0;
    double gpu = 0.0;
    double memory = 0.0;
    double network = 0.0;
    double transfer = 0.0;
    double storage = 0.0;
    double total = 0.0;

    bool operator==(const EnergyBreakdown&) const = default;
};

struct EmissionBreakdown {
    double c_cpu = 0.0;
    double c_gpu = 0.0;
    double c_memory = 0.0;
    double c_network = 0.0;
    double c_transfer = 0.0;
    double c_storage = 0.0;

    bool operator==(const EmissionBreakdown&) const = default;
};

struct CostBreakdown {
    double compute = 0.0;
    double storage = 0.0;
    double egress = 0.0;
    double total = 0.0;

    bool operator==(const CostBreakdown&) const = default;
};

struct EmissionReport {
    Mode mode = Mode::federated;
    EnergyBreakdown energy_kwh;
    EmissionBreakdown emissions_g;
    double c_train_g = 0.0;
    double c_total_g = 0.0;
    CostBreakdown cost;
    double wall_clock_hours = 0.0;
    // (C_total + M) / R, present when functional units were given.
    std::optional<double> sci_g_per_unit;

    bool operator==(const EmissionReport&) const = default;
};

struct SciOptions {
    std::optional<double> functional_units;
    double embodied_g = 0.0;
};

// Throws ValidationError for actors or regions the scenario cannot resolve.
EmissionReport account(const TraceLog& trace, const Scenario& scenario, const SciOptions& sci = {});

struct CategoryDelta {
    std::string category;
    double federated = 0.0;
    double centralized = 0.0;
    // centralized - federated
    double delta = 0.0;
    // centralized / federated; 1 when both are zero, empty when only the
    // federated value is zero.
    std::optional<double> ratio;
};

struct ComparisonReport {
    EmissionReport federated;
    EmissionReport centralized;
    std::vector<CategoryDelta> categories;
    bool cl_total_exceeds_fl = false;
    bool fl_train_exceeds_cl_train = false;
};

ComparisonReport compare(const EmissionReport& fl, const EmissionReport& cl);

} // namespace flcarbon
