#pragma once

// Helpers shared by the unit tests: scenario builders and tolerances.

#include "flcarbon/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace flcarbon::testing {

inline std::string scenario_path(const std::string& name) {
    return std::string(FLCARBON_SCENARIO_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline bool rel_close(double actual, double expected, double rel) {
    if (expected == 0.0) return std::abs(actual) <= rel;
    return std::abs(actual - expected) <= rel * std::abs(expected);
}

inline ClusterSpec gpu_cluster(const std::string& name, const std::string& region = "westeurope") {
    ClusterSpec c;
    c.name = name;
    c.provider = "Azure";
    c.region = region;
    c.cpu_tdp_watts = 135.0;
    c.gpus_per_node = 1;
    c.gpu_tdp_watts = 300.0;
    c.memory_gb_per_node = 112.0;
    c.hourly_price = 3.06;
    return c;
}

// K equal silos in one Azure region with CI 400, tiers resolved.
inline Scenario make_scenario(std::size_t silos, double total_gb = 12.0, int rounds = 2) {
    Scenario s;
    s.dataset.total_size_gb = total_gb;
    s.dataset.silo_shares.assign(silos, 1.0 / static_cast<double>(silos));
    for (std::size_t k = 0; k < silos; ++k) s.silo_clusters.push_back(gpu_cluster("silo-" + std::to_string(k)));
    s.central_cluster = gpu_cluster("central");
    s.orchestrator_cluster = gpu_cluster("orchestrator");
    s.orchestrator_cluster.gpus_per_node = 0;
    s.orchestrator_cluster.gpu_tdp_watts = 0.0;
    s.shared_storage = {StorageMedium::ssd, "westeurope", "Azure", 100.0};
    s.factors.ci_by_region = {{"westeurope", 400.0}};
    s.plan.rounds = rounds;
    s.plan.local_epochs = 1;
    s.plan.model_param_count = 1000000;
    s.prices = {0.15, 0.05};
    s.resolve_tiers();
    s.validate();
    return s;
}

} // namespace flcarbon::testing
