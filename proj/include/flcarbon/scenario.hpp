#pragma once

// Declarative description of one federated-vs-centralized comparison and
// the scenario document format.

#include "flcarbon/emission_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flcarbon {

struct DatasetSpec {
    double total_size_gb = 0.0;
    // One fraction per silo, summing to 1.
    std::vector<double> silo_shares;
    // How many copies of the base dataset make up the target scale.
    int replication_factor_for_scale = 1;
    // Copy rate for moving raw silo data to the central store.
    double transfer_gb_per_hour = 50.0;

    bool operator==(const DatasetSpec&) const = default;
};

enum class Tier { small, medium, large };

std::string_view to_string(Tier tier);
Tier tier_from_string(std::string_view text);

struct ClusterTemplate {
    Tier tier = Tier::small;
    int node_count = 1;

    bool operator==(const ClusterTemplate&) const = default;
};

// Size-based cluster selection: <= 2 GB small (1 node), <= 20 GB medium
// (2 nodes), otherwise large (4 nodes).
ClusterTemplate cluster_tier_for(double total_size_gb);
ClusterTemplate smallest_tier();

struct ClusterSpec {
    std::string name;
    std::string provider;
    std::string region;
    int node_count = 1;
    // node_count is re-derived from the data volume the cluster trains on.
    bool auto_size = true;
    double cpu_tdp_watts = 0.0;
    int gpus_per_node = 0;
    double gpu_tdp_watts = 0.0;
    double memory_gb_per_node = 16.0;
    // Price per node-hour.
    double hourly_price = 0.0;
    StorageMedium storage_medium = StorageMedium::ssd;
    // Utilisation while training and while allocated but waiting.
    double cpu_load = 0.5;
    double gpu_load = 0.9;
    double idle_load = 0.2;
    // GB of training data one node processes per hour for one epoch.
    double throughput_gb_per_node_hour = 10.0;
    // Fraction of per-node throughput lost for every node beyond the first.
    double parallel_overhead = 0.1;

    // Throughput of the whole cluster: n / (1 + overhead * (n - 1)) nodes' worth.
    double effective_throughput_gb_per_hour() const;

    bool operator==(const ClusterSpec&) const = default;
};

struct SharedStorage {
    StorageMedium medium = StorageMedium::ssd;
    std::string region;
    std::string provider;
    double throughput_gb_per_hour = 100.0;

    bool operator==(const SharedStorage&) const = default;
};

enum class BatchMode { full_batch, minibatch };

struct TrainingPlan {
    int rounds = 10;
    int local_epochs = 1;
    std::int64_t model_param_count = 0;
    int bytes_per_param = 4;
    double learning_rate = 0.1;
    BatchMode batch_mode = BatchMode::full_batch;
    int batch_size = 0;
    std::uint64_t seed = 42;
    // Per-round job scheduling and synchronisation time, during which every
    // silo cluster stays allocated at idle load.
    double round_overhead_hours = 0.01;

    std::int64_t payload_bytes() const { return model_param_count * bytes_per_param; }
    double payload_gb() const { return static_cast<double>(payload_bytes()) / 1e9; }

    bool operator==(const TrainingPlan&) const = default;
};

struct Prices {
    double storage_per_gb_month = 0.0;
    double egress_per_gb = 0.0;

    bool operator==(const Prices&) const = default;
};

struct Scenario {
    DatasetSpec dataset;
    std::vector<ClusterSpec> silo_clusters;
    ClusterSpec central_cluster;
    ClusterSpec orchestrator_cluster;
    SharedStorage shared_storage;
    EmissionFactors factors;
    TrainingPlan plan;
    double retention_hours = 720.0;
    Prices prices;

    std::size_t silo_count() const { return silo_clusters.size(); }
    double silo_volume_gb(std::size_t silo) const;

    // Provider that owns a region id; every region belongs to exactly one.
    const std::string& provider_for_region(const std::string& region) const;

    // Sets node_count of every auto-sized cluster from its data volume:
    // silos by shard size, central by total size, orchestrator smallest.
    void resolve_tiers();

    // Changes the dataset scale and re-derives tiers.
    void resize_dataset(double total_size_gb);

    void validate() const;

    bool operator==(const Scenario&) const = default;
};

// `base_dir` resolves a factors file given by reference. When
// `defaults_applied` is set it receives the path of every defaulted field.
Scenario parse_scenario(std::string_view document, const std::string& base_dir = ".",
                        std::vector<std::string>* defaults_applied = nullptr);
Scenario load_scenario_file(const std::string& filename,
                            std::vector<std::string>* defaults_applied = nullptr);

// Canonical form: all fields explicit, factors inline.
std::string serialize_scenario(const Scenario& scenario);

} // namespace flcarbon
