#pragma once

// Deterministic simulation of the two deployment styles over a scenario.
//
// Federated: K silo clusters train on their own shard, exchanging weights
// through one shared storage account; the orchestrator averages the uploaded
// weights and writes the global model back. Centralized: every
// silo's raw data is copied to central storage, kept for the retention
// period and trained on by one central cluster.
//
// Event durations come from a work model, not from host timing: training
// on V GB for E epochs takes V * E / effective_throughput hours on a
// cluster, so traces are bit-reproducible and scale with the scenario's
// data volume while the toy trainer only touches a small synthetic set.

#include "flcarbon/learning.hpp"
#include "flcarbon/scenario.hpp"
#include "flcarbon/trace.hpp"

namespace flcarbon {

TraceLog run_federated(const Scenario& scenario, const SyntheticDataset& dataset);
TraceLog run_centralized(const Scenario& scenario, const SyntheticDataset& dataset);

inline TraceLog run_mode(Mode mode, const Scenario& scenario, const SyntheticDataset& dataset) {
    return mode == Mode::federated ? run_federated(scenario, dataset)
                                   : run_centralized(scenario, dataset);
}

// Closed-form byte totals the traces must reproduce.
std::int64_t expected_federated_transfer_bytes(const Scenario& scenario);
double expected_centralized_transfer_gb(const Scenario& scenario);

} // namespace flcarbon
