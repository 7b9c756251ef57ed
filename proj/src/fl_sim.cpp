#include "flcarbon/fl_sim.hpp"

#include "flcarbon/errors.hpp"

#include <algorithm>

namespace flcarbon {

namespace {

// Data resident in cluster memory while training, capped by what the
// cluster can hold.
double resident_gb(const ClusterSpec& cluster, double data_gb, double payload_gb) {
    return std::min(data_gb, cluster.node_count * cluster.memory_gb_per_node) + payload_gb;
}

class EventSink {
public:
    void compute(Actor actor, const ClusterSpec& c, double start, double hours, double cpu_load,
                 double gpu_load) {
        if (hours <= 0.0) return;
        events_.push_back(
            {actor, start, hours,
             ComputePayload{ComputeUnit::cpu, {c.node_count, c.cpu_tdp_watts, cpu_load, hours}}});
        if (c.gpus_per_node > 0) {
            events_.push_back({actor, start, hours,
                               ComputePayload{ComputeUnit::gpu,
                                              {c.node_count * c.gpus_per_node, c.gpu_tdp_watts,
                                               gpu_load, hours}}});
        }
    }

    void memory(Actor actor, double start, double hours, double gb) {
        if (hours <= 0.0) return;
        events_.push_back({actor, start, hours, MemoryPayload{gb}});
    }

    void transfer(Actor actor, double start, double hours, TransferPayload payload) {
        events_.push_back({actor, start, hours, std::move(payload)});
    }

    void storage(Actor actor, double start, double hours, StoragePayload payload) {
        events_.push_back({actor, start, hours, std::move(payload)});
    }

    std::vector<UsageEvent> take() {
        sort_events(events_);
        return std::move(events_);
    }

private:
    std::vector<UsageEvent> events_;
};

TransferPayload weight_transfer(const Scenario& s, const std::string& src, const std::string& dst) {
    return {s.plan.payload_gb(), src, dst, CoefficientClass::intra_cloud, s.plan.payload_bytes()};
}

BatchConfig batch_of(const TrainingPlan& plan) { return {plan.batch_mode, plan.batch_size}; }

void check_runnable(const Scenario& scenario) {
    scenario.validate();
    if (scenario.dataset.silo_shares.empty()) {
        throw ValidationError("dataset.silo_shares", "must list at least one silo");
    }
}

} // namespace

std::int64_t expected_federated_transfer_bytes(const Scenario& scenario) {
    const auto k = static_cast<std::int64_t>(scenario.silo_count());
    return scenario.plan.rounds * (2 * k + 2) * scenario.plan.payload_bytes();
}

double expected_centralized_transfer_gb(const Scenario& scenario) {
    double total = 0.0;
    for (std::size_t k = 0; k < scenario.silo_count(); ++k) total += scenario.silo_volume_gb(k);
    return total;
}

TraceLog run_federated(const Scenario& scenario, const SyntheticDataset& dataset) {
    check_runnable(scenario);
    const TrainingPlan& plan = scenario.plan;
    const SharedStorage& store = scenario.shared_storage;
    const ClusterSpec& orch = scenario.orchestrator_cluster;
    const std::size_t silos = scenario.silo_count();

    const Samples samples = generate_synthetic(dataset);
    const Samples eval = generate_synthetic(evaluation_split(dataset));
    const std::vector<Samples> shards = partition_iid(samples, scenario.dataset.silo_shares, plan.seed);
    std::vector<std::size_t> shard_sizes;
    for (const auto& shard : shards) shard_sizes.push_back(shard.size());

    const double exchange_hours = plan.payload_gb() / store.throughput_gb_per_hour;
    // FedAvg touches every uploaded weight once.
    const double aggregate_hours = static_cast<double>(silos) * plan.payload_gb() /
                                   orch.effective_throughput_gb_per_hour();

    EventSink sink;
    std::vector<double> global(static_cast<std::size_t>(dataset.n_features), 0.0);
    double round_start = 0.0;
    for (int round = 0; round < plan.rounds; ++round) {
        std::vector<std::vector<double>> local(silos);
        double uploads_done = round_start;
        for (std::size_t k = 0; k < silos; ++k) {
            const ClusterSpec& c = scenario.silo_clusters[k];
            const Actor actor = Actor::silo_at(static_cast<int>(k));
            double t = round_start;

            sink.compute(actor, c, t, plan.round_overhead_hours, c.idle_load, c.idle_load);
            t += plan.round_overhead_hours;

            sink.transfer(actor, t, exchange_hours, weight_transfer(scenario, store.region, c.region));
            t += exchange_hours;

            local[k] = local_train(shards[k], global, plan.local_epochs, plan.learning_rate,
                                   batch_of(plan));
            const double volume = scenario.silo_volume_gb(k);
            const double train_hours =
                volume * plan.local_epochs / c.effective_throughput_gb_per_hour();
            sink.compute(actor, c, t, train_hours, c.cpu_load, c.gpu_load);
            sink.memory(actor, t, train_hours, resident_gb(c, volume, plan.payload_gb()));
            t += train_hours;

            sink.transfer(actor, t, exchange_hours, weight_transfer(scenario, c.region, store.region));
            t += exchange_hours;
            uploads_done = std::max(uploads_done, t);
        }

        const Actor orchestrator = Actor::orchestrator();
        double t = uploads_done;
        sink.transfer(orchestrator, t, exchange_hours, weight_transfer(scenario, store.region, orch.region));
        t += exchange_hours;
        global = fedavg_aggregate(local, shard_sizes);
        sink.compute(orchestrator, orch, t, aggregate_hours, orch.cpu_load, orch.gpu_load);
        t += aggregate_hours;
        sink.transfer(orchestrator, t, exchange_hours, weight_transfer(scenario, orch.region, store.region));
        t += exchange_hours;
        round_start = t;
    }

    if (round_start > 0.0) {
        // K local blobs plus the global model live in shared storage for the run.
        const double blob_gb = static_cast<double>(silos + 1) * plan.payload_gb();
        sink.storage(Actor::orchestrator(), 0.0, round_start,
                     {blob_gb, store.medium, true, store.region});
    }

    TraceLog trace;
    trace.mode = Mode::federated;
    trace.events = sink.take();
    trace.wall_clock_hours = wall_clock_of(trace.events);
    trace.final_model.weights = global;
    trace.final_model.training_loss = mean_squared_error(samples, global);
    trace.final_model.eval_loss = mean_squared_error(eval, global);
    return trace;
}

TraceLog run_centralized(const Scenario& scenario, const SyntheticDataset& dataset) {
    check_runnable(scenario);
    const TrainingPlan& plan = scenario.plan;
    const ClusterSpec& central = scenario.central_cluster;
    const std::size_t silos = scenario.silo_count();

    const Samples samples = generate_synthetic(dataset);
    const Samples eval = generate_synthetic(evaluation_split(dataset));
    const std::vector<Samples> shards = partition_iid(samples, scenario.dataset.silo_shares, plan.seed);
    const Samples pooled = concatenate(shards);

    EventSink sink;
    // Raw data copies run in parallel from every silo over the internet.
    double landed = 0.0;
    for (std::size_t k = 0; k < silos; ++k) {
        const double gb = scenario.silo_volume_gb(k);
        const double hours = gb / scenario.dataset.transfer_gb_per_hour;
        sink.transfer(Actor::silo_at(static_cast<int>(k)), 0.0, hours,
                      {gb, scenario.silo_clusters[k].region, central.region,
                       CoefficientClass::internet, std::llround(gb * 1e9)});
        landed = std::max(landed, hours);
    }
    sink.storage(Actor::central(), landed, scenario.retention_hours,
                 {expected_centralized_transfer_gb(scenario), central.storage_medium, true,
                  central.region});

    const int epochs = plan.rounds * plan.local_epochs;
    std::vector<double> weights(static_cast<std::size_t>(dataset.n_features), 0.0);
    double t = landed;
    if (epochs > 0) {
        // One training job: a single scheduling overhead.
        sink.compute(Actor::central(), central, t, plan.round_overhead_hours, central.idle_load,
                     central.idle_load);
        t += plan.round_overhead_hours;
        weights = local_train(pooled, weights, epochs, plan.learning_rate, batch_of(plan));
        const double volume = scenario.dataset.total_size_gb;
        const double train_hours = volume * epochs / central.effective_throughput_gb_per_hour();
        sink.compute(Actor::central(), central, t, train_hours, central.cpu_load, central.gpu_load);
        sink.memory(Actor::central(), t, train_hours,
                    resident_gb(central, volume, plan.payload_gb()));
    }

    TraceLog trace;
    trace.mode = Mode::centralized;
    trace.events = sink.take();
    trace.wall_clock_hours = wall_clock_of(trace.events);
    trace.final_model.weights = weights;
    trace.final_model.training_loss = mean_squared_error(pooled, weights);
    trace.final_model.eval_loss = mean_squared_error(eval, weights);
    return trace;
}

} // namespace flcarbon
