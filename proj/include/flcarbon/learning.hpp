#pragma once

// Toy linear-regression workload used by the simulator: seeded synthetic
// data, IID partitioning, gradient descent on MSE and FedAvg.

#include "flcarbon/scenario.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace flcarbon {

// Deterministic sample stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the floating-point conversions below
// are written out so results do not depend on the standard library.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    // Standard normal via Box-Muller.
    double normal();
    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values; // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

struct Samples {
    Matrix features;
    std::vector<double> targets;

    std::size_t size() const { return targets.size(); }
    bool operator==(const Samples&) const = default;
};

struct SyntheticDataset {
    std::int64_t n_samples = 1;
    int n_features = 1;
    std::vector<double> true_weights;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
};

// Standard-normal features, targets = X w* + N(0, noise_std^2).
Samples generate_synthetic(const SyntheticDataset& spec);

// Workload used by the CLI and the bundled scenarios. True weights are
// drawn from the seed, so the whole dataset is a function of the seed.
SyntheticDataset default_synthetic(std::uint64_t seed);

// Held-out evaluation data drawn from the same distribution.
SyntheticDataset evaluation_split(const SyntheticDataset& train);

// Random disjoint assignment of samples to shards. Shard k gets
// round(share_k * n) samples and the last shard takes the remainder;
// samples keep their original relative order inside a shard.
std::vector<Samples> partition_iid(const Samples& samples, std::span<const double> shares,
                                   std::uint64_t seed);

Samples concatenate(std::span<const Samples> shards);

double mean_squared_error(const Samples& samples, std::span<const double> weights);

struct BatchConfig {
    BatchMode mode = BatchMode::full_batch;
    int batch_size = 0;
};

// Gradient descent on MSE. Full batch: w <- w - lr * (2/n) X^T (X w - y)
// once per epoch. Minibatch: the same update over consecutive batches.
// Throws SimulationError if the loss becomes non-finite.
std::vector<double> local_train(const Samples& shard, std::span<const double> start_weights,
                                int epochs, double learning_rate, BatchConfig batch = {});

// Sum_k (n_k / sum n) * w_k, elementwise.
std::vector<double> fedavg_aggregate(std::span<const std::vector<double>> weights,
                                     std::span<const std::size_t> shard_sizes);

} // namespace flcarbon
