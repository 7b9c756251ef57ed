#include "flcarbon/learning.hpp"

#include "flcarbon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace flcarbon {

namespace {

constexpr std::int64_t kDefaultSamples = 1200;
constexpr int kDefaultFeatures = 10;
constexpr double kDefaultNoiseStd = 0.5;
constexpr std::uint64_t kWeightStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kEvalStream = 0xd1b54a32d192ed03ULL;

[[noreturn]] void diverged(double learning_rate) {
    std::ostringstream msg;
    msg << "local training diverged (non-finite loss) with learning_rate=" << learning_rate;
    throw SimulationError(msg.str());
}

// One gradient step over rows [begin, end). Returns the batch loss before the step.
double gradient_step(const Samples& data, std::size_t begin, std::size_t end,
                     std::vector<double>& weights, std::vector<double>& gradient,
                     double learning_rate) {
    const std::size_t d = weights.size();
    std::fill(gradient.begin(), gradient.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const auto x = data.features.row(i);
        double residual = -data.targets[i];
        for (std::size_t j = 0; j < d; ++j) residual += x[j] * weights[j];
        loss += residual * residual;
        for (std::size_t j = 0; j < d; ++j) gradient[j] += x[j] * residual;
    }
    const double n = static_cast<double>(end - begin);
    for (std::size_t j = 0; j < d; ++j) {
        weights[j] -= learning_rate * (2.0 / n) * gradient[j];
    }
    return loss / n;
}

} // namespace

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
    std::uint64_t x = engine_();
    while (x < limit) x = engine_();
    return x % bound;
}

Samples generate_synthetic(const SyntheticDataset& spec) {
    if (spec.n_samples < 1 || spec.n_features < 1) {
        throw ValidationError("synthetic", "n_samples and n_features must be >= 1");
    }
    if (spec.true_weights.size() != static_cast<std::size_t>(spec.n_features)) {
        throw ValidationError("synthetic.true_weights", "length must equal n_features");
    }
    const auto n = static_cast<std::size_t>(spec.n_samples);
    const auto d = static_cast<std::size_t>(spec.n_features);
    SeededRng rng(spec.seed);
    Samples out{Matrix(n, d), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        auto x = out.features.row(i);
        double y = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = rng.normal();
            y += x[j] * spec.true_weights[j];
        }
        const double noise = rng.normal();
        out.targets[i] = spec.noise_std == 0.0 ? y : y + spec.noise_std * noise;
    }
    return out;
}

SyntheticDataset default_synthetic(std::uint64_t seed) {
    SyntheticDataset spec;
    spec.n_samples = kDefaultSamples;
    spec.n_features = kDefaultFeatures;
    spec.noise_std = kDefaultNoiseStd;
    spec.seed = seed;
    SeededRng rng(seed ^ kWeightStream);
    for (int j = 0; j < spec.n_features; ++j) spec.true_weights.push_back(rng.normal());
    return spec;
}

SyntheticDataset evaluation_split(const SyntheticDataset& train) {
    SyntheticDataset eval = train;
    eval.n_samples = std::max<std::int64_t>(1, train.n_samples / 4);
    eval.seed = train.seed ^ kEvalStream;
    return eval;
}

std::vector<Samples> partition_iid(const Samples& samples, std::span<const double> shares,
                                   std::uint64_t seed) {
    const std::size_t n = samples.size();
    if (shares.empty()) throw ValidationError("shares", "at least one share is required");
    if (shares.size() > n) {
        throw ValidationError("shares", "more shares (" + std::to_string(shares.size()) +
                                            ") than samples (" + std::to_string(n) + ")");
    }
    std::vector<std::size_t> sizes;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k + 1 < shares.size(); ++k) {
        // Ties round to even, so 0.5 * 101 gives 50 and the last shard 51.
        const auto size = static_cast<std::size_t>(std::nearbyint(shares[k] * static_cast<double>(n)));
        if (assigned + size > n) throw ValidationError("shares", "shares exceed the sample count");
        sizes.push_back(size);
        assigned += size;
    }
    sizes.push_back(n - assigned);

    // Fisher-Yates over indices, then each shard takes a contiguous run of
    // the permutation and restores original order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SeededRng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }

    const std::size_t d = samples.features.cols;
    std::vector<Samples> shards;
    std::size_t offset = 0;
    for (const std::size_t size : sizes) {
        std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(offset),
                                     order.begin() + static_cast<std::ptrdiff_t>(offset + size));
        std::sort(idx.begin(), idx.end());
        Samples shard{Matrix(size, d), std::vector<double>(size)};
        for (std::size_t i = 0; i < size; ++i) {
            std::ranges::copy(samples.features.row(idx[i]), shard.features.row(i).begin());
            shard.targets[i] = samples.targets[idx[i]];
        }
        shards.push_back(std::move(shard));
        offset += size;
    }
    return shards;
}

Samples concatenate(std::span<const Samples> shards) {
    std::size_t n = 0;
    std::size_t d = shards.empty() ? 0 : shards.front().features.cols;
    for (const auto& s : shards) n += s.size();
    Samples out{Matrix(n, d), {}};
    out.targets.reserve(n);
    std::size_t row = 0;
    for (const auto& s : shards) {
        std::ranges::copy(s.features.values, out.features.values.begin() +
                                                 static_cast<std::ptrdiff_t>(row * d));
        out.targets.insert(out.targets.end(), s.targets.begin(), s.targets.end());
        row += s.size();
    }
    return out;
}

double mean_squared_error(const Samples& samples, std::span<const double> weights) {
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto x = samples.features.row(i);
        double residual = -samples.targets[i];
        for (std::size_t j = 0; j < weights.size(); ++j) residual += x[j] * weights[j];
        total += residual * residual;
    }
    return samples.size() == 0 ? 0.0 : total / static_cast<double>(samples.size());
}

std::vector<double> local_train(const Samples& shard, std::span<const double> start_weights,
                                int epochs, double learning_rate, BatchConfig batch) {
    if (shard.size() == 0) throw ValidationError("shard", "must be nonempty");
    if (start_weights.size() != shard.features.cols) {
        throw ValidationError("start_weights", "length must equal the feature count");
    }
    if (epochs < 0) throw ValidationError("epochs", "must be >= 0");
    std::vector<double> weights(start_weights.begin(), start_weights.end());
    std::vector<double> gradient(weights.size());
    const std::size_t n = shard.size();
    const std::size_t step = batch.mode == BatchMode::full_batch
                                 ? n
                                 : static_cast<std::size_t>(std::max(1, batch.batch_size));
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t begin = 0; begin < n; begin += step) {
            const double loss =
                gradient_step(shard, begin, std::min(n, begin + step), weights, gradient, learning_rate);
            if (!std::isfinite(loss)) diverged(learning_rate);
        }
    }
    for (const double w : weights) {
        if (!std::isfinite(w)) diverged(learning_rate);
    }
    if (epochs > 0 && !std::isfinite(mean_squared_error(shard, weights))) diverged(learning_rate);
    return weights;
}

std::vector<double> fedavg_aggregate(std::span<const std::vector<double>> weights,
                                     std::span<const std::size_t> shard_sizes) {
    if (weights.empty()) throw ValidationError("weights", "at least one client is required");
    if (weights.size() != shard_sizes.size()) {
        throw ValidationError("shard_sizes", "length mismatch: " + std::to_string(weights.size()) +
                                                 " weight vectors, " +
                                                 std::to_string(shard_sizes.size()) + " sizes");
    }
    const std::size_t d = weights.front().size();
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (shard_sizes[k] == 0) throw ValidationError("shard_sizes", "sizes must be > 0");
        if (weights[k].size() != d) throw ValidationError("weights", "vectors differ in length");
        total += static_cast<double>(shard_sizes[k]);
    }
    std::vector<double> out(d, 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double share = static_cast<double>(shard_sizes[k]) / total;
        for (std::size_t j = 0; j < d; ++j) out[j] += share * weights[k][j];
    }
    return out;
}

} // namespace flcarbon
