#include "flcarbon/scenario.hpp"

#include "flcarbon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace flcarbon {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kShareTolerance = 1e-9;
constexpr double kSmallTierMaxGb = 2.0;
constexpr double kMediumTierMaxGb = 20.0;

// Reads fields of one JSON object, remembering which keys were consumed so
// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& doc, std::string path, std::vector<std::string>* defaults)
        : doc_(doc), path_(std::move(path)), defaults_(defaults) {
        if (!doc_.is_object()) {
            throw ValidationError(path_, "expected an object");
        }
    }

    std::string child(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return doc_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        auto it = doc_.find(key);
        if (it == doc_.end()) {
            throw ValidationError(child(key), "missing required key");
        }
        return *it;
    }

    double number(const std::string& key) {
        const json& value = raw(key);
        if (!value.is_number()) throw ValidationError(child(key), "expected a number");
        const double out = value.get<double>();
        if (!std::isfinite(out)) throw ValidationError(child(key), "must be finite");
        return out;
    }

    double number_or(const std::string& key, double fallback) {
        if (!has(key)) {
            note_default(key);
            return fallback;
        }
        return number(key);
    }

    std::int64_t integer(const std::string& key) {
        const json& value = raw(key);
        if (!value.is_number_integer()) throw ValidationError(child(key), "expected an integer");
        return value.get<std::int64_t>();
    }

    std::int64_t integer_or(const std::string& key, std::int64_t fallback) {
        if (!has(key)) {
            note_default(key);
            return fallback;
        }
        return integer(key);
    }

    std::string text(const std::string& key) {
        const json& value = raw(key);
        if (!value.is_string()) throw ValidationError(child(key), "expected a string");
        return value.get<std::string>();
    }

    std::string text_or(const std::string& key, const std::string& fallback) {
        if (!has(key)) {
            note_default(key);
            return fallback;
        }
        return text(key);
    }

    void finish() const {
        for (const auto& [key, value] : doc_.items()) {
            if (!seen_.contains(key)) {
                throw ValidationError(child(key), "unknown key");
            }
        }
    }

    void note_default(const std::string& key) {
        seen_.insert(key);
        if (defaults_ != nullptr) defaults_->push_back(child(key));
    }

private:
    const json& doc_;
    std::string path_;
    std::vector<std::string>* defaults_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ValidationError(path, message);
}

DatasetSpec read_dataset(const json& doc, std::vector<std::string>* defaults) {
    ObjectReader r(doc, "dataset", defaults);
    DatasetSpec out;
    out.total_size_gb = r.number("total_size_gb");
    const json& shares = r.raw("silo_shares");
    if (!shares.is_array()) throw ValidationError("dataset.silo_shares", "expected an array");
    for (std::size_t i = 0; i < shares.size(); ++i) {
        if (!shares[i].is_number()) {
            throw ValidationError("dataset.silo_shares[" + std::to_string(i) + "]",
                                  "expected a number");
        }
        out.silo_shares.push_back(shares[i].get<double>());
    }
    out.replication_factor_for_scale =
        static_cast<int>(r.integer_or("replication_factor_for_scale", 1));
    out.transfer_gb_per_hour = r.number_or("transfer_gb_per_hour", out.transfer_gb_per_hour);
    r.finish();
    return out;
}

ClusterSpec read_cluster(const json& doc, const std::string& path,
                         std::vector<std::string>* defaults) {
    ObjectReader r(doc, path, defaults);
    ClusterSpec out;
    out.name = r.text("name");
    out.provider = r.text("provider");
    out.region = r.text("region");
    if (!r.has("node_count")) {
        r.note_default("node_count");
        out.auto_size = true;
    } else if (const json& nodes = r.raw("node_count"); nodes.is_string()) {
        require(nodes.get<std::string>() == "auto", r.child("node_count"),
                "expected an integer or \"auto\"");
        out.auto_size = true;
    } else {
        out.auto_size = false;
        out.node_count = static_cast<int>(r.integer("node_count"));
    }
    out.cpu_tdp_watts = r.number_or("cpu_tdp_watts", out.cpu_tdp_watts);
    out.gpus_per_node = static_cast<int>(r.integer_or("gpus_per_node", out.gpus_per_node));
    out.gpu_tdp_watts = r.number_or("gpu_tdp_watts", out.gpu_tdp_watts);
    out.memory_gb_per_node = r.number_or("memory_gb_per_node", out.memory_gb_per_node);
    out.hourly_price = r.number_or("hourly_price", out.hourly_price);
    out.storage_medium = storage_medium_from_string(
        r.text_or("storage_medium", std::string(to_string(out.storage_medium))),
        r.child("storage_medium"));
    out.cpu_load = r.number_or("cpu_load", out.cpu_load);
    out.gpu_load = r.number_or("gpu_load", out.gpu_load);
    out.idle_load = r.number_or("idle_load", out.idle_load);
    out.throughput_gb_per_node_hour =
        r.number_or("throughput_gb_per_node_hour", out.throughput_gb_per_node_hour);
    out.parallel_overhead = r.number_or("parallel_overhead", out.parallel_overhead);
    r.finish();
    return out;
}

SharedStorage read_shared_storage(const json& doc, std::vector<std::string>* defaults) {
    ObjectReader r(doc, "shared_storage", defaults);
    SharedStorage out;
    out.medium = storage_medium_from_string(r.text_or("medium", "SSD"), "shared_storage.medium");
    out.region = r.text("region");
    out.provider = r.text("provider");
    out.throughput_gb_per_hour = r.number_or("throughput_gb_per_hour", out.throughput_gb_per_hour);
    r.finish();
    return out;
}

TrainingPlan read_plan(const json& doc, std::vector<std::string>* defaults) {
    ObjectReader r(doc, "plan", defaults);
    TrainingPlan out;
    out.rounds = static_cast<int>(r.integer_or("rounds", out.rounds));
    out.local_epochs = static_cast<int>(r.integer_or("local_epochs", out.local_epochs));
    out.model_param_count = r.integer("model_param_count");
    out.bytes_per_param = static_cast<int>(r.integer_or("bytes_per_param", out.bytes_per_param));
    out.learning_rate = r.number_or("learning_rate", out.learning_rate);
    const std::string mode = r.text_or("batch_mode", "full_batch");
    if (mode == "full_batch") {
        out.batch_mode = BatchMode::full_batch;
        out.batch_size = static_cast<int>(r.integer_or("batch_size", 0));
    } else if (mode == "minibatch") {
        out.batch_mode = BatchMode::minibatch;
        out.batch_size = static_cast<int>(r.integer("batch_size"));
    } else {
        throw ValidationError("plan.batch_mode", "must be full_batch or minibatch");
    }
    if (r.has("seed")) {
        const json& seed = r.raw("seed");
        if (!seed.is_number_unsigned()) throw ValidationError("plan.seed", "expected a non-negative integer");
        out.seed = seed.get<std::uint64_t>();
    } else {
        r.note_default("seed");
    }
    out.round_overhead_hours = r.number_or("round_overhead_hours", out.round_overhead_hours);
    r.finish();
    return out;
}

Prices read_prices(const json& doc, std::vector<std::string>* defaults) {
    ObjectReader r(doc, "prices", defaults);
    Prices out;
    out.storage_per_gb_month = r.number_or("storage_per_gb_month", 0.0);
    out.egress_per_gb = r.number_or("egress_per_gb", 0.0);
    r.finish();
    return out;
}

void validate_cluster(const ClusterSpec& c, const std::string& path) {
    require(!c.name.empty(), path + ".name", "must be nonempty");
    require(c.node_count >= 1, path + ".node_count", "must be >= 1");
    require(c.cpu_tdp_watts >= 0.0, path + ".cpu_tdp_watts", "must be >= 0");
    require(c.gpus_per_node >= 0, path + ".gpus_per_node", "must be >= 0");
    require(c.gpu_tdp_watts >= 0.0, path + ".gpu_tdp_watts", "must be >= 0");
    require(c.memory_gb_per_node >= 0.0, path + ".memory_gb_per_node", "must be >= 0");
    require(c.hourly_price >= 0.0, path + ".hourly_price", "must be >= 0");
    for (auto [value, field] : {std::pair{c.cpu_load, "cpu_load"}, std::pair{c.gpu_load, "gpu_load"},
                                std::pair{c.idle_load, "idle_load"}}) {
        require(value >= 0.0 && value <= 1.0, path + "." + field, "must lie in [0, 1]");
    }
    require(c.throughput_gb_per_node_hour > 0.0, path + ".throughput_gb_per_node_hour",
            "must be > 0");
    require(c.parallel_overhead >= 0.0, path + ".parallel_overhead", "must be >= 0");
}

ordered_json cluster_to_json(const ClusterSpec& c) {
    ordered_json doc;
    doc["name"] = c.name;
    doc["provider"] = c.provider;
    doc["region"] = c.region;
    if (c.auto_size) {
        doc["node_count"] = "auto";
    } else {
        doc["node_count"] = c.node_count;
    }
    doc["cpu_tdp_watts"] = c.cpu_tdp_watts;
    doc["gpus_per_node"] = c.gpus_per_node;
    doc["gpu_tdp_watts"] = c.gpu_tdp_watts;
    doc["memory_gb_per_node"] = c.memory_gb_per_node;
    doc["hourly_price"] = c.hourly_price;
    doc["storage_medium"] = to_string(c.storage_medium);
    doc["cpu_load"] = c.cpu_load;
    doc["gpu_load"] = c.gpu_load;
    doc["idle_load"] = c.idle_load;
    doc["throughput_gb_per_node_hour"] = c.throughput_gb_per_node_hour;
    doc["parallel_overhead"] = c.parallel_overhead;
    return doc;
}

} // namespace

std::string_view to_string(Tier tier) {
    switch (tier) {
    case Tier::small: return "small";
    case Tier::medium: return "medium";
    case Tier::large: return "large";
    }
    return "small";
}

Tier tier_from_string(std::string_view text) {
    if (text == "small") return Tier::small;
    if (text == "medium") return Tier::medium;
    if (text == "large") return Tier::large;
    throw ValidationError("tier", "unknown tier '" + std::string(text) + "'");
}

ClusterTemplate smallest_tier() { return {Tier::small, 1}; }

ClusterTemplate cluster_tier_for(double total_size_gb) {
    if (total_size_gb <= kSmallTierMaxGb) return {Tier::small, 1};
    if (total_size_gb <= kMediumTierMaxGb) return {Tier::medium, 2};
    return {Tier::large, 4};
}

double ClusterSpec::effective_throughput_gb_per_hour() const {
    const double nodes = static_cast<double>(node_count);
    return throughput_gb_per_node_hour * nodes / (1.0 + parallel_overhead * (nodes - 1.0));
}

double Scenario::silo_volume_gb(std::size_t silo) const {
    const auto& shares = dataset.silo_shares;
    const double share = shares.at(silo);
    // Equal shares split the volume by division, so K equal silos get
    // exactly total / K each.
    if (std::all_of(shares.begin(), shares.end(), [share](double s) { return s == share; })) {
        return dataset.total_size_gb / static_cast<double>(shares.size());
    }
    return dataset.total_size_gb * share;
}

const std::string& Scenario::provider_for_region(const std::string& region) const {
    if (shared_storage.region == region) return shared_storage.provider;
    if (central_cluster.region == region) return central_cluster.provider;
    if (orchestrator_cluster.region == region) return orchestrator_cluster.provider;
    for (const auto& c : silo_clusters) {
        if (c.region == region) return c.provider;
    }
    throw ValidationError("region", "region '" + region + "' is not used by any cluster or storage");
}

void Scenario::resolve_tiers() {
    for (std::size_t k = 0; k < silo_clusters.size() && k < dataset.silo_shares.size(); ++k) {
        if (silo_clusters[k].auto_size) {
            silo_clusters[k].node_count = cluster_tier_for(silo_volume_gb(k)).node_count;
        }
    }
    if (central_cluster.auto_size) {
        central_cluster.node_count = cluster_tier_for(dataset.total_size_gb).node_count;
    }
    if (orchestrator_cluster.auto_size) {
        orchestrator_cluster.node_count = smallest_tier().node_count;
    }
}

void Scenario::resize_dataset(double total_size_gb) {
    dataset.total_size_gb = total_size_gb;
    resolve_tiers();
}

void Scenario::validate() const {
    require(std::isfinite(dataset.total_size_gb) && dataset.total_size_gb > 0.0,
            "dataset.total_size_gb", "must be > 0");
    require(!dataset.silo_shares.empty(), "dataset.silo_shares", "must list at least one silo");
    double sum = 0.0;
    for (std::size_t i = 0; i < dataset.silo_shares.size(); ++i) {
        const double share = dataset.silo_shares[i];
        require(share > 0.0 && share <= 1.0, "dataset.silo_shares[" + std::to_string(i) + "]",
                "each share must lie in (0, 1]");
        sum += share;
    }
    require(std::abs(sum - 1.0) <= kShareTolerance, "dataset.silo_shares",
            "silo_shares must sum to 1");
    require(dataset.replication_factor_for_scale >= 1, "dataset.replication_factor_for_scale",
            "must be >= 1");
    require(dataset.transfer_gb_per_hour > 0.0, "dataset.transfer_gb_per_hour", "must be > 0");
    require(silo_clusters.size() == dataset.silo_shares.size(), "silo_clusters",
            "expected one cluster per silo share (" + std::to_string(dataset.silo_shares.size()) +
                "), got " + std::to_string(silo_clusters.size()));

    for (std::size_t k = 0; k < silo_clusters.size(); ++k) {
        validate_cluster(silo_clusters[k], "silo_clusters[" + std::to_string(k) + "]");
    }
    validate_cluster(central_cluster, "central_cluster");
    validate_cluster(orchestrator_cluster, "orchestrator_cluster");
    require(shared_storage.throughput_gb_per_hour > 0.0, "shared_storage.throughput_gb_per_hour",
            "must be > 0");

    try {
        factors.validate();
    } catch (const ValidationError& e) {
        throw ValidationError("factors." + e.path(), e.message());
    }

    // Every region needs a carbon intensity, every provider a PUE, and a
    // region id may not be claimed by two providers.
    std::map<std::string, std::string> owner;
    auto check_site = [&](const std::string& region, const std::string& provider,
                          const std::string& path) {
        require(!region.empty(), path + ".region", "must be nonempty");
        require(factors.ci_by_region.contains(region), path + ".region",
                "region '" + region + "' has no entry in factors.ci_by_region");
        require(factors.pue_by_provider.contains(provider), path + ".provider",
                "provider '" + provider + "' has no entry in factors.pue_by_provider");
        auto [it, inserted] = owner.emplace(region, provider);
        require(inserted || it->second == provider, path + ".region",
                "region '" + region + "' is assigned to both " + it->second + " and " + provider);
    };
    for (std::size_t k = 0; k < silo_clusters.size(); ++k) {
        check_site(silo_clusters[k].region, silo_clusters[k].provider,
                   "silo_clusters[" + std::to_string(k) + "]");
    }
    check_site(central_cluster.region, central_cluster.provider, "central_cluster");
    check_site(orchestrator_cluster.region, orchestrator_cluster.provider, "orchestrator_cluster");
    check_site(shared_storage.region, shared_storage.provider, "shared_storage");

    require(plan.rounds >= 0, "plan.rounds", "must be >= 0");
    require(plan.local_epochs >= 1, "plan.local_epochs", "must be >= 1");
    require(plan.model_param_count >= 1, "plan.model_param_count", "must be >= 1");
    require(plan.bytes_per_param >= 1, "plan.bytes_per_param", "must be >= 1");
    require(std::isfinite(plan.learning_rate) && plan.learning_rate >= 0.0, "plan.learning_rate",
            "must be finite and >= 0");
    if (plan.batch_mode == BatchMode::minibatch) {
        require(plan.batch_size >= 1, "plan.batch_size", "must be >= 1 in minibatch mode");
    }
    require(plan.round_overhead_hours >= 0.0, "plan.round_overhead_hours", "must be >= 0");

    require(std::isfinite(retention_hours) && retention_hours >= 0.0, "retention_hours",
            "must be >= 0");
    require(prices.storage_per_gb_month >= 0.0, "prices.storage_per_gb_month", "must be >= 0");
    require(prices.egress_per_gb >= 0.0, "prices.egress_per_gb", "must be >= 0");
}

Scenario parse_scenario(std::string_view document, const std::string& base_dir,
                        std::vector<std::string>* defaults_applied) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string("malformed scenario document: ") + e.what());
    }
    ObjectReader r(doc, "", defaults_applied);

    Scenario out;
    out.dataset = read_dataset(r.raw("dataset"), defaults_applied);

    const json& silos = r.raw("silo_clusters");
    if (!silos.is_array()) throw ValidationError("silo_clusters", "expected an array");
    for (std::size_t k = 0; k < silos.size(); ++k) {
        out.silo_clusters.push_back(
            read_cluster(silos[k], "silo_clusters[" + std::to_string(k) + "]", defaults_applied));
    }
    out.central_cluster = read_cluster(r.raw("central_cluster"), "central_cluster", defaults_applied);
    out.orchestrator_cluster =
        read_cluster(r.raw("orchestrator_cluster"), "orchestrator_cluster", defaults_applied);
    out.shared_storage = read_shared_storage(r.raw("shared_storage"), defaults_applied);

    const json& factors = r.raw("factors");
    if (factors.is_string()) {
        const std::filesystem::path ref = factors.get<std::string>();
        const auto resolved = ref.is_absolute() ? ref : std::filesystem::path(base_dir) / ref;
        try {
            out.factors = load_factors_file(resolved.string());
        } catch (const ValidationError& e) {
            throw ValidationError("factors", e.what());
        }
    } else {
        out.factors = factors_from_json(factors, "factors");
    }

    out.plan = read_plan(r.raw("plan"), defaults_applied);
    out.retention_hours = r.number_or("retention_hours", out.retention_hours);
    if (r.has("prices")) {
        out.prices = read_prices(r.raw("prices"), defaults_applied);
    } else {
        r.note_default("prices");
    }
    r.finish();

    out.resolve_tiers();
    out.validate();
    // A document must describe at least one round; programmatic scenarios
    // may use zero to model an idle run.
    require(out.plan.rounds >= 1, "plan.rounds", "must be >= 1");
    return out;
}

Scenario load_scenario_file(const std::string& filename, std::vector<std::string>* defaults_applied) {
    std::ifstream in(filename);
    if (!in) {
        throw ValidationError(filename, "cannot open scenario file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto dir = std::filesystem::path(filename).parent_path();
    return parse_scenario(buffer.str(), dir.empty() ? "." : dir.string(), defaults_applied);
}

std::string serialize_scenario(const Scenario& s) {
    ordered_json doc;
    doc["dataset"]["total_size_gb"] = s.dataset.total_size_gb;
    doc["dataset"]["silo_shares"] = s.dataset.silo_shares;
    doc["dataset"]["replication_factor_for_scale"] = s.dataset.replication_factor_for_scale;
    doc["dataset"]["transfer_gb_per_hour"] = s.dataset.transfer_gb_per_hour;
    doc["silo_clusters"] = ordered_json::array();
    for (const auto& c : s.silo_clusters) doc["silo_clusters"].push_back(cluster_to_json(c));
    doc["central_cluster"] = cluster_to_json(s.central_cluster);
    doc["orchestrator_cluster"] = cluster_to_json(s.orchestrator_cluster);
    doc["shared_storage"]["medium"] = to_string(s.shared_storage.medium);
    doc["shared_storage"]["region"] = s.shared_storage.region;
    doc["shared_storage"]["provider"] = s.shared_storage.provider;
    doc["shared_storage"]["throughput_gb_per_hour"] = s.shared_storage.throughput_gb_per_hour;
    doc["factors"] = factors_to_json(s.factors);
    auto& plan = doc["plan"];
    plan["rounds"] = s.plan.rounds;
    plan["local_epochs"] = s.plan.local_epochs;
    plan["model_param_count"] = s.plan.model_param_count;
    plan["bytes_per_param"] = s.plan.bytes_per_param;
    plan["learning_rate"] = s.plan.learning_rate;
    plan["batch_mode"] = s.plan.batch_mode == BatchMode::full_batch ? "full_batch" : "minibatch";
    plan["batch_size"] = s.plan.batch_size;
    plan["seed"] = s.plan.seed;
    plan["round_overhead_hours"] = s.plan.round_overhead_hours;
    doc["retention_hours"] = s.retention_hours;
    doc["prices"]["storage_per_gb_month"] = s.prices.storage_per_gb_month;
    doc["prices"]["egress_per_gb"] = s.prices.egress_per_gb;
    return doc.dump(2) + "\n";
}

} // namespace flcarbon
