#include "flcarbon/errors.hpp"
#include "flcarbon/scenario.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace flcarbon;
using flcarbon::testing::scenario_path;

namespace {

const char* kMinimal = R"({
  "dataset": {"total_size_gb": 3.0, "silo_shares": [0.5, 0.5]},
  "silo_clusters": [
    {"name": "a", "provider": "Azure", "region": "westeurope", "cpu_tdp_watts": 100},
    {"name": "b", "provider": "Azure", "region": "northeurope", "cpu_tdp_watts": 100}
  ],
  "central_cluster": {"name": "c", "provider": "Azure", "region": "westeurope"},
  "orchestrator_cluster": {"name": "o", "provider": "Azure", "region": "westeurope"},
  "shared_storage": {"region": "westeurope", "provider": "Azure"},
  "factors": {"ci_by_region": {"westeurope": 328, "northeurope": 279}},
  "plan": {"model_param_count": 1000}
})";

std::string with_replacement(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return text.replace(pos, from.size(), to);
}

void expect_error_path(const std::string& doc, const std::string& path) {
    try {
        parse_scenario(doc);
        FAIL() << "expected ValidationError at " << path;
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.path(), path) << e.what();
    }
}

} // namespace

TEST(ParseScenario, MinimalTwoSiloDocument) {
    std::vector<std::string> defaults;
    const Scenario s = parse_scenario(kMinimal, ".", &defaults);
    EXPECT_EQ(s.silo_clusters.size(), 2u);
    EXPECT_EQ(s.plan.rounds, 10);
    EXPECT_EQ(s.plan.seed, 42u);
    EXPECT_EQ(s.retention_hours, 720.0);
    EXPECT_EQ(s.plan.payload_bytes(), 4000);
    // Each silo holds 1.5 GB: small tier; the central cluster sees 3 GB: medium.
    EXPECT_EQ(s.silo_clusters[0].node_count, 1);
    EXPECT_EQ(s.central_cluster.node_count, 2);
    EXPECT_EQ(s.orchestrator_cluster.node_count, 1);
    EXPECT_NE(std::find(defaults.begin(), defaults.end(), "retention_hours"), defaults.end());
    EXPECT_NE(std::find(defaults.begin(), defaults.end(), "plan.rounds"), defaults.end());
}

TEST(ParseScenario, SharesMustSumToOne) {
    const std::string doc = with_replacement(kMinimal, "[0.5, 0.5]", "[0.5, 0.6]");
    try {
        parse_scenario(doc);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.path(), "dataset.silo_shares");
        EXPECT_NE(std::string(e.what()).find("silo_shares must sum to 1"), std::string::npos);
    }
}

TEST(ParseScenario, ErrorsNameTheOffendingPath) {
    expect_error_path(with_replacement(kMinimal, "\"cpu_tdp_watts\": 100}", "\"cpu_tdp_watts\": 100, \"colour\": 1}"),
                      "silo_clusters[0].colour");
    expect_error_path(with_replacement(kMinimal, "\"plan\"", "\"extra\": 1, \"plan\""), "extra");
    expect_error_path(with_replacement(kMinimal, "\"model_param_count\": 1000", "\"rounds\": 2"),
                      "plan.model_param_count");
    expect_error_path(with_replacement(kMinimal, "\"northeurope\": 279", "\"eastus\": 279"),
                      "silo_clusters[1].region");
    expect_error_path(with_replacement(kMinimal, "\"model_param_count\": 1000",
                                       "\"model_param_count\": 1000, \"rounds\": 0"),
                      "plan.rounds");
    expect_error_path(with_replacement(kMinimal, "\"cpu_tdp_watts\": 100}", "\"node_count\": 0}"),
                      "silo_clusters[0].node_count");
}

TEST(ParseScenario, SiloCountMustMatchShares) {
    expect_error_path(with_replacement(kMinimal, "[0.5, 0.5]", "[0.25, 0.25, 0.5]"), "silo_clusters");
}

TEST(ParseScenario, RejectsMalformedText) {
    EXPECT_THROW(parse_scenario("{ not json"), ValidationError);
}

TEST(ParseScenario, BundledMediumIsTwelveGigabytes) {
    const Scenario s = load_scenario_file(scenario_path("medium.scenario"));
    EXPECT_EQ(s.dataset.total_size_gb, 12.0);
    EXPECT_EQ(s.silo_count(), 3u);
}

TEST(ParseScenario, BundledScalesLandInDistinctTiers) {
    const Scenario small = load_scenario_file(scenario_path("small.scenario"));
    const Scenario medium = load_scenario_file(scenario_path("medium.scenario"));
    const Scenario large = load_scenario_file(scenario_path("large.scenario"));
    EXPECT_EQ(small.dataset.total_size_gb, 1.2);
    EXPECT_EQ(large.dataset.total_size_gb, 120.0);
    EXPECT_EQ(small.central_cluster.node_count, 1);
    EXPECT_EQ(medium.central_cluster.node_count, 2);
    EXPECT_EQ(large.central_cluster.node_count, 4);
    EXPECT_EQ(large.silo_clusters[0].node_count, 4);  // 40 GB shards
    EXPECT_EQ(medium.silo_clusters[0].node_count, 2); // 4 GB shards
    EXPECT_EQ(small.silo_clusters[0].node_count, 1);  // 0.4 GB shards
}

TEST(ParseScenario, FactorsFileIsResolvedRelativeToScenario) {
    const Scenario s = load_scenario_file(scenario_path("small.scenario"));
    EXPECT_EQ(s.factors, load_factors_file(scenario_path("default.factors")));
}

TEST(ParseScenario, ParseSerializeIsIdempotent) {
    for (const char* name : {"small.scenario", "medium.scenario", "large.scenario"}) {
        const Scenario first = load_scenario_file(scenario_path(name));
        const std::string text = serialize_scenario(first);
        const Scenario second = parse_scenario(text);
        EXPECT_EQ(second, first) << name;
        EXPECT_EQ(serialize_scenario(second), text) << name;
    }
    const Scenario minimal = parse_scenario(kMinimal);
    EXPECT_EQ(parse_scenario(serialize_scenario(minimal)), minimal);
}

TEST(ParseScenario, ExplicitNodeCountDisablesAutoSizing) {
    const Scenario s = parse_scenario(
        with_replacement(kMinimal, "\"region\": \"westeurope\"}", "\"region\": \"westeurope\", \"node_count\": 8}"));
    EXPECT_EQ(s.central_cluster.node_count, 8);
    EXPECT_FALSE(s.central_cluster.auto_size);
}

TEST(ClusterTier, Examples) {
    EXPECT_EQ(cluster_tier_for(1.2).tier, Tier::small);
    EXPECT_EQ(cluster_tier_for(2.0).tier, Tier::small);
    EXPECT_EQ(cluster_tier_for(12.0).tier, Tier::medium);
    EXPECT_EQ(cluster_tier_for(20.0).tier, Tier::medium);
    EXPECT_EQ(cluster_tier_for(120.0).tier, Tier::large);
    EXPECT_EQ(cluster_tier_for(1.2).node_count, 1);
    EXPECT_EQ(cluster_tier_for(12.0).node_count, 2);
    EXPECT_EQ(cluster_tier_for(120.0).node_count, 4);
}

TEST(ClusterTier, Monotone) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 200.0);
    for (int i = 0; i < 1000; ++i) {
        double a = u(gen), b = u(gen);
        if (a > b) std::swap(a, b);
        EXPECT_LE(static_cast<int>(cluster_tier_for(a).tier), static_cast<int>(cluster_tier_for(b).tier));
        EXPECT_LE(cluster_tier_for(a).node_count, cluster_tier_for(b).node_count);
    }
}

TEST(ClusterTier, StringRoundTrip) {
    for (Tier t : {Tier::small, Tier::medium, Tier::large}) EXPECT_EQ(tier_from_string(to_string(t)), t);
    EXPECT_THROW(tier_from_string("huge"), ValidationError);
}

TEST(SiloVolume, EqualSharesDivideExactly) {
    for (std::size_t k = 1; k <= 12; ++k) {
        for (double total : {1.2, 12.0, 120.0, 7.3}) {
            const Scenario s = flcarbon::testing::make_scenario(k, total);
            for (std::size_t i = 0; i < k; ++i) {
                EXPECT_EQ(s.silo_volume_gb(i), total / static_cast<double>(k));
            }
        }
    }
}

TEST(SiloVolume, UnequalSharesScaleTotal) {
    Scenario s = flcarbon::testing::make_scenario(2, 10.0);
    s.dataset.silo_shares = {0.25, 0.75};
    EXPECT_EQ(s.silo_volume_gb(0), 2.5);
    EXPECT_EQ(s.silo_volume_gb(1), 7.5);
}

TEST(Resize, RederivesTiers) {
    Scenario s = load_scenario_file(scenario_path("small.scenario"));
    s.resize_dataset(120.0);
    EXPECT_EQ(s.central_cluster.node_count, 4);
    EXPECT_EQ(s.silo_clusters[1].node_count, 4);
    EXPECT_EQ(s.orchestrator_cluster.node_count, 1);
}

TEST(EffectiveThroughput, ParallelOverhead) {
    ClusterSpec c;
    c.throughput_gb_per_node_hour = 10.0;
    c.parallel_overhead = 0.1;
    c.node_count = 1;
    EXPECT_EQ(c.effective_throughput_gb_per_hour(), 10.0);
    c.node_count = 4;
    EXPECT_DOUBLE_EQ(c.effective_throughput_gb_per_hour(), 40.0 / 1.3);
}

TEST(ProviderForRegion, RegionOwnedByOneProvider) {
    Scenario s = flcarbon::testing::make_scenario(2);
    EXPECT_EQ(s.provider_for_region("westeurope"), "Azure");
    s.central_cluster.provider = "AWS";
    EXPECT_THROW(s.validate(), ValidationError);
}
