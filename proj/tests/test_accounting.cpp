#include "flcarbon/accounting.hpp"
#include "flcarbon/errors.hpp"
#include "flcarbon/fl_sim.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace flcarbon;
using flcarbon::testing::make_scenario;
using flcarbon::testing::rel_close;
using flcarbon::testing::scenario_path;

namespace {

// Two regions with different grids so transfers exercise the destination rule.
Scenario two_region_scenario() {
    Scenario s = make_scenario(2, 12.0);
    s.factors.ci_by_region["northeurope"] = 250.0;
    s.silo_clusters[1].region = "northeurope";
    s.validate();
    return s;
}

UsageEvent compute_event(Actor actor, ComputeUnit unit, ComputeSpec spec, double start = 0.0) {
    return {actor, start, spec.duration_hours, ComputePayload{unit, spec}};
}

TraceLog random_trace(std::mt19937_64& gen, Mode mode, std::size_t silos) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<int> who(-2, static_cast<int>(silos) - 1);
    const char* regions[] = {"westeurope", "northeurope"};
    TraceLog trace;
    trace.mode = mode;
    const int n = std::uniform_int_distribution<int>(0, 40)(gen);
    for (int i = 0; i < n; ++i) {
        const int w = who(gen);
        const Actor actor = w == -2 ? Actor::central() : w == -1 ? Actor::orchestrator() : Actor::silo_at(w);
        const double start = 100.0 * u(gen);
        const double hours = 10.0 * u(gen);
        switch (kind(gen)) {
        case 0:
            trace.events.push_back(compute_event(actor, u(gen) < 0.5 ? ComputeUnit::cpu : ComputeUnit::gpu,
                                                 {1 + static_cast<int>(8 * u(gen)), 400 * u(gen), u(gen), hours},
                                                 start));
            break;
        case 1: trace.events.push_back({actor, start, hours, MemoryPayload{200 * u(gen)}}); break;
        case 2: {
            const double gb = 50 * u(gen);
            trace.events.push_back(
                {actor, start, hours,
                 TransferPayload{gb, regions[gen() % 2], regions[gen() % 2],
                                 u(gen) < 0.5 ? CoefficientClass::internet : CoefficientClass::intra_cloud,
                                 std::llround(gb * 1e9)}});
            break;
        }
        default:
            trace.events.push_back({actor, start, 1000 * u(gen),
                                    StoragePayload{100 * u(gen), u(gen) < 0.5 ? StorageMedium::hdd : StorageMedium::ssd,
                                                   u(gen) < 0.5, regions[gen() % 2]}});
        }
    }
    sort_events(trace.events);
    trace.wall_clock_hours = wall_clock_of(trace.events);
    return trace;
}

void expect_fields_close(const EmissionReport& a, const EmissionReport& b, double rel) {
    EXPECT_TRUE(rel_close(a.energy_kwh.total, b.energy_kwh.total, rel));
    EXPECT_TRUE(rel_close(a.emissions_g.c_cpu, b.emissions_g.c_cpu, rel));
    EXPECT_TRUE(rel_close(a.emissions_g.c_gpu, b.emissions_g.c_gpu, rel));
    EXPECT_TRUE(rel_close(a.emissions_g.c_memory, b.emissions_g.c_memory, rel));
    EXPECT_TRUE(rel_close(a.emissions_g.c_network, b.emissions_g.c_network, rel));
    EXPECT_TRUE(rel_close(a.emissions_g.c_transfer, b.emissions_g.c_transfer, rel));
    EXPECT_TRUE(rel_close(a.emissions_g.c_storage, b.emissions_g.c_storage, rel));
    EXPECT_TRUE(rel_close(a.c_total_g, b.c_total_g, rel));
    EXPECT_TRUE(rel_close(a.cost.total, b.cost.total, rel));
}

} // namespace

TEST(Account, EmptyTraceIsAllZero) {
    const EmissionReport r = account(TraceLog{}, make_scenario(2));
    EXPECT_EQ(r.energy_kwh, EnergyBreakdown{});
    EXPECT_EQ(r.emissions_g, EmissionBreakdown{});
    EXPECT_EQ(r.c_total_g, 0.0);
    EXPECT_EQ(r.cost, CostBreakdown{});
}

TEST(Account, SingleGpuEvent) {
    TraceLog trace;
    trace.events.push_back(compute_event(Actor::central(), ComputeUnit::gpu, {1, 300.0, 1.0, 1.0}));
    const EmissionReport r = account(trace, make_scenario(2));
    EXPECT_TRUE(rel_close(r.emissions_g.c_gpu, 142.2, 1e-12));
    EXPECT_TRUE(rel_close(r.c_total_g, 142.2, 1e-12));
    EXPECT_EQ(r.emissions_g.c_cpu, 0.0);
}

TEST(Account, ReplicatedStorageEvent) {
    TraceLog trace;
    trace.events.push_back({Actor::central(), 0.0, 1.0, StoragePayload{1000.0, StorageMedium::ssd, true, "westeurope"}});
    const EmissionReport r = account(trace, make_scenario(2));
    EXPECT_TRUE(rel_close(r.emissions_g.c_storage, 1.7064, 1e-12));
    EXPECT_TRUE(rel_close(r.energy_kwh.storage, 0.0036, 1e-12));
}

TEST(Account, TransferUsesDestinationGridAndClass) {
    const Scenario s = two_region_scenario();
    TraceLog trace;
    trace.events.push_back({Actor::silo_at(0), 0.0, 1.0,
                            TransferPayload{10.0, "westeurope", "northeurope", CoefficientClass::internet, 10000000000}});
    trace.events.push_back({Actor::silo_at(1), 0.0, 1.0,
                            TransferPayload{2.0, "northeurope", "westeurope", CoefficientClass::intra_cloud, 2000000000}});
    const EmissionReport r = account(trace, s);
    EXPECT_TRUE(rel_close(r.emissions_g.c_transfer, 0.6 * 1.185 * 250.0, 1e-12));
    EXPECT_TRUE(rel_close(r.emissions_g.c_network, 0.002 * 1.185 * 400.0, 1e-12));
    EXPECT_TRUE(rel_close(r.cost.egress, 10.0 * 0.05, 1e-12));
}

TEST(Account, CostsFollowPrices) {
    const Scenario s = make_scenario(2);
    TraceLog trace;
    trace.events.push_back(compute_event(Actor::central(), ComputeUnit::cpu, {2, 100.0, 0.5, 3.0}));
    trace.events.push_back(compute_event(Actor::central(), ComputeUnit::gpu, {2, 300.0, 0.5, 3.0}));
    trace.events.push_back({Actor::central(), 0.0, 730.0, StoragePayload{10.0, StorageMedium::ssd, true, "westeurope"}});
    const EmissionReport r = account(trace, s);
    EXPECT_TRUE(rel_close(r.cost.compute, 2 * 3.0 * 3.06, 1e-12));
    EXPECT_TRUE(rel_close(r.cost.storage, 10.0 * 0.15, 1e-12));
    EXPECT_EQ(r.cost.total, r.cost.compute + r.cost.storage + r.cost.egress);
}

TEST(Account, UnknownActorIsRejected) {
    TraceLog trace;
    trace.events.push_back({Actor::silo_at(7), 0.0, 1.0, MemoryPayload{1.0}});
    EXPECT_THROW(account(trace, make_scenario(2)), ValidationError);
}

TEST(Account, SciPerFunctionalUnit) {
    TraceLog trace;
    trace.events.push_back(compute_event(Actor::central(), ComputeUnit::gpu, {1, 300.0, 1.0, 1.0}));
    const EmissionReport r = account(trace, make_scenario(2), {2.0, 10.0});
    ASSERT_TRUE(r.sci_g_per_unit.has_value());
    EXPECT_EQ(*r.sci_g_per_unit, (r.c_total_g + 10.0) / 2.0);
    EXPECT_FALSE(account(trace, make_scenario(2)).sci_g_per_unit.has_value());
    EXPECT_THROW(account(trace, make_scenario(2), {0.0, 0.0}), ValidationError);
}

TEST(AccountProperties, StructuralIdentitiesOnRandomTraces) {
    const Scenario s = two_region_scenario();
    std::mt19937_64 gen(2024);
    for (int i = 0; i < 300; ++i) {
        const EmissionReport r = account(random_trace(gen, Mode::federated, 2), s);
        const auto& e = r.emissions_g;
        EXPECT_EQ(r.c_train_g, e.c_cpu + e.c_gpu + e.c_memory + e.c_network);
        EXPECT_EQ(r.c_total_g, r.c_train_g + e.c_transfer + e.c_storage);
        const auto& k = r.energy_kwh;
        EXPECT_EQ(k.total, k.cpu + k.gpu + k.memory + k.network + k.transfer + k.storage);
        for (double v : {k.cpu, k.gpu, k.memory, k.network, k.transfer, k.storage, e.c_cpu, e.c_gpu,
                         e.c_memory, e.c_network, e.c_transfer, e.c_storage, r.cost.total}) {
            EXPECT_GE(v, 0.0);
        }
    }
}

TEST(AccountProperties, Additivity) {
    const Scenario s = two_region_scenario();
    std::mt19937_64 gen(7);
    for (int i = 0; i < 200; ++i) {
        const TraceLog a = random_trace(gen, Mode::federated, 2);
        const TraceLog b = random_trace(gen, Mode::federated, 2);
        TraceLog joined = a;
        for (auto e : b.events) {
            e.start_hour += a.wall_clock_hours;
            joined.events.push_back(e);
        }
        sort_events(joined.events);
        joined.wall_clock_hours = wall_clock_of(joined.events);
        const EmissionReport ra = account(a, s), rb = account(b, s), rj = account(joined, s);
        EmissionReport sum = ra;
        sum.energy_kwh.total += rb.energy_kwh.total;
        sum.emissions_g.c_cpu += rb.emissions_g.c_cpu;
        sum.emissions_g.c_gpu += rb.emissions_g.c_gpu;
        sum.emissions_g.c_memory += rb.emissions_g.c_memory;
        sum.emissions_g.c_network += rb.emissions_g.c_network;
        sum.emissions_g.c_transfer += rb.emissions_g.c_transfer;
        sum.emissions_g.c_storage += rb.emissions_g.c_storage;
        sum.c_total_g += rb.c_total_g;
        sum.cost.total += rb.cost.total;
        expect_fields_close(rj, sum, 1e-12);
    }
}

TEST(AccountProperties, ScalingVolumesAndDurations) {
    const Scenario s = two_region_scenario();
    std::mt19937_64 gen(99);
    for (int i = 0; i < 200; ++i) {
        const TraceLog t = random_trace(gen, Mode::centralized, 2);
        const double k = 0.5 + 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
        TraceLog scaled = t;
        for (auto& e : scaled.events) {
            if (auto* c = std::get_if<ComputePayload>(&e.payload)) {
                c->spec.duration_hours *= k;
                e.duration_hours *= k;
            } else if (auto* m = std::get_if<MemoryPayload>(&e.payload)) {
                m->gb *= k;
            } else if (auto* x = std::get_if<TransferPayload>(&e.payload)) {
                x->gb *= k;
            } else if (auto* st = std::get_if<StoragePayload>(&e.payload)) {
                st->gb *= k;
            }
        }
        const EmissionReport base = account(t, s);
        EmissionReport expected = base;
        expected.energy_kwh.total *= k;
        auto& g = expected.emissions_g;
        for (double* v : {&g.c_cpu, &g.c_gpu, &g.c_memory, &g.c_network, &g.c_transfer, &g.c_storage}) *v *= k;
        expected.c_total_g *= k;
        expected.cost.total *= k;
        expect_fields_close(account(scaled, s), expected, 1e-12);
    }
}

TEST(AccountProperties, ModeInvariantsOnSimulatedTraces) {
    for (const char* name : {"small.scenario", "medium.scenario", "large.scenario"}) {
        const Scenario s = load_scenario_file(scenario_path(name));
        const EmissionReport fl = account(run_federated(s, default_synthetic(42)), s);
        const EmissionReport cl = account(run_centralized(s, default_synthetic(42)), s);
        EXPECT_EQ(fl.emissions_g.c_transfer, 0.0) << name;
        EXPECT_GT(fl.emissions_g.c_network, 0.0) << name;
        EXPECT_EQ(cl.emissions_g.c_network, 0.0) << name;
        EXPECT_GT(cl.emissions_g.c_transfer, 0.0) << name;
    }
}

TEST(AccountProperties, MonotoneInScenarioKnobs) {
    const Scenario base = load_scenario_file(scenario_path("small.scenario"));
    auto total = [](const Scenario& s, Mode mode) {
        return account(run_mode(mode, s, default_synthetic(42)), s).c_total_g;
    };
    for (Mode mode : {Mode::federated, Mode::centralized}) {
        const double ref = total(base, mode);
        Scenario bigger = base;
        bigger.resize_dataset(3.0);
        EXPECT_GE(total(bigger, mode), ref);
        Scenario more_rounds = base;
        more_rounds.plan.rounds += 5;
        EXPECT_GE(total(more_rounds, mode), ref);
        Scenario hotter = base;
        for (auto& c : hotter.silo_clusters) c.gpu_tdp_watts *= 1.5;
        hotter.central_cluster.gpu_tdp_watts *= 1.5;
        EXPECT_GE(total(hotter, mode), ref);
        Scenario longer = base;
        longer.retention_hours *= 2.0;
        EXPECT_GE(total(longer, mode), ref);
        Scenario dirtier = base;
        dirtier.factors.memory_kwh_per_gb_hour *= 2.0;
        dirtier.factors.network_kwh_per_gb_high *= 2.0;
        EXPECT_GE(total(dirtier, mode), ref);
    }
}

TEST(Compare, IdenticalReportsHaveUnitRatios) {
    const Scenario s = make_scenario(2);
    const EmissionReport r = account(run_federated(s, default_synthetic(1)), s);
    const ComparisonReport c = compare(r, r);
    for (const auto& row : c.categories) {
        EXPECT_EQ(row.delta, 0.0) << row.category;
        ASSERT_TRUE(row.ratio.has_value()) << row.category;
        EXPECT_EQ(*row.ratio, 1.0) << row.category;
    }
    EXPECT_FALSE(c.cl_total_exceeds_fl);
    EXPECT_FALSE(c.fl_train_exceeds_cl_train);
}

TEST(Compare, DoubleTotalGivesRatioTwo) {
    EmissionReport fl, cl;
    fl.c_total_g = 21.5;
    cl.c_total_g = 43.0;
    const ComparisonReport c = compare(fl, cl);
    const auto it = std::find_if(c.categories.begin(), c.categories.end(),
                                 [](const CategoryDelta& d) { return d.category == "c_total"; });
    ASSERT_NE(it, c.categories.end());
    EXPECT_EQ(*it->ratio, 2.0);
    EXPECT_EQ(it->delta, 21.5);
    EXPECT_TRUE(c.cl_total_exceeds_fl);
}

TEST(Compare, RatioUndefinedWhenOnlyFederatedIsZero) {
    EmissionReport fl, cl;
    cl.emissions_g.c_transfer = 5.0;
    const ComparisonReport c = compare(fl, cl);
    for (const auto& row : c.categories) {
        if (row.category == "c_transfer") EXPECT_FALSE(row.ratio.has_value());
    }
}

TEST(Compare, LargeBundledScenarioFavoursFederated) {
    const Scenario s = load_scenario_file(scenario_path("large.scenario"));
    const auto fl = account(run_federated(s, default_synthetic(42)), s);
    const auto cl = account(run_centralized(s, default_synthetic(42)), s);
    EXPECT_TRUE(compare(fl, cl).cl_total_exceeds_fl);
}

TEST(Compare, ZeroedExtrasLeaveTrainingToDecide) {
    Scenario s = load_scenario_file(scenario_path("small.scenario"));
    s.retention_hours = 0.0;
    s.factors.network_kwh_per_gb_high = 0.0;
    const auto fl = account(run_federated(s, default_synthetic(42)), s);
    const auto cl = account(run_centralized(s, default_synthetic(42)), s);
    EXPECT_EQ(cl.emissions_g.c_transfer, 0.0);
    EXPECT_EQ(cl.emissions_g.c_storage, 0.0);
    const ComparisonReport c = compare(fl, cl);
    EXPECT_EQ(cl.c_total_g, cl.c_train_g);
    EXPECT_TRUE(c.fl_train_exceeds_cl_train);
    EXPECT_FALSE(c.cl_total_exceeds_fl);
}
