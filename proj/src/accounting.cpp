#include "flcarbon/accounting.hpp"

#include "flcarbon/errors.hpp"

namespace flcarbon {

namespace {

const ClusterSpec& cluster_of(const Actor& actor, const Scenario& scenario) {
    switch (actor.role) {
    case ActorRole::silo:
        if (actor.silo < 0 || static_cast<std::size_t>(actor.silo) >= scenario.silo_count()) {
            throw ValidationError("actor", "unknown actor '" + actor.to_string() + "'");
        }
        return scenario.silo_clusters[static_cast<std::size_t>(actor.silo)];
    case ActorRole::orchestrator: return scenario.orchestrator_cluster;
    case ActorRole::central: return scenario.central_cluster;
    }
    throw ValidationError("actor", "unknown actor");
}

struct Site {
    double pue;
    double ci;
};

Site site_of(const ClusterSpec& cluster, const EmissionFactors& factors) {
    return {factors.pue(cluster.provider), factors.carbon_intensity(cluster.region)};
}

Site site_of(const std::string& region, const Scenario& scenario) {
    return {scenario.factors.pue(scenario.provider_for_region(region)),
            scenario.factors.carbon_intensity(region)};
}

std::optional<double> ratio_of(double cl, double fl) {
    if (fl == 0.0) {
        if (cl == 0.0) return 1.0;
        return std::nullopt;
    }
    return cl / fl;
}

} // namespace

EmissionReport account(const TraceLog& trace, const Scenario& scenario, const SciOptions& sci) {
    const EmissionFactors& factors = scenario.factors;
    EmissionReport report;
    report.mode = trace.mode;
    EnergyBreakdown& energy = report.energy_kwh;
    EmissionBreakdown& em = report.emissions_g;
    CostBreakdown& cost = report.cost;

    for (const UsageEvent& event : trace.events) {
        if (const auto* p = std::get_if<ComputePayload>(&event.payload)) {
            const ClusterSpec& cluster = cluster_of(event.actor, scenario);
            const Site site = site_of(cluster, factors);
            const double kwh = compute_energy_kwh(p->spec);
            const double g = emissions_gco2e(kwh, site.pue, site.ci);
            if (p->unit == ComputeUnit::cpu) {
                energy.cpu += kwh;
                em.c_cpu += g;
                // Every allocated interval carries exactly one CPU event, so
                // node-hours are billed from those.
                cost.compute += p->spec.unit_count * p->spec.duration_hours * cluster.hourly_price;
            } else {
                energy.gpu += kwh;
                em.c_gpu += g;
            }
        } else if (const auto* p = std::get_if<MemoryPayload>(&event.payload)) {
            const Site site = site_of(cluster_of(event.actor, scenario), factors);
            const double kwh = memory_energy_kwh(p->gb, event.duration_hours, factors);
            energy.memory += kwh;
            em.c_memory += emissions_gco2e(kwh, site.pue, site.ci);
        } else if (const auto* p = std::get_if<TransferPayload>(&event.payload)) {
            cluster_of(event.actor, scenario);
            // Charged to the destination grid and datacenter.
            const Site site = site_of(p->dst_region, scenario);
            if (p->coefficient_class == CoefficientClass::intra_cloud) {
                const double kwh = network_energy_kwh(p->gb, factors.network_kwh_per_gb_low);
                energy.network += kwh;
                em.c_network += emissions_gco2e(kwh, site.pue, site.ci);
            } else {
                const double kwh = network_energy_kwh(p->gb, factors.network_kwh_per_gb_high);
                energy.transfer += kwh;
                em.c_transfer += emissions_gco2e(kwh, site.pue, site.ci);
                cost.egress += p->gb * scenario.prices.egress_per_gb;
            }
        } else if (const auto* p = std::get_if<StoragePayload>(&event.payload)) {
            cluster_of(event.actor, scenario);
            const Site site = site_of(p->region, scenario);
            const double copies = p->replicated ? factors.redundancy_copies : 1;
            const double kwh =
                storage_energy_kwh(p->gb / kGbPerTb, event.duration_hours, p->medium, factors) * copies;
            energy.storage += kwh;
            em.c_storage += emissions_gco2e(kwh, site.pue, site.ci);
            // Prices already cover the provider's internal replication.
            cost.storage += p->gb * (event.duration_hours / kHoursPerMonth) *
                            scenario.prices.storage_per_gb_month;
        }
    }

    energy.total = energy.cpu + energy.gpu + energy.memory + energy.network + energy.transfer +
                   energy.storage;
    report.c_train_g = em.c_cpu + em.c_gpu + em.c_memory + em.c_network;
    report.c_total_g = report.c_train_g + em.c_transfer + em.c_storage;
    cost.total = cost.compute + cost.storage + cost.egress;
    report.wall_clock_hours = trace.wall_clock_hours;

    if (sci.functional_units) {
        if (!(*sci.functional_units > 0.0)) {
            throw ValidationError("functional_units", "must be > 0");
        }
        if (!(sci.embodied_g >= 0.0)) throw ValidationError("embodied_g", "must be >= 0");
        report.sci_g_per_unit = (report.c_total_g + sci.embodied_g) / *sci.functional_units;
    }
    return report;
}

ComparisonReport compare(const EmissionReport& fl, const EmissionReport& cl) {
    ComparisonReport out;
    out.federated = fl;
    out.centralized = cl;
    auto add = [&out](std::string name, double f, double c) {
        out.categories.push_back({std::move(name), f, c, c - f, ratio_of(c, f)});
    };
    add("c_cpu", fl.emissions_g.c_cpu, cl.emissions_g.c_cpu);
    add("c_gpu", fl.emissions_g.c_gpu, cl.emissions_g.c_gpu);
    add("c_memory", fl.emissions_g.c_memory, cl.emissions_g.c_memory);
    add("c_network", fl.emissions_g.c_network, cl.emissions_g.c_network);
    add("c_transfer", fl.emissions_g.c_transfer, cl.emissions_g.c_transfer);
    add("c_storage", fl.emissions_g.c_storage, cl.emissions_g.c_storage);
    add("c_train", fl.c_train_g, cl.c_train_g);
    add("c_total", fl.c_total_g, cl.c_total_g);
    add("energy_total_kwh", fl.energy_kwh.total, cl.energy_kwh.total);
    add("cost_total", fl.cost.total, cl.cost.total);
    add("wall_clock_hours", fl.wall_clock_hours, cl.wall_clock_hours);
    out.cl_total_exceeds_fl = cl.c_total_g > fl.c_total_g;
    out.fl_train_exceeds_cl_train = fl.c_train_g > cl.c_train_g;
    return out;
}

} // namespace flcarbon
