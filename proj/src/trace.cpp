#include "flcarbon/trace.hpp"

#include "flcarbon/errors.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace flcarbon {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json payload_to_json(const EventPayload& payload) {
    ordered_json out;
    std::visit(
        [&out](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ComputePayload>) {
                out["unit"] = to_string(p.unit);
                out["unit_count"] = p.spec.unit_count;
                out["tdp_watts"] = p.spec.tdp_watts;
                out["load_fraction"] = p.spec.load_fraction;
                out["duration_hours"] = p.spec.duration_hours;
            } else if constexpr (std::is_same_v<T, MemoryPayload>) {
                out["gb"] = p.gb;
            } else if constexpr (std::is_same_v<T, TransferPayload>) {
                out["gb"] = p.gb;
                out["src_region"] = p.src_region;
                out["dst_region"] = p.dst_region;
                out["coefficient_class"] = to_string(p.coefficient_class);
                out["bytes"] = p.bytes;
            } else {
                out["gb"] = p.gb;
                out["medium"] = to_string(p.medium);
                out["replicated"] = p.replicated;
                out["region"] = p.region;
            }
        },
        payload);
    return out;
}

EventPayload payload_from_json(EventKind kind, const json& doc) {
    switch (kind) {
    case EventKind::compute: {
        const auto unit = doc.at("unit").get<std::string>();
        if (unit != "cpu" && unit != "gpu") throw ValidationError("payload.unit", "must be cpu or gpu");
        ComputePayload p;
        p.unit = unit == "cpu" ? ComputeUnit::cpu : ComputeUnit::gpu;
        p.spec.unit_count = doc.at("unit_count").get<int>();
        p.spec.tdp_watts = doc.at("tdp_watts").get<double>();
        p.spec.load_fraction = doc.at("load_fraction").get<double>();
        p.spec.duration_hours = doc.at("duration_hours").get<double>();
        return p;
    }
    case EventKind::memory:
        return MemoryPayload{doc.at("gb").get<double>()};
    case EventKind::transfer: {
        TransferPayload p;
        p.gb = doc.at("gb").get<double>();
        p.src_region = doc.at("src_region").get<std::string>();
        p.dst_region = doc.at("dst_region").get<std::string>();
        const auto cls = doc.at("coefficient_class").get<std::string>();
        if (cls != "internet" && cls != "intra_cloud") {
            throw ValidationError("payload.coefficient_class", "must be internet or intra_cloud");
        }
        p.coefficient_class = cls == "internet" ? CoefficientClass::internet : CoefficientClass::intra_cloud;
        p.bytes = doc.at("bytes").get<std::int64_t>();
        return p;
    }
    case EventKind::storage: {
        StoragePayload p;
        p.gb = doc.at("gb").get<double>();
        p.medium = storage_medium_from_string(doc.at("medium").get<std::string>(), "payload.medium");
        p.replicated = doc.at("replicated").get<bool>();
        p.region = doc.at("region").get<std::string>();
        return p;
    }
    }
    throw ValidationError("kind", "unknown event kind");
}

EventKind kind_from_string(std::string_view text) {
    if (text == "compute") return EventKind::compute;
    if (text == "memory") return EventKind::memory;
    if (text == "transfer") return EventKind::transfer;
    if (text == "storage") return EventKind::storage;
    throw ValidationError("kind", "unknown event kind '" + std::string(text) + "'");
}

} // namespace

std::string_view to_string(Mode mode) {
    return mode == Mode::federated ? "federated" : "centralized";
}

Mode mode_from_string(std::string_view text) {
    if (text == "federated") return Mode::federated;
    if (text == "centralized") return Mode::centralized;
    throw ValidationError("mode", "must be federated or centralized, got '" + std::string(text) + "'");
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::compute: return "compute";
    case EventKind::memory: return "memory";
    case EventKind::transfer: return "transfer";
    case EventKind::storage: return "storage";
    }
    return "compute";
}

std::string_view to_string(ComputeUnit unit) { return unit == ComputeUnit::cpu ? "cpu" : "gpu"; }

std::string_view to_string(CoefficientClass cls) {
    return cls == CoefficientClass::internet ? "internet" : "intra_cloud";
}

std::string Actor::to_string() const {
    switch (role) {
    case ActorRole::silo: return "silo-" + std::to_string(silo);
    case ActorRole::orchestrator: return "orchestrator";
    case ActorRole::central: return "central";
    }
    return "central";
}

Actor Actor::parse(std::string_view text) {
    if (text == "orchestrator") return orchestrator();
    if (text == "central") return central();
    if (text.starts_with("silo-")) {
        try {
            std::size_t used = 0;
            const std::string digits(text.substr(5));
            const int index = std::stoi(digits, &used);
            if (used == digits.size() && index >= 0) return silo_at(index);
        } catch (const std::exception&) {
        }
    }
    throw ValidationError("actor", "unknown actor '" + std::string(text) + "'");
}

void sort_events(std::vector<UsageEvent>& events) {
    std::stable_sort(events.begin(), events.end(), [](const UsageEvent& a, const UsageEvent& b) {
        if (a.start_hour != b.start_hour) return a.start_hour < b.start_hour;
        if (a.actor != b.actor) return a.actor < b.actor;
        return a.kind() < b.kind();
    });
}

double wall_clock_of(const std::vector<UsageEvent>& events) {
    double end = 0.0;
    for (const auto& e : events) end = std::max(end, e.end_hour());
    return end;
}

double training_span_hours(const TraceLog& trace) {
    double end = 0.0;
    for (const auto& e : trace.events) {
        if (e.kind() == EventKind::compute) end = std::max(end, e.end_hour());
    }
    return end;
}

std::string export_trace(const TraceLog& trace) {
    std::string out;
    for (const auto& e : trace.events) {
        ordered_json line;
        line["kind"] = to_string(e.kind());
        line["actor"] = e.actor.to_string();
        line["start_hour"] = e.start_hour;
        line["duration_hours"] = e.duration_hours;
        line["payload"] = payload_to_json(e.payload);
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::vector<UsageEvent> import_trace_events(std::string_view text) {
    std::vector<UsageEvent> events;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            const json doc = json::parse(line);
            UsageEvent e;
            const EventKind kind = kind_from_string(doc.at("kind").get<std::string>());
            e.actor = Actor::parse(doc.at("actor").get<std::string>());
            e.start_hour = doc.at("start_hour").get<double>();
            e.duration_hours = doc.at("duration_hours").get<double>();
            e.payload = payload_from_json(kind, doc.at("payload"));
            events.push_back(std::move(e));
        } catch (const json::exception& ex) {
            throw ValidationError("line " + std::to_string(number), ex.what());
        }
    }
    return events;
}

} // namespace flcarbon
