#pragma once

// Resource-usage events produced by simulating one deployment style.

#include "flcarbon/emission_model.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace flcarbon {

enum class Mode { federated, centralized };
enum class EventKind { compute, memory, transfer, storage };
enum class ComputeUnit { cpu, gpu };
enum class CoefficientClass { internet, intra_cloud };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view text);
std::string_view to_string(EventKind kind);
std::string_view to_string(ComputeUnit unit);
std::string_view to_string(CoefficientClass cls);

enum class ActorRole { silo, orchestrator, central };

// Tie-break order: silos by index, then the orchestrator, then central.
struct Actor {
    ActorRole role = ActorRole::central;
    int silo = -1;

    static Actor silo_at(int index) { return {ActorRole::silo, index}; }
    static Actor orchestrator() { return {ActorRole::orchestrator, -1}; }
    static Actor central() { return {ActorRole::central, -1}; }

    std::string to_string() const;
    static Actor parse(std::string_view text);

    auto operator<=>(const Actor&) const = default;
};

struct ComputePayload {
    ComputeUnit unit = ComputeUnit::cpu;
    ComputeSpec spec;
    bool operator==(const ComputePayload&) const = default;
};

struct MemoryPayload {
    double gb = 0.0;
    bool operator==(const MemoryPayload&) const = default;
};

struct TransferPayload {
    double gb = 0.0;
    std::string src_region;
    std::string dst_region;
    CoefficientClass coefficient_class = CoefficientClass::internet;
    // Exact byte count, kept alongside gb so byte totals sum without rounding.
    std::int64_t bytes = 0;
    bool operator==(const TransferPayload&) const = default;
};

struct StoragePayload {
    double gb = 0.0;
    StorageMedium medium = StorageMedium::ssd;
    bool replicated = false;
    std::string region;
    bool operator==(const StoragePayload&) const = default;
};

using EventPayload = std::variant<ComputePayload, MemoryPayload, TransferPayload, StoragePayload>;

struct UsageEvent {
    Actor actor;
    double start_hour = 0.0;
    double duration_hours = 0.0;
    EventPayload payload;

    EventKind kind() const { return static_cast<EventKind>(payload.index()); }
    double end_hour() const { return start_hour + duration_hours; }

    bool operator==(const UsageEvent&) const = default;
};

struct FinalModel {
    std::vector<double> weights;
    double training_loss = 0.0;
    double eval_loss = 0.0;
    bool operator==(const FinalModel&) const = default;
};

struct TraceLog {
    std::vector<UsageEvent> events;
    Mode mode = Mode::federated;
    double wall_clock_hours = 0.0;
    FinalModel final_model;

    bool operator==(const TraceLog&) const = default;
};

// Stable sort by start hour, ties broken on (actor, kind).
void sort_events(std::vector<UsageEvent>& events);

// max over events of start + duration; 0 for an empty list.
double wall_clock_of(const std::vector<UsageEvent>& events);

// Latest end of any compute event: the training span, excluding data
// retention.
double training_span_hours(const TraceLog& trace);

// Line-delimited export, one event per line, fields in the order
// kind, actor, start_hour, duration_hours, payload.
std::string export_trace(const TraceLog& trace);
std::vector<UsageEvent> import_trace_events(std::string_view text);

} // namespace flcarbon
