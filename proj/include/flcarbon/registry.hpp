#pragma once

// Data-access request workflow: use cases are submitted to data owners,
// checked for redundancy against approved history, then approved with a
// right-sized cluster tier, rejected, or marked as a duplicate of an
// existing application. State is event-sourced from an append-only log.

#include "flcarbon/scenario.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flcarbon {

enum class RequestState { pending, approved, rejected, duplicate };

std::string_view to_string(RequestState state);

struct AccessRequest {
    std::int64_t id = 0;
    std::string owner;
    std::string description;
    std::vector<std::string> dataset_ids;
    RequestState state = RequestState::pending;
    // Set when state == duplicate.
    std::optional<std::int64_t> duplicate_of;
    std::optional<Tier> assigned_tier;
    // Logical clock: log position of the submission.
    std::int64_t submitted_at = 0;

    bool operator==(const AccessRequest&) const = default;
};

// Lowercased, punctuation-stripped, whitespace-split tokens with English
// stop words dropped and plurals folded ("bookings" -> "booking").
std::vector<std::string> tokenize(std::string_view text);

// Cosine similarity of term-frequency vectors of the two token lists.
double text_similarity(std::string_view a, std::string_view b);

// Scorer seam: a model-backed comparison can replace the lexical baseline.
using SimilarityFn = std::function<double(std::string_view, std::string_view)>;

struct Match {
    std::int64_t id = 0;
    double score = 0.0;
    bool operator==(const Match&) const = default;
};

inline constexpr double kDefaultSimilarityThreshold = 0.8;

// Approved requests from `history` (other than `request` itself) scoring at
// least `threshold`, best first; equal scores list the older id first.
std::vector<Match> redundancy_check(const AccessRequest& request,
                                    std::span<const AccessRequest> history, double threshold,
                                    const SimilarityFn& scorer = text_similarity);

struct DuplicateResult {
    AccessRequest request;
    // Owner of the existing application, surfaced so the requester can get
    // in touch instead of duplicating it.
    std::string existing_owner;
};

class RequestStore {
public:
    // In-memory store with no backing file.
    RequestStore() = default;

    // Replays `path` if it exists; every later transition is appended to it.
    static RequestStore open(const std::string& path);

    // Rebuilds a store from log text.
    static RequestStore replay(std::string_view log_text);

    const AccessRequest& submit(const std::string& description,
                                const std::vector<std::string>& dataset_ids,
                                const std::string& owner);
    const AccessRequest& approve(std::int64_t id, double total_size_gb);
    const AccessRequest& reject(std::int64_t id);
    DuplicateResult mark_duplicate(std::int64_t id, std::int64_t of_id);

    const AccessRequest& get(std::int64_t id) const;
    std::vector<AccessRequest> requests() const;
    const std::string& log_text() const { return log_; }
    std::int64_t clock() const { return clock_; }

    bool operator==(const RequestStore& other) const {
        return requests_ == other.requests_ && clock_ == other.clock_ && log_ == other.log_;
    }

private:
    void apply(const std::string& line);
    void record(const std::string& line);
    AccessRequest& pending(std::int64_t id);

    std::map<std::int64_t, AccessRequest> requests_;
    std::int64_t clock_ = 0;
    std::string log_;
    std::optional<std::string> path_;
};

} // namespace flcarbon
