#include "flcarbon/registry.hpp"

#include "flcarbon/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace flcarbon {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 24> kStopWords = {
    "a",  "an", "and", "are", "as", "at",   "be",   "by",   "for", "from", "in",  "into",
    "is", "it", "of",  "on",  "or", "that", "the",  "this", "to",  "was",  "we",  "with"};

bool is_stop_word(std::string_view token) {
    return std::find(kStopWords.begin(), kStopWords.end(), token) != kStopWords.end();
}

std::string fold_plural(std::string token) {
    const auto ends_with = [&token](std::string_view suffix) { return token.ends_with(suffix); };
    if (token.size() > 4 && ends_with("ies")) {
        token.replace(token.size() - 3, 3, "y");
    } else if (token.size() > 3 && ends_with("s") && !ends_with("ss") && !ends_with("us") &&
               !ends_with("is")) {
        token.pop_back();
    }
    return token;
}

std::int64_t optional_id(const json& value) {
    return value.is_null() ? 0 : value.get<std::int64_t>();
}

} // namespace

std::string_view to_string(RequestState state) {
    switch (state) {
    case RequestState::pending: return "pending";
    case RequestState::approved: return "approved";
    case RequestState::rejected: return "rejected";
    case RequestState::duplicate: return "duplicate";
    }
    return "pending";
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !is_stop_word(current)) tokens.push_back(fold_plural(current));
        current.clear();
    };
    for (const char raw : text) {
        const auto ch = static_cast<unsigned char>(raw);
        if (std::isspace(ch)) {
            flush();
        } else if (!std::ispunct(ch)) {
            current.push_back(static_cast<char>(std::tolower(ch)));
        }
    }
    flush();
    return tokens;
}

double text_similarity(std::string_view a, std::string_view b) {
    std::unordered_map<std::string, double> fa;
    std::unordered_map<std::string, double> fb;
    for (auto& t : tokenize(a)) fa[t] += 1.0;
    for (auto& t : tokenize(b)) fb[t] += 1.0;
    if (fa.empty() || fb.empty()) return 0.0;
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [term, count] : fa) {
        na += count * count;
        if (auto it = fb.find(term); it != fb.end()) dot += count * it->second;
    }
    for (const auto& [term, count] : fb) nb += count * count;
    // Counts are integers, so the dot product and norms are exact. A single
    // square root keeps identical texts at exactly 1.
    return std::min(1.0, dot / std::sqrt(na * nb));
}

std::vector<Match> redundancy_check(const AccessRequest& request,
                                    std::span<const AccessRequest> history, double threshold,
                                    const SimilarityFn& scorer) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ValidationError("threshold", "must lie in [0, 1]");
    }
    std::vector<Match> matches;
    for (const auto& past : history) {
        if (past.id == request.id || past.state != RequestState::approved) continue;
        const double score = scorer(request.description, past.description);
        if (score >= threshold) matches.push_back({past.id, score});
    }
    std::stable_sort(matches.begin(), matches.end(), [](const Match& x, const Match& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.id < y.id;
    });
    return matches;
}

RequestStore RequestStore::open(const std::string& path) {
    RequestStore store;
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        if (!in) throw RegistryError("cannot read registry log " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        store = replay(buffer.str());
    }
    store.path_ = path;
    return store;
}

RequestStore RequestStore::replay(std::string_view log_text) {
    RequestStore store;
    std::istringstream in{std::string(log_text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        store.apply(line);
        store.log_ += line;
        store.log_ += '\n';
    }
    return store;
}

const AccessRequest& RequestStore::submit(const std::string& description,
                                          const std::vector<std::string>& dataset_ids,
                                          const std::string& owner) {
    const bool blank = std::all_of(description.begin(), description.end(),
                                   [](unsigned char c) { return std::isspace(c); });
    if (blank) throw ValidationError("description", "must be nonempty");
    const std::int64_t id = requests_.empty() ? 1 : requests_.rbegin()->first + 1;
    ordered_json rec;
    rec["id"] = id;
    rec["transition"] = "submit";
    rec["owner"] = owner;
    rec["description"] = description;
    rec["dataset_ids"] = dataset_ids;
    rec["tier"] = nullptr;
    rec["of_id"] = nullptr;
    record(rec.dump());
    return requests_.at(id);
}

const AccessRequest& RequestStore::approve(std::int64_t id, double total_size_gb) {
    pending(id);
    if (!(std::isfinite(total_size_gb) && total_size_gb > 0.0)) {
        throw ValidationError("total_size_gb", "must be > 0");
    }
    ordered_json rec;
    rec["id"] = id;
    rec["transition"] = "approve";
    rec["owner"] = nullptr;
    rec["description"] = nullptr;
    rec["dataset_ids"] = nullptr;
    rec["tier"] = to_string(cluster_tier_for(total_size_gb).tier);
    rec["of_id"] = nullptr;
    record(rec.dump());
    return requests_.at(id);
}

const AccessRequest& RequestStore::reject(std::int64_t id) {
    pending(id);
    ordered_json rec;
    rec["id"] = id;
    rec["transition"] = "reject";
    rec["owner"] = nullptr;
    rec["description"] = nullptr;
    rec["dataset_ids"] = nullptr;
    rec["tier"] = nullptr;
    rec["of_id"] = nullptr;
    record(rec.dump());
    return requests_.at(id);
}

DuplicateResult RequestStore::mark_duplicate(std::int64_t id, std::int64_t of_id) {
    ordered_json rec;
    rec["id"] = id;
    rec["transition"] = "duplicate";
    rec["owner"] = nullptr;
    rec["description"] = nullptr;
    rec["dataset_ids"] = nullptr;
    rec["tier"] = nullptr;
    rec["of_id"] = of_id;
    record(rec.dump());
    return {requests_.at(id), requests_.at(of_id).owner};
}

const AccessRequest& RequestStore::get(std::int64_t id) const {
    auto it = requests_.find(id);
    if (it == requests_.end()) throw RegistryError("no request with id " + std::to_string(id));
    return it->second;
}

std::vector<AccessRequest> RequestStore::requests() const {
    std::vector<AccessRequest> out;
    for (const auto& [id, request] : requests_) out.push_back(request);
    return out;
}

AccessRequest& RequestStore::pending(std::int64_t id) {
    auto it = requests_.find(id);
    if (it == requests_.end()) throw RegistryError("no request with id " + std::to_string(id));
    if (it->second.state != RequestState::pending) {
        throw RegistryError("request " + std::to_string(id) + " is " +
                            std::string(to_string(it->second.state)) + ", not pending");
    }
    return it->second;
}

void RequestStore::record(const std::string& line) {
    apply(line);
    log_ += line;
    log_ += '\n';
    if (path_) {
        std::ofstream out(*path_, std::ios::app);
        if (!out) throw RegistryError("cannot append to registry log " + *path_);
        out << line << '\n';
    }
}

// The single state machine shared by live operations and replay.
void RequestStore::apply(const std::string& line) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::parse_error& e) {
        throw RegistryError(std::string("corrupt registry record: ") + e.what());
    }
    try {
        const std::int64_t id = rec.at("id").get<std::int64_t>();
        const std::string transition = rec.at("transition").get<std::string>();
        if (transition == "submit") {
            const std::int64_t expected = requests_.empty() ? 1 : requests_.rbegin()->first + 1;
            if (id != expected) {
                throw RegistryError("submit record id " + std::to_string(id) + " breaks id order (expected " +
                                    std::to_string(expected) + ")");
            }
            AccessRequest r;
            r.id = id;
            r.owner = rec.at("owner").get<std::string>();
            r.description = rec.at("description").get<std::string>();
            r.dataset_ids = rec.at("dataset_ids").get<std::vector<std::string>>();
            r.submitted_at = clock_;
            requests_.emplace(id, std::move(r));
        } else if (transition == "approve") {
            pending(id).assigned_tier = tier_from_string(rec.at("tier").get<std::string>());
            requests_.at(id).state = RequestState::approved;
        } else if (transition == "reject") {
            pending(id).state = RequestState::rejected;
        } else if (transition == "duplicate") {
            const std::int64_t of_id = optional_id(rec.at("of_id"));
            auto target = requests_.find(of_id);
            if (target == requests_.end()) {
                throw RegistryError("duplicate target " + std::to_string(of_id) + " does not exist");
            }
            if (target->second.state != RequestState::approved) {
                throw RegistryError("duplicate target " + std::to_string(of_id) + " is " +
                                    std::string(to_string(target->second.state)) + ", not approved");
            }
            AccessRequest& r = pending(id);
            r.state = RequestState::duplicate;
            r.duplicate_of = of_id;
        } else {
            throw RegistryError("unknown transition '" + transition + "'");
        }
    } catch (const json::exception& e) {
        throw RegistryError(std::string("malformed registry record: ") + e.what());
    } catch (const ValidationError& e) {
        throw RegistryError(std::string("malformed registry record: ") + e.what());
    }
    ++clock_;
}

} // namespace flcarbon
