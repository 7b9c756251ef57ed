#pragma once

// Report serialisation: structured (JSON) documents plus flat CSV, with a text
// table rendered from the structured form.

#include "flcarbon/accounting.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace flcarbon {

struct Provenance {
    std::string tool_version;
    std::string scenario_digest;
    std::uint64_t seed = 0;
    std::string factors_digest;
};

// "sha256:<hex>" of the given bytes.
std::string sha256_digest(std::string_view bytes);

// Digests are taken over the canonical serialisations, so formatting of the
// input file does not matter.
Provenance make_provenance(const Scenario& scenario, std::uint64_t seed);

nlohmann::ordered_json provenance_to_json(const Provenance& provenance);
nlohmann::ordered_json report_to_json(const EmissionReport& report);
nlohmann::ordered_json comparison_to_json(const ComparisonReport& comparison);

// The six emission categories, in report order.
const std::vector<std::string>& emission_categories();

// One row per (mode, category). A nonempty `scale` adds a leading column.
std::string csv_header(bool with_scale);
std::string report_csv_rows(const EmissionReport& report, const std::string& scale = {});

// Text table of a structured report or comparison document. Values are
// read back from the document, never recomputed.
std::string render_table(const nlohmann::ordered_json& document);

} // namespace flcarbon
