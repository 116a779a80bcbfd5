#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shopx/schema/product.hpp"

namespace shopx::similarity {

enum class MismatchKind { AdditionalAttribute, MissingAttribute, ValueMismatch };

std::string_view to_string(MismatchKind k) noexcept;
MismatchKind parse_mismatch_kind(std::string_view s);

struct Mismatch {
    std::string field_path;
    MismatchKind kind = MismatchKind::ValueMismatch;
    std::optional<std::string> extracted_value;
    std::optional<std::string> expected_value;

    bool operator==(const Mismatch&) const = default;
};

struct SimilarityReport {
    double overall = 1.0;
    /// Indexed like schema::kAllFields.
    std::array<double, 8> per_attribute{1, 1, 1, 1, 1, 1, 1, 1};
    std::vector<Mismatch> mismatches;

    double score(schema::Field f) const;
    bool operator==(const SimilarityReport&) const = default;
};

/// Edit distance over Unicode code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// 1 - distance / max(length), 1.0 for two empty strings.
double string_similarity(std::string_view a, std::string_view b);

/// Scores `extracted` against `reference`. Absent/absent scores 1, a one-sided
/// attribute scores 0, the ingredient statement earns Levenshtein partial
/// credit, and quantities score the mean of their value and unit_code.
SimilarityReport compare(const schema::FoodProduct& extracted, const schema::FoodProduct& reference);

/// One line per mismatch, or "PERFECT MATCH".
std::string render_feedback(const SimilarityReport& report);

nlohmann::json report_to_json(const SimilarityReport& report);
SimilarityReport report_from_json(const nlohmann::json& doc);

} // namespace shopx::similarity
