#include "shopx/similarity/similarity.hpp"

#include <algorithm>
#include <numeric>

#include "shopx/common/error.hpp"
#include "shopx/common/text.hpp"

namespace shopx::similarity {

using nlohmann::json;
using schema::Field;
using schema::FoodProduct;
using schema::QuantitativeValue;

std::string_view to_string(MismatchKind k) noexcept {
    switch (k) {
    case MismatchKind::AdditionalAttribute: return "AdditionalAttribute";
    case MismatchKind::MissingAttribute: return "MissingAttribute";
    case MismatchKind::ValueMismatch: return "ValueMismatch";
    }
    return "";
}

MismatchKind parse_mismatch_kind(std::string_view s) {
    for (auto k : {MismatchKind::AdditionalAttribute, MismatchKind::MissingAttribute, MismatchKind::ValueMismatch}) {
        if (to_string(k) == s) return k;
    }
    throw Error("unknown mismatch kind '" + std::string(s) + "'");
}

double SimilarityReport::score(Field f) const { return per_attribute[static_cast<std::size_t>(f)]; }

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, sub});
            diag = up;
        }
    }
    return row[b.size()];
}

double string_similarity(std::string_view a, std::string_view b) {
    std::u32string ua = text::utf8_decode(a);
    std::u32string ub = text::utf8_decode(b);
    std::size_t longest = std::max(ua.size(), ub.size());
    if (longest == 0) return 1.0;
    double s = 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
    return std::max(0.0, s);
}

namespace {

std::string show(const QuantitativeValue& qv) {
    std::string out = text::format_decimal(qv.value);
    if (qv.unit_code) out += " " + *qv.unit_code;
    return out;
}

// Scores one primitive slot, recording a mismatch when it is not a full match.
template <class T, class Eq, class Show>
double score_slot(const std::optional<T>& got, const std::optional<T>& want, const std::string& path, Eq eq, Show show_fn,
                  std::vector<Mismatch>& out) {
    if (!got && !want) return 1.0;
    if (got && !want) {
        out.push_back({path, MismatchKind::AdditionalAttribute, show_fn(*got), std::nullopt});
        return 0.0;
    }
    if (!got) {
        out.push_back({path, MismatchKind::MissingAttribute, std::nullopt, show_fn(*want)});
        return 0.0;
    }
    double s = eq(*got, *want);
    if (s < 1.0) out.push_back({path, MismatchKind::ValueMismatch, show_fn(*got), show_fn(*want)});
    return s;
}

double score_quantity(const std::optional<QuantitativeValue>& got, const std::optional<QuantitativeValue>& want,
                      const std::string& path, std::vector<Mismatch>& out) {
    if (!got || !want) {
        return score_slot(got, want, path, [](const auto&, const auto&) { return 1.0; }, show, out);
    }
    auto same_number = [](double a, double b) { return a == b ? 1.0 : 0.0; };
    auto same_unit = [](const std::string& a, const std::string& b) { return text::iequals(a, b) ? 1.0 : 0.0; };
    auto num = [](double d) { return text::format_decimal(d); };
    auto str = [](const std::string& s) { return s; };
    double v = score_slot(std::optional<double>(got->value), std::optional<double>(want->value), path + ".value",
                          same_number, num, out);
    double u = score_slot(got->unit_code, want->unit_code, path + ".unit_code", same_unit, str, out);
    return (v + u) / 2.0;
}

} // namespace

SimilarityReport compare(const FoodProduct& extracted, const FoodProduct& reference) {
    SimilarityReport r;
    auto str = [](const std::string& s) { return s; };
    r.per_attribute[0] = score_slot(extracted.ingredient_statement, reference.ingredient_statement,
                                    "ingredient_statement",
                                    [](const std::string& a, const std::string& b) {
                                        // Distinct invalid UTF-8 may decode identically; keep it a mismatch.
                                        return a == b ? 1.0 : std::min(string_similarity(a, b), 1.0 - 1e-9);
                                    },
                                    str, r.mismatches);
    for (Field f : schema::kNutrientFields) {
        r.per_attribute[static_cast<std::size_t>(f)] = score_quantity(
            schema::nutrient(extracted, f), schema::nutrient(reference, f), std::string(schema::field_name(f)), r.mismatches);
    }
    double sum = 0.0;
    for (double s : r.per_attribute) sum += s;
    r.overall = sum / static_cast<double>(r.per_attribute.size());
    return r;
}

std::string render_feedback(const SimilarityReport& report) {
    if (report.mismatches.empty()) return "PERFECT MATCH";
    std::string out;
    for (const auto& m : report.mismatches) {
        if (!out.empty()) out += '\n';
        out += "- " + m.field_path + ": ";
        switch (m.kind) {
        case MismatchKind::AdditionalAttribute:
            out += "additional attribute, expected nothing but extracted \"" + *m.extracted_value + "\"";
            break;
        case MismatchKind::MissingAttribute:
            out += "missing attribute, expected \"" + *m.expected_value + "\" but extracted nothing";
            break;
        case MismatchKind::ValueMismatch:
            out += "value mismatch, expected \"" + *m.expected_value + "\" but extracted \"" + *m.extracted_value + "\"";
            break;
        }
    }
    return out;
}

json report_to_json(const SimilarityReport& report) {
    json per = json::object();
    for (Field f : schema::kAllFields) per[std::string(schema::field_name(f))] = report.score(f);
    json mismatches = json::array();
    for (const auto& m : report.mismatches) {
        json j = {{"field_path", m.field_path}, {"kind", to_string(m.kind)}};
        j["extracted_value"] = m.extracted_value ? json(*m.extracted_value) : json(nullptr);
        j["expected_value"] = m.expected_value ? json(*m.expected_value) : json(nullptr);
        mismatches.push_back(std::move(j));
    }
    return {{"overall", report.overall}, {"per_attribute", std::move(per)}, {"mismatches", std::move(mismatches)}};
}

SimilarityReport report_from_json(const json& doc) {
    SimilarityReport r;
    r.overall = doc.at("overall").get<double>();
    for (Field f : schema::kAllFields) {
        r.per_attribute[static_cast<std::size_t>(f)] = doc.at("per_attribute").at(std::string(schema::field_name(f))).get<double>();
    }
    for (const auto& j : doc.at("mismatches")) {
        Mismatch m;
        m.field_path = j.at("field_path").get<std::string>();
        m.kind = parse_mismatch_kind(j.at("kind").get<std::string>());
        if (!j.at("extracted_value").is_null()) m.extracted_value = j["extracted_value"].get<std::string>();
        if (!j.at("expected_value").is_null()) m.expected_value = j["expected_value"].get<std::string>();
        r.mismatches.push_back(std::move(m));
    }
    return r;
}

} // namespace shopx::similarity
