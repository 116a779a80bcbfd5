#include <functional>
#include <random>

#include "doctest.h"
#include "similarity_table.hpp"
#include "shopx/common/text.hpp"

using namespace shopx;
using namespace shopx::similarity;
using schema::FoodProduct;
using schema::QuantitativeValue;
using shopx::testing::Slot;

namespace {

// Textbook recursive definition, only usable on short inputs.
std::size_t naive_distance(const std::u32string& a, const std::u32string& b) {
    std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == 0) return j;
        if (j == 0) return i;
        std::size_t best = std::min(d(i - 1, j) + 1, d(i, j - 1) + 1);
        return std::min(best, d(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1));
    };
    return d(a.size(), b.size());
}

FoodProduct random_product(std::mt19937& rng) {
    static const std::vector<std::string> statements = {"Zucker", "Zucker, Salz", "Äpfel", "Mehl, Wasser, Hefe", ""};
    static const std::vector<std::string> units = {"GRM", "MGM", "KJO", "grm"};
    std::uniform_int_distribution<int> coin(0, 1);
    FoodProduct p;
    if (coin(rng)) p.ingredient_statement = statements[rng() % statements.size()];
    for (auto f : schema::kNutrientFields) {
        if (!coin(rng)) continue;
        QuantitativeValue qv{static_cast<double>(rng() % 50) / 2.0, std::nullopt};
        if (coin(rng)) qv.unit_code = units[rng() % units.size()];
        schema::nutrient(p, f) = qv;
    }
    return p;
}

} // namespace

TEST_CASE("levenshtein agrees with the recursive definition") {
    const std::vector<std::string> words = {"", "a", "ab", "ba", "Zucker", "Zuker", "Salz", "Säl", "kitten", "sitting"};
    for (const auto& a : words) {
        for (const auto& b : words) {
            auto ua = text::utf8_decode(a);
            auto ub = text::utf8_decode(b);
            CHECK(levenshtein(ua, ub) == naive_distance(ua, ub));
        }
    }
    CHECK(string_similarity("Zucker", "Zucker, Salz") == 0.5);
    CHECK(string_similarity("", "") == 1.0);
    CHECK(string_similarity("abc", "") == 0.0);
}

TEST_CASE("worked examples") {
    FoodProduct ref = shopx::testing::full_reference_product();
    auto same = compare(ref, ref);
    CHECK(same.overall == 1.0);
    CHECK(same.mismatches.empty());

    FoodProduct no_salt = ref;
    no_salt.salt.reset();
    auto seven = compare(no_salt, ref);
    CHECK(seven.overall == 0.875);
    REQUIRE(seven.mismatches.size() == 1);
    CHECK(seven.mismatches[0].kind == MismatchKind::MissingAttribute);
    CHECK(seven.mismatches[0].field_path == "salt");

    FoodProduct wrong_unit = ref;
    wrong_unit.fat = QuantitativeValue{31.0, "MGM"};
    auto unit = compare(wrong_unit, ref);
    CHECK(unit.score(schema::Field::Fat) == 0.5);
    CHECK(unit.overall == 0.9375);
    REQUIRE(unit.mismatches.size() == 1);
    CHECK(unit.mismatches[0].kind == MismatchKind::ValueMismatch);
    CHECK(unit.mismatches[0].field_path == "fat.unit_code");
}

TEST_CASE("two-field products match the hand-computed table") {
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            Slot si = shopx::testing::kSlots[i];
            Slot sj = shopx::testing::kSlots[j];
            auto pair = shopx::testing::build_pair(si, sj);
            auto r = compare(pair.extracted, pair.reference);
            INFO("row " << i << " col " << j);
            CHECK(r.overall == shopx::testing::kOverall[i][j]);
            CHECK(static_cast<int>(r.mismatches.size()) == shopx::testing::kMismatchCount[i][j]);
            std::vector<MismatchKind> kinds;
            for (const auto& m : r.mismatches) kinds.push_back(m.kind);
            std::vector<MismatchKind> want;
            if (auto k = shopx::testing::expected_kind(si)) want.push_back(*k);
            if (auto k = shopx::testing::expected_kind(sj)) want.push_back(*k);
            CHECK(kinds == want);
        }
    }
}

TEST_CASE("unit codes compare case-insensitively and numbers exactly") {
    FoodProduct a;
    FoodProduct b;
    a.fat = QuantitativeValue{1.5, "grm"};
    b.fat = QuantitativeValue{1.5, "GRM"};
    CHECK(compare(a, b).overall == 1.0);
    a.fat->value = 1.5000001;
    CHECK(compare(a, b).overall < 1.0);
    a.fat = QuantitativeValue{1.5, std::nullopt};
    auto r = compare(a, b);
    REQUIRE(r.mismatches.size() == 1);
    CHECK(r.mismatches[0].field_path == "fat.unit_code");
    CHECK(r.mismatches[0].kind == MismatchKind::MissingAttribute);
}

TEST_CASE("random products satisfy the report invariants") {
    std::mt19937 rng(99);
    for (int i = 0; i < 2000; ++i) {
        FoodProduct x = random_product(rng);
        FoodProduct y = random_product(rng);
        CHECK(compare(x, x).overall == 1.0);
        auto r = compare(x, y);
        double sum = 0;
        for (double s : r.per_attribute) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            sum += s;
        }
        CHECK(r.overall == doctest::Approx(sum / 8.0).epsilon(1e-12));
        CHECK((r.overall == 1.0) == r.mismatches.empty());

        // Dropping an attribute that matched never helps.
        for (auto f : schema::kNutrientFields) {
            if (!schema::nutrient(x, f) || schema::nutrient(x, f) != schema::nutrient(y, f)) continue;
            FoodProduct fewer = x;
            schema::nutrient(fewer, f).reset();
            CHECK(compare(fewer, y).overall <= r.overall);
        }
    }
}

TEST_CASE("feedback rendering") {
    CHECK(render_feedback(SimilarityReport{}) == "PERFECT MATCH");

    FoodProduct ref = shopx::testing::full_reference_product();
    FoodProduct got = ref;
    got.salt.reset();
    std::string one = render_feedback(compare(got, ref));
    CHECK(one == "- salt: missing attribute, expected \"0.24 GRM\" but extracted nothing");

    got.ingredient_statement = "Zutaten: Zucker";
    got.fat = QuantitativeValue{30.0, "GRM"};
    auto three = compare(got, ref);
    REQUIRE(three.mismatches.size() == 3);
    std::string text = render_feedback(three);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("fat.value: value mismatch, expected \"31\" but extracted \"30\"") != std::string::npos);
}

TEST_CASE("report JSON round trip") {
    FoodProduct ref = shopx::testing::full_reference_product();
    FoodProduct got = ref;
    got.energy.reset();
    got.protein = QuantitativeValue{6.0, "GRM"};
    auto r = compare(got, ref);
    auto back = report_from_json(nlohmann::json::parse(report_to_json(r).dump()));
    CHECK(back == r);
}
