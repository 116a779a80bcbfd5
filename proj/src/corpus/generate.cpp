#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "shopx/common/hash.hpp"
#include "shopx/corpus/corpus.hpp"

namespace shopx::corpus {

namespace {

using schema::Field;
using schema::QuantitativeValue;

// mt19937_64 output is fixed by the standard; distributions are not, so draws
// go through these helpers to keep corpora identical across standard libraries.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }
bool chance(std::mt19937_64& rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[below(rng, v.size())];
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Fixed-point rendering of hundredths with the template's decimal mark.
std::string fixed(long long hundredths, int decimals, bool comma) {
    long long whole = hundredths / 100;
    long long frac = hundredths % 100;
    std::string s = std::to_string(whole);
    if (decimals == 0) return s;
    s += comma ? ',' : '.';
    if (decimals == 1) s += std::to_string(frac / 10);
    else s += (frac < 10 ? "0" : "") + std::to_string(frac);
    return s;
}

struct NutrientRow {
    Field field;
    const char* key;
    const char* label;
};

const std::vector<NutrientRow>& nutrient_rows() {
    static const std::vector<NutrientRow> rows = {
        {Field::Energy, "energy", ""},
        {Field::Fat, "fat", "Fett"},
        {Field::SaturatedFat, "saturates", "davon gesättigte Fettsäuren"},
        {Field::Carbohydrates, "carbs", "Kohlenhydrate"},
        {Field::Sugars, "sugars", "davon Zucker"},
        {Field::Protein, "protein", "Eiweiß"},
        {Field::Salt, "salt", "Salz"},
    };
    return rows;
}

struct PackagedItem {
    const char* name;
    const char* category;
};

const std::vector<PackagedItem> kPackaged = {
    {"Vollmilch Schokolade", "Süßwaren"},      {"Zartbitter Schokolade 70 %", "Süßwaren"},
    {"Haferkekse", "Süßwaren"},                {"Butterkekse", "Süßwaren"},
    {"Erdnussflips", "Knabbereien"},           {"Paprika Chips", "Knabbereien"},
    {"Tomatensauce Basilikum", "Konserven"},   {"Linsensuppe", "Konserven"},
    {"Müsli Nuss & Frucht", "Frühstück"},      {"Cornflakes", "Frühstück"},
    {"Erdbeer Konfitüre", "Frühstück"},        {"Haselnusscreme", "Frühstück"},
    {"Vollkornbrot", "Backwaren"},             {"Laugenbrezeln", "Backwaren"},
    {"Fruchtjoghurt Kirsche", "Kühlregal"},    {"Kräuterquark", "Kühlregal"},
    {"Gouda jung in Scheiben", "Kühlregal"},   {"Geflügelwurst", "Kühlregal"},
    {"Spaghetti", "Teigwaren"},                {"Fusilli Vollkorn", "Teigwaren"},
    {"Apfelschorle", "Getränke"},              {"Eistee Pfirsich", "Getränke"},
    {"Pizza Margherita", "Tiefkühl"},          {"Gemüsepfanne", "Tiefkühl"},
};

const std::vector<const char*> kFresh = {
    "Braeburn Äpfel",   "Bio Bananen",   "Strauchtomaten", "Salatgurke",   "Zitronen",
    "Kartoffeln festkochend", "Karotten", "Eisbergsalat",  "Champignons", "Rispentomaten",
    "Weintrauben hell", "Birnen Conference", "Avocado", "Paprika rot", "Zucchini",
};

const std::vector<const char*> kIngredients = {
    "Zucker", "Weizenmehl", "Kakaobutter", "Vollmilchpulver", "Palmfett", "Rapsöl", "Sonnenblumenöl",
    "Haferflocken", "Glukosesirup", "Salz", "Hefe", "Wasser", "Tomatenmark", "Basilikum", "Zwiebeln",
    "Knoblauch", "Magermilchpulver", "Butterreinfett", "Haselnüsse", "Erdnüsse", "Kakaomasse",
    "Emulgator: Lecithine (Soja)", "Säuerungsmittel: Citronensäure", "Backtriebmittel: Natriumcarbonate",
    "Aroma", "natürliches Vanillearoma", "Maisstärke", "Hühnerfleisch", "Gewürze", "Paprikapulver",
    "Speisesalz", "Apfelsaft aus Apfelsaftkonzentrat", "Kirschen", "Joghurt", "Speisequark", "Petersilie",
};

const std::vector<const char*> kDescriptions = {
    "Ein Klassiker für jeden Tag.",
    "Ideal für die ganze Familie.",
    "Aus nachhaltigem Anbau.",
    "Jetzt im Angebot, solange der Vorrat reicht.",
    "Kühl und trocken lagern.",
    "Nach dem Öffnen bald verbrauchen.",
    "Regional hergestellt.",
};

const std::vector<const char*> kNavigation = {"Angebote", "Obst & Gemüse", "Kühlregal", "Getränke",
                                              "Süßwaren", "Drogerie", "Haushalt", "Marken"};

std::string ingredient_statement(std::mt19937_64& rng) {
    std::vector<std::string> pool(kIngredients.begin(), kIngredients.end());
    shuffle(pool, rng);
    std::size_t n = 3 + below(rng, 6);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += pool[i];
        if (i == 1 && chance(rng, 0.4)) out += " (" + std::to_string(5 + below(rng, 40)) + " %)";
    }
    if (chance(rng, 0.5)) out += '.';
    return out;
}

struct Amounts {
    long long hundredths[7] = {}; // per nutrient row; slot 0 (energy) unused
    long long energy_kj = 0;
    long long energy_kcal = 0;
};

Amounts draw_amounts(std::mt19937_64& rng) {
    Amounts a;
    long long fat = static_cast<long long>(below(rng, 401)) * 10;
    long long sat = fat == 0 ? 0 : static_cast<long long>(below(rng, static_cast<std::uint64_t>(fat / 10) + 1)) * 10;
    long long carbs = static_cast<long long>(below(rng, 801)) * 10;
    long long sugars = carbs == 0 ? 0 : static_cast<long long>(below(rng, static_cast<std::uint64_t>(carbs / 10) + 1)) * 10;
    long long protein = static_cast<long long>(below(rng, 301)) * 10;
    long long salt = static_cast<long long>(below(rng, 301));
    a.energy_kj = (37 * fat + 17 * carbs + 17 * protein) / 100;
    a.energy_kcal = (a.energy_kj * 1000 + 2092) / 4184;
    a.hundredths[1] = fat;
    a.hundredths[2] = sat;
    a.hundredths[3] = carbs;
    a.hundredths[4] = sugars;
    a.hundredths[5] = protein;
    a.hundredths[6] = salt;
    return a;
}

std::string row_text(const TemplateSpec& t, std::size_t row, const Amounts& a) {
    if (row == 0) {
        if (t.energy_in_kcal) return std::to_string(a.energy_kcal) + " kcal (" + std::to_string(a.energy_kj) + " kJ)";
        return std::to_string(a.energy_kj) + " kJ / " + std::to_string(a.energy_kcal) + " kcal";
    }
    return fixed(a.hundredths[row], row == 6 ? 2 : 1, t.decimal_comma) + " g";
}

QuantitativeValue row_truth(const TemplateSpec& t, std::size_t row, const Amounts& a) {
    if (row == 0) {
        return t.energy_in_kcal ? QuantitativeValue{static_cast<double>(a.energy_kcal), "E14"}
                                : QuantitativeValue{static_cast<double>(a.energy_kj), "KJO"};
    }
    if (row == 6) return {static_cast<double>(a.hundredths[row]) / 100.0, "GRM"};
    return {static_cast<double>(a.hundredths[row] / 10) / 10.0, "GRM"};
}

std::string row_label(const TemplateSpec& t, std::size_t row) {
    return row == 0 ? t.energy_label : nutrient_rows()[row].label;
}

std::string nutrition_block(const TemplateSpec& t, const std::vector<std::size_t>& rows, const Amounts& a) {
    const std::string& p = t.class_prefix;
    std::string h;
    switch (t.layout) {
    case NutritionLayout::Table:
        h += "<section class=\"" + p + "-nutrition\"><h2>" + escape(t.nutrition_heading) + "</h2>";
        h += "<table class=\"" + p + "-nutri-table\" cellspacing=\"0\"><thead><tr><th></th><th>pro 100 g</th></tr></thead><tbody>";
        for (std::size_t r : rows) {
            h += "<tr class=\"" + p + "-n-" + nutrient_rows()[r].key + "\"><td class=\"" + p + "-lbl\">" +
                 escape(row_label(t, r)) + "</td><td class=\"" + p + "-val\" style=\"text-align:right\">" +
                 escape(row_text(t, r, a)) + "</td></tr>";
        }
        h += "</tbody></table></section>";
        break;
    case NutritionLayout::DefinitionList:
        h += "<div class=\"" + p + "-nutrition\" data-tab=\"facts\"><h3>" + escape(t.nutrition_heading) + "</h3>";
        h += "<dl class=\"" + p + "-facts\">";
        for (std::size_t r : rows) {
            h += "<dt>" + escape(row_label(t, r)) + "</dt><dd class=\"" + p + "-" + nutrient_rows()[r].key + "\">" +
                 escape(row_text(t, r, a)) + "</dd>";
        }
        h += "</dl></div>";
        break;
    case NutritionLayout::DivGrid:
        h += "<div class=\"" + p + "-nutri\"><div class=\"" + p + "-nutri-head\"><strong>" +
             escape(t.nutrition_heading) + "</strong></div>";
        for (std::size_t r : rows) {
            h += "<div class=\"" + p + "-row " + p + "-row-" + nutrient_rows()[r].key + "\"><span class=\"" + p +
                 "-name\">" + escape(row_label(t, r)) + "</span> <span class=\"" + p + "-amt\">" +
                 escape(row_text(t, r, a)) + "</span></div>";
        }
        h += "</div>";
        break;
    }
    return h;
}

std::string ingredient_block(const TemplateSpec& t, const std::string& statement) {
    const std::string& p = t.class_prefix;
    std::string h = "<div class=\"" + p + "-ingredients-box\">";
    if (t.ingredient_label_inline) {
        h += "<p class=\"" + p + "-ingredients\"><b>" + escape(t.ingredient_label) + ":</b> " + escape(statement) + "</p>";
    } else {
        h += "<h3 class=\"" + p + "-subhead\">" + escape(t.ingredient_label) + "</h3><p class=\"" + p +
             "-ingredients\">" + escape(statement) + "</p>";
    }
    return h + "</div>";
}

std::string price(std::mt19937_64& rng) {
    long long cents = 49 + static_cast<long long>(below(rng, 950));
    return std::to_string(cents / 100) + "," + (cents % 100 < 10 ? "0" : "") + std::to_string(cents % 100) + " €";
}

std::string page_html(const TemplateSpec& t, const std::string& page_id, const std::string& name,
                      const std::string& category, const std::optional<std::string>& statement,
                      const std::vector<std::size_t>& rows, const Amounts& a, std::mt19937_64& rng) {
    const std::string& p = t.class_prefix;
    std::string h = "<!DOCTYPE html>\n<html lang=\"de\">\n<head>\n<meta charset=\"utf-8\">\n<title>" + escape(name) +
                    " online kaufen</title>\n";
    h += "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n";
    h += "<link rel=\"stylesheet\" href=\"/static/" + p + ".css\">\n";
    h += "<style>." + p + "-price{font-weight:700}." + p + "-row{display:flex}</style>\n";
    h += "<script type=\"application/ld+json\">{\"@context\":\"https://schema.org\",\"@type\":\"Product\",\"name\":\"" +
         escape(name) + "\",\"sku\":\"" + page_id + "\"}</script>\n";
    h += "<script>window.dataLayer=window.dataLayer||[];dataLayer.push({page:'" + page_id + "'});</script>\n</head>\n";
    h += "<body class=\"" + p + "-page\">\n";
    h += "<header class=\"site-header\"><a class=\"logo\" href=\"/\"><svg width=\"20\" height=\"20\"><g><path d=\"M0 0h20v20H0z\"/></g></svg>Markt</a>"
         "<form class=\"search\"><input type=\"search\" name=\"q\" placeholder=\"Suchen\"></form></header>\n";
    h += "<nav class=\"" + p + "-nav\"><ul>";
    for (std::size_t i = 0; i < kNavigation.size(); ++i) {
        h += "<li><a href=\"/c/" + std::to_string(i + 1) + "\">" + escape(kNavigation[i]) + "</a></li>";
    }
    h += "</ul></nav>\n";
    h += "<!-- product detail -->\n<main id=\"" + p + "-main\">\n";
    h += "<div class=\"" + p + "-crumbs\"><a href=\"/\">Start</a> &raquo; <a href=\"/c\">" + escape(category) + "</a> &raquo; <span>" +
         escape(name) + "</span></div>\n";
    int wrappers = t.wrapper_div_jitter > 0 ? static_cast<int>(below(rng, static_cast<std::uint64_t>(t.wrapper_div_jitter) + 1)) : 0;
    for (int i = 0; i < wrappers; ++i) h += "<div class=\"" + p + "-wrap\">";
    h += "<article class=\"" + p + "-product\" data-id=\"" + page_id + "\">\n";
    h += "<h1 class=\"" + p + "-title\">" + escape(name) + "</h1>\n";
    h += "<div class=\"" + p + "-media\"><img src=\"/img/" + page_id + ".jpg\" alt=\"" + escape(name) + "\"></div>\n";
    h += "<div class=\"" + p + "-buy\"><span class=\"" + p + "-price\">" + price(rng) + "</span>";
    h += "<form class=\"" + p + "-cart\" method=\"post\"><select name=\"qty\">";
    for (int q = 1; q <= 5; ++q) h += "<option value=\"" + std::to_string(q) + "\">" + std::to_string(q) + "</option>";
    h += "</select><button type=\"submit\">In den Warenkorb</button></form></div>\n";
    h += "<div class=\"" + p + "-description\"><p>" + escape(pick(kDescriptions, rng)) + "</p></div>\n";
    if (statement) h += ingredient_block(t, *statement) + "\n";
    if (!rows.empty()) h += nutrition_block(t, rows, a) + "\n";
    h += "</article>\n";
    for (int i = 0; i < wrappers; ++i) h += "</div>";
    h += "<aside class=\"" + p + "-related\"><h2>Das könnte Ihnen auch gefallen</h2><ul>";
    for (int i = 0; i < 3; ++i) {
        h += "<li><a href=\"/p/" + std::to_string(below(rng, 90000) + 10000) + "\">" + escape(pick(kPackaged, rng).name) +
             "</a> <span>" + price(rng) + "</span></li>";
    }
    h += "</ul></aside>\n";
    h += "<iframe src=\"https://ads.example.com/slot\" width=\"300\" height=\"250\"></iframe>\n</main>\n";
    h += "<footer><p>Alle Preise inkl. MwSt.</p><a href=\"/impressum\">Impressum</a> <a href=\"/datenschutz\">Datenschutz</a></footer>\n";
    h += "<noscript><img src=\"/pixel.gif\" alt=\"\"></noscript>\n";
    h += "<script src=\"/static/app.js\" defer></script>\n</body>\n</html>\n";
    return h;
}

std::string page_id_for(const std::string& shop, int index, int n_pages) {
    std::string digits = std::to_string(index + 1);
    std::size_t width = std::max<std::size_t>(4, std::to_string(n_pages).size());
    return shop + "-" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

enum class Category { Full, NoNutrition, NoIngredients, Neither };

} // namespace

std::string_view to_string(NutritionLayout l) noexcept {
    switch (l) {
    case NutritionLayout::Table: return "table";
    case NutritionLayout::DefinitionList: return "dl";
    case NutritionLayout::DivGrid: return "div_grid";
    }
    return "";
}

std::array<int, 3> missing_quotas(int n_pages, const MissingRates& rates) {
    return {static_cast<int>(std::llround(n_pages * rates.only_nutrition_missing)),
            static_cast<int>(std::llround(n_pages * rates.only_ingredients_missing)),
            static_cast<int>(std::llround(n_pages * rates.both_missing))};
}

void validate(const ShopSpec& spec) {
    if (spec.shop_id.empty() ||
        !std::all_of(spec.shop_id.begin(), spec.shop_id.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; })) {
        throw PreconditionViolation("shop_id must be non-empty and use only letters, digits, '-' and '_'");
    }
    if (spec.n_pages < 1) throw PreconditionViolation("n_pages must be at least 1");
    if (spec.templates.empty()) throw PreconditionViolation("a shop needs at least one template");
    std::set<std::string> ids;
    std::set<std::string> prefixes;
    for (const auto& t : spec.templates) {
        if (t.template_id.empty() || !ids.insert(t.template_id).second) {
            throw PreconditionViolation("template ids must be non-empty and unique");
        }
        if (t.class_prefix.empty() || !prefixes.insert(t.class_prefix).second) {
            throw PreconditionViolation("class prefixes must be non-empty and unique within a shop");
        }
        if (t.optional_attribute_dropout < 0 || t.optional_attribute_dropout > 1 || t.wrapper_div_jitter < 0) {
            throw PreconditionViolation("template " + t.template_id + " has out-of-range noise knobs");
        }
    }
    const auto& r = spec.missing_rates;
    for (double x : {r.only_nutrition_missing, r.only_ingredients_missing, r.both_missing}) {
        if (!(x >= 0.0 && x <= 1.0)) throw PreconditionViolation("missing rates must lie in [0, 1]");
    }
    if (r.only_nutrition_missing + r.only_ingredients_missing + r.both_missing > 1.0 + 1e-9) {
        throw PreconditionViolation("missing rates must sum to at most 1");
    }
    auto q = missing_quotas(spec.n_pages, r);
    if (q[0] + q[1] + q[2] > spec.n_pages) throw PreconditionViolation("missing quotas exceed the page count");
}

Corpus generate_shop(const ShopSpec& spec) {
    validate(spec);
    const int n = spec.n_pages;
    Corpus corpus;
    corpus.shop_id = spec.shop_id;
    corpus.templates = spec.templates;

    std::vector<Category> category(static_cast<std::size_t>(n), Category::Full);
    {
        std::mt19937_64 rng(derive_seed(spec.seed, "quota"));
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        shuffle(order, rng);
        auto q = missing_quotas(n, spec.missing_rates);
        std::size_t k = 0;
        const Category kinds[3] = {Category::NoNutrition, Category::NoIngredients, Category::Neither};
        for (int c = 0; c < 3; ++c) {
            for (int j = 0; j < q[static_cast<std::size_t>(c)]; ++j) category[static_cast<std::size_t>(order[k++])] = kinds[c];
        }
    }
    std::vector<std::size_t> template_of(static_cast<std::size_t>(n));
    {
        std::mt19937_64 rng(derive_seed(spec.seed, "template"));
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        shuffle(order, rng);
        for (std::size_t j = 0; j < order.size(); ++j) template_of[static_cast<std::size_t>(order[j])] = j % spec.templates.size();
    }

    corpus.pages.resize(static_cast<std::size_t>(n));
    corpus.truth.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const TemplateSpec& t = spec.templates[template_of[idx]];
        std::mt19937_64 rng(derive_seed(spec.seed, "page:" + std::to_string(i)));
        const Category c = category[idx];
        const bool has_ingredients = c == Category::Full || c == Category::NoNutrition;
        const bool has_nutrition = c == Category::Full || c == Category::NoIngredients;

        GroundTruthRecord rec;
        rec.page_id = page_id_for(spec.shop_id, i, n);
        rec.template_id = t.template_id;
        rec.has_ingredients = has_ingredients;
        rec.has_nutrition = has_nutrition;

        std::string name;
        std::string cat;
        if (c == Category::Neither) {
            name = pick(kFresh, rng);
            cat = "Obst & Gemüse";
        } else {
            const auto& item = pick(kPackaged, rng);
            name = item.name;
            cat = item.category;
        }
        std::optional<std::string> statement;
        if (has_ingredients) {
            statement = ingredient_statement(rng);
            rec.product.ingredient_statement = statement;
        }
        Amounts amounts = draw_amounts(rng);
        std::vector<std::size_t> rows;
        if (has_nutrition) {
            for (std::size_t r = 0; r < nutrient_rows().size(); ++r) rows.push_back(r);
            if (chance(rng, t.optional_attribute_dropout)) rows.erase(rows.begin() + static_cast<long>(1 + below(rng, 6)));
            for (std::size_t r : rows) schema::nutrient(rec.product, nutrient_rows()[r].field) = row_truth(t, r, amounts);
        }
        corpus.pages[idx] = html::RawDocument{rec.page_id, "pages/" + rec.page_id + ".html",
                                              page_html(t, rec.page_id, name, cat, statement, rows, amounts, rng)};
        corpus.truth[idx] = std::move(rec);
    }

    std::mt19937_64 rng(derive_seed(spec.seed, "labels"));
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < corpus.truth.size(); ++i) (is_positive(corpus.truth[i]) ? pos : neg).push_back(i);
    shuffle(pos, rng);
    shuffle(neg, rng);
    for (std::size_t i = 0; i < std::min<std::size_t>(5, pos.size()); ++i) corpus.labels[corpus.truth[pos[i]].page_id] = true;
    for (std::size_t i = 0; i < std::min<std::size_t>(5, neg.size()); ++i) corpus.labels[corpus.truth[neg[i]].page_id] = false;
    return corpus;
}

dsl::ExtractionProgram true_program_for(const TemplateSpec& t) {
    using dsl::FieldRule;
    using dsl::PostOp;
    using dsl::PostOpKind;
    const std::string& p = t.class_prefix;
    dsl::ExtractionProgram prog;
    prog.program_id = "true-" + t.template_id;
    prog.created_by = "generator";

    FieldRule ing;
    ing.field_path = "ingredient_statement";
    ing.selector = "p." + p + "-ingredients";
    ing.post_ops.push_back(PostOp{PostOpKind::Trim, {}, {}, std::nullopt});
    if (t.ingredient_label_inline) {
        ing.post_ops.push_back(PostOp{PostOpKind::StripLabelPrefix, {t.ingredient_label + ":"}, {}, std::nullopt});
    }
    prog.rules.push_back(ing);

    for (std::size_t r = 0; r < nutrient_rows().size(); ++r) {
        const std::string key = nutrient_rows()[r].key;
        std::string selector;
        switch (t.layout) {
        case NutritionLayout::Table: selector = "table." + p + "-nutri-table tr." + p + "-n-" + key + " td." + p + "-val"; break;
        case NutritionLayout::DefinitionList: selector = "dl." + p + "-facts dd." + p + "-" + key; break;
        case NutritionLayout::DivGrid: selector = "div." + p + "-row-" + key + " span." + p + "-amt"; break;
        }
        std::string unit = r == 0 ? (t.energy_in_kcal ? "kcal" : "kJ") : "g";
        std::string code = r == 0 ? (t.energy_in_kcal ? "E14" : "KJO") : "GRM";
        const std::string field(schema::field_name(nutrient_rows()[r].field));
        FieldRule value;
        value.field_path = field + ".value";
        value.selector = selector;
        value.capture = "([0-9]+(?:[.,][0-9]+)?)\\s*" + unit + "\\b";
        value.post_ops.push_back(PostOp{PostOpKind::ParseDecimalComma, {}, {}, std::nullopt});
        FieldRule uc;
        uc.field_path = field + ".unit_code";
        uc.selector = selector;
        uc.capture = "[0-9]\\s*(" + unit + ")\\b";
        uc.post_ops.push_back(PostOp{PostOpKind::ToUnitCode, {}, {{unit, code}}, std::nullopt});
        prog.rules.push_back(std::move(value));
        prog.rules.push_back(std::move(uc));
    }
    return prog;
}

dsl::ExtractionProgram true_program_for(std::string_view template_id) {
    for (const auto& t : shipped_templates()) {
        if (t.template_id == template_id) return true_program_for(t);
    }
    throw UnknownTemplate("unknown template '" + std::string(template_id) + "'");
}

const std::vector<TemplateSpec>& shipped_templates() {
    static const std::vector<TemplateSpec> all = [] {
        std::vector<TemplateSpec> v;
        v.push_back({"alpha-main", "pd", NutritionLayout::Table, true, false, true, "Zutaten", "Nährwerte je 100 g",
                     "Brennwert", 0.15, 2});
        v.push_back({"beta-classic", "art", NutritionLayout::DefinitionList, false, true, false, "Zutatenliste",
                     "Nährwertangaben", "Energie", 0.1, 1});
        v.push_back({"beta-relaunch", "sku", NutritionLayout::DivGrid, true, false, true, "Zutaten", "Nährwerttabelle",
                     "Energie", 0.1, 2});
        v.push_back({"gamma-food", "prd", NutritionLayout::Table, false, false, false, "Zutaten",
                     "Durchschnittliche Nährwerte", "Brennwert", 0.1, 1});
        v.push_back({"gamma-drinks", "itm", NutritionLayout::DefinitionList, true, true, true, "Zutatenliste",
                     "Nährwerte pro 100 g", "Energie", 0.1, 2});
        v.push_back({"gamma-fresh", "nx", NutritionLayout::DivGrid, true, false, false, "Zutaten", "Nährwertangaben",
                     "Brennwert", 0.2, 3});
        return v;
    }();
    return all;
}

std::vector<std::string> preset_names() { return {"alpha", "beta", "gamma"}; }

ShopSpec preset(std::string_view name, int n_pages, std::uint64_t seed) {
    const auto& all = shipped_templates();
    ShopSpec spec;
    spec.shop_id = std::string(name);
    spec.n_pages = n_pages;
    spec.seed = seed;
    if (name == "alpha") spec.templates = {all[0]};
    else if (name == "beta") spec.templates = {all[1], all[2]};
    else if (name == "gamma") spec.templates = {all[3], all[4], all[5]};
    else throw UnknownPreset("unknown preset '" + std::string(name) + "' (expected alpha, beta or gamma)");
    return spec;
}

} // namespace shopx::corpus
