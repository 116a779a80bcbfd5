#include <algorithm>
#include <fstream>
#include <sstream>

#include "shopx/corpus/corpus.hpp"

namespace shopx::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

const GroundTruthRecord* Corpus::truth_for(std::string_view page_id) const {
    for (const auto& r : truth) {
        if (r.page_id == page_id) return &r;
    }
    return nullptr;
}

const TemplateSpec* Corpus::template_for(std::string_view template_id) const {
    for (const auto& t : templates) {
        if (t.template_id == template_id) return &t;
    }
    return nullptr;
}

namespace {

NutritionLayout parse_layout(const std::string& s) {
    if (s == "table") return NutritionLayout::Table;
    if (s == "dl") return NutritionLayout::DefinitionList;
    if (s == "div_grid") return NutritionLayout::DivGrid;
    throw SchemaViolation("layout", "unknown nutrition layout '" + s + "'");
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, std::string_view data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("failed writing " + p.string());
}

json parse_json_file(const fs::path& p) {
    json j = json::parse(read_text(p), nullptr, false);
    if (j.is_discarded()) throw Error(p.string() + " is not valid JSON");
    return j;
}

} // namespace

json to_json(const TemplateSpec& t) {
    return {{"template_id", t.template_id},
            {"class_prefix", t.class_prefix},
            {"layout", to_string(t.layout)},
            {"decimal_comma", t.decimal_comma},
            {"energy_in_kcal", t.energy_in_kcal},
            {"ingredient_label_inline", t.ingredient_label_inline},
            {"ingredient_label", t.ingredient_label},
            {"nutrition_heading", t.nutrition_heading},
            {"energy_label", t.energy_label},
            {"optional_attribute_dropout", t.optional_attribute_dropout},
            {"wrapper_div_jitter", t.wrapper_div_jitter}};
}

TemplateSpec template_from_json(const json& j) {
    try {
        TemplateSpec t;
        t.template_id = j.at("template_id").get<std::string>();
        t.class_prefix = j.at("class_prefix").get<std::string>();
        t.layout = parse_layout(j.at("layout").get<std::string>());
        t.decimal_comma = j.at("decimal_comma").get<bool>();
        t.energy_in_kcal = j.at("energy_in_kcal").get<bool>();
        t.ingredient_label_inline = j.at("ingredient_label_inline").get<bool>();
        t.ingredient_label = j.at("ingredient_label").get<std::string>();
        t.nutrition_heading = j.at("nutrition_heading").get<std::string>();
        t.energy_label = j.at("energy_label").get<std::string>();
        t.optional_attribute_dropout = j.value("optional_attribute_dropout", 0.0);
        t.wrapper_div_jitter = j.value("wrapper_div_jitter", 0);
        return t;
    } catch (const json::exception& e) {
        throw SchemaViolation("template", e.what());
    }
}

json to_json(const GroundTruthRecord& r) {
    return {{"page_id", r.page_id},
            {"template_id", r.template_id},
            {"has_nutrition", r.has_nutrition},
            {"has_ingredients", r.has_ingredients},
            {"product", schema::product_to_json(r.product)}};
}

GroundTruthRecord truth_from_json(const json& j) {
    GroundTruthRecord r;
    try {
        r.page_id = j.at("page_id").get<std::string>();
        r.template_id = j.value("template_id", std::string());
        r.has_nutrition = j.at("has_nutrition").get<bool>();
        r.has_ingredients = j.at("has_ingredients").get<bool>();
    } catch (const json::exception& e) {
        throw SchemaViolation("truth", e.what());
    }
    auto parsed = schema::parse_product_json(j.value("product", json::object()));
    if (!parsed.product) throw SchemaViolation(parsed.errors);
    r.product = std::move(*parsed.product);
    return r;
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
    fs::create_directories(dir / "pages");
    for (const auto& page : corpus.pages) write_text(dir / "pages" / (page.page_id + ".html"), page.html);
    std::string truth;
    for (const auto& r : corpus.truth) truth += to_json(r).dump() + "\n";
    write_text(dir / "truth.jsonl", truth);
    json labels = json::object();
    for (const auto& [id, positive] : corpus.labels) labels[id] = positive;
    write_text(dir / "labels.json", labels.dump(2) + "\n");
    json templates = json::array();
    for (const auto& t : corpus.templates) templates.push_back(to_json(t));
    write_text(dir / "templates.json", json{{"shop_id", corpus.shop_id}, {"templates", templates}}.dump(2) + "\n");
}

Corpus load_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir / "pages")) throw Error(dir.string() + " has no pages/ directory");
    Corpus corpus;
    corpus.shop_id = dir.filename().string();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir / "pages")) {
        if (e.is_regular_file() && e.path().extension() == ".html") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        corpus.pages.push_back({f.stem().string(), "pages/" + f.filename().string(), read_text(f)});
    }
    if (fs::exists(dir / "templates.json")) {
        json j = parse_json_file(dir / "templates.json");
        corpus.shop_id = j.value("shop_id", corpus.shop_id);
        for (const auto& t : j.value("templates", json::array())) corpus.templates.push_back(template_from_json(t));
    }
    if (fs::exists(dir / "truth.jsonl")) {
        std::map<std::string, GroundTruthRecord> by_id;
        std::istringstream in(read_text(dir / "truth.jsonl"));
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) throw Error("truth.jsonl line " + std::to_string(line_no) + " is not valid JSON");
            auto rec = truth_from_json(j);
            by_id[rec.page_id] = std::move(rec);
        }
        for (const auto& page : corpus.pages) {
            auto it = by_id.find(page.page_id);
            if (it == by_id.end()) throw Error("truth.jsonl has no record for page " + page.page_id);
            corpus.truth.push_back(std::move(it->second));
        }
    }
    if (fs::exists(dir / "labels.json")) {
        json j = parse_json_file(dir / "labels.json");
        if (!j.is_object()) throw Error("labels.json must map page ids to booleans");
        for (const auto& [id, v] : j.items()) {
            if (!v.is_boolean()) throw Error("labels.json: '" + id + "' is not a boolean");
            corpus.labels[id] = v.get<bool>();
        }
    }
    return corpus;
}

} // namespace shopx::corpus
