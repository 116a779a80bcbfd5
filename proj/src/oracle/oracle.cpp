#include "shopx/oracle/oracle.hpp"

#include <algorithm>
#include <unordered_map>

#include "shopx/common/hash.hpp"
#include "shopx/dsl/program.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/llm/prompts.hpp"

namespace shopx::oracle {

using nlohmann::json;

json OracleConfig::to_json() const {
    return {{"imperfections", imperfections},
            {"max_random_imperfections", max_random_imperfections},
            {"decision_noise", decision_noise},
            {"reference_dropout", reference_dropout},
            {"unreparable_templates", unreparable_templates},
            {"seed", seed}};
}

OracleConfig OracleConfig::from_json(const json& j) {
    OracleConfig c;
    try {
        c.imperfections = j.value("imperfections", c.imperfections);
        c.max_random_imperfections = j.value("max_random_imperfections", c.max_random_imperfections);
        c.decision_noise = j.value("decision_noise", c.decision_noise);
        c.reference_dropout = j.value("reference_dropout", c.reference_dropout);
        if (j.contains("unreparable_templates")) {
            c.unreparable_templates = j["unreparable_templates"].get<std::set<std::string>>();
        }
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw SchemaViolation("oracle", e.what());
    }
    if (c.imperfections < 0 || c.max_random_imperfections < 0 || c.decision_noise < 0 || c.decision_noise > 1 ||
        c.reference_dropout < 0 || c.reference_dropout > 1) {
        throw PreconditionViolation("oracle knobs out of range");
    }
    return c;
}

struct OracleProvider::Index {
    corpus::Corpus corpus;
    std::unordered_map<std::string, std::size_t> by_content;
    std::map<std::string, dsl::ExtractionProgram> true_programs;
    std::vector<std::string> ingredient_keywords;
    std::vector<std::string> nutrition_keywords;
};

OracleProvider::OracleProvider(const corpus::Corpus& c, OracleConfig cfg)
    : cfg_(std::move(cfg)), index_(std::make_unique<Index>()) {
    if (c.truth.size() != c.pages.size()) throw PreconditionViolation("the oracle needs ground truth for every page");
    Index& ix = *index_;
    ix.corpus = c;
    for (std::size_t i = 0; i < c.pages.size(); ++i) {
        auto compressed = html::compress_html(c.pages[i]);
        ix.by_content.emplace(html::extract_text(compressed).content, i);
        ix.by_content.emplace(std::move(compressed.content), i);
    }
    std::vector<corpus::TemplateSpec> templates = c.templates;
    for (const auto& r : c.truth) {
        bool known = std::any_of(templates.begin(), templates.end(),
                                 [&](const auto& t) { return t.template_id == r.template_id; });
        if (!known) {
            for (const auto& t : corpus::shipped_templates()) {
                if (t.template_id == r.template_id) templates.push_back(t);
            }
        }
    }
    std::set<std::string> ing;
    std::set<std::string> nut = {"Nährwert"};
    for (const auto& t : templates) {
        ix.true_programs[t.template_id] = corpus::true_program_for(t);
        ing.insert(t.ingredient_label);
        nut.insert(t.energy_label);
    }
    ix.ingredient_keywords.assign(ing.begin(), ing.end());
    ix.nutrition_keywords.assign(nut.begin(), nut.end());
}

OracleProvider::~OracleProvider() = default;

namespace {

class Draws {
public:
    Draws(std::uint64_t seed, const std::string& key) : state_(derive_seed(seed, key)) {}
    std::uint64_t next() { return state_ = mix_seed(state_, 0x9e3779b97f4a7c15ULL); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
    bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

private:
    std::uint64_t state_;
};

std::string field_of(const std::string& path) { return path.substr(0, path.find('.')); }

bool present_in(const schema::FoodProduct& ref, const std::string& path) {
    auto f = schema::field_from_name(field_of(path));
    if (!f) return false;
    if (*f == schema::Field::IngredientStatement) return ref.ingredient_statement.has_value();
    const auto& q = schema::nutrient(ref, *f);
    if (!q) return false;
    if (path.ends_with(".unit_code")) return q->unit_code.has_value();
    return true;
}

std::vector<dsl::FieldRule> corrupt(std::vector<dsl::FieldRule> rules, const schema::FoodProduct& ref, int k,
                                    Draws& d) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (present_in(ref, rules[i].field_path)) candidates.push_back(i);
    }
    for (std::size_t i = candidates.size(); i > 1; --i) std::swap(candidates[i - 1], candidates[d.below(i)]);
    candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(std::max(k, 0))));
    std::set<std::size_t> dropped;
    for (std::size_t i : candidates) {
        auto& r = rules[i];
        bool unit = r.field_path.ends_with(".unit_code");
        switch (d.below(unit ? 3 : 2)) {
        case 0: dropped.insert(i); break;
        case 1: r.selector += "-old"; break;
        default:
            for (auto& op : r.post_ops) {
                if (op.kind != dsl::PostOpKind::ToUnitCode) continue;
                for (auto& [from, to] : op.unit_map) to = to == "MGM" ? "GRM" : "MGM";
            }
        }
    }
    std::vector<dsl::FieldRule> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (!dropped.count(i)) out.push_back(std::move(rules[i]));
    }
    return out;
}

// Fixes the first rule, in the true program's order, that differs from it.
std::vector<dsl::FieldRule> repair_one(const std::vector<dsl::FieldRule>& current, const dsl::ExtractionProgram& truth) {
    std::vector<dsl::FieldRule> out;
    bool repaired = false;
    for (const auto& want : truth.rules) {
        auto it = std::find_if(current.begin(), current.end(),
                               [&](const dsl::FieldRule& r) { return r.field_path == want.field_path; });
        if (it != current.end() && (*it == want || repaired)) {
            out.push_back(*it);
        } else if (!repaired) {
            out.push_back(want);
            repaired = true;
        }
    }
    for (const auto& r : current) {
        if (truth.rule_for(r.field_path)) continue;
        if (!repaired) {
            repaired = true;
            continue;
        }
        out.push_back(r);
    }
    return out;
}

json decision_program(const std::vector<std::string>& ing, const std::vector<std::string>& nut, Draws& d, double noise) {
    auto any_of = [](const std::vector<std::string>& words) {
        std::vector<dsl::Predicate> xs;
        for (const auto& w : words) xs.push_back(dsl::Predicate::keyword(w));
        return dsl::Predicate::any(std::move(xs));
    };
    dsl::Predicate p = dsl::Predicate::all({any_of(ing), any_of(nut)});
    if (d.chance(noise)) {
        switch (d.below(3)) {
        case 0: p = any_of(ing); break;
        case 1: p = any_of(nut); break;
        default: p = dsl::Predicate::any({any_of(ing), any_of(nut)});
        }
    }
    return {{"predicate", dsl::to_json(p)}};
}

} // namespace

llm::CompletionResponse OracleProvider::complete(const llm::CompletionRequest& req) {
    const Index& ix = *index_;
    const std::string task = llm::prompt_header(req.user_prompt, "Task").value_or("");
    Draws d(cfg_.seed, llm::request_hash(req));

    const corpus::GroundTruthRecord* truth = nullptr;
    if (auto page = llm::prompt_section(req.user_prompt, "PAGE")) {
        auto it = ix.by_content.find(*page);
        if (it != ix.by_content.end()) truth = &ix.corpus.truth[it->second];
    }

    std::string answer;
    if (task == "direct_extraction") {
        schema::FoodProduct p = truth ? truth->product : schema::FoodProduct{};
        if (schema::populated_count(p) > 0 && d.chance(cfg_.reference_dropout)) {
            std::vector<schema::Field> present;
            for (auto f : schema::kAllFields) {
                if (schema::is_populated(p, f)) present.push_back(f);
            }
            auto f = present[d.below(present.size())];
            if (f == schema::Field::IngredientStatement) p.ingredient_statement.reset();
            else schema::nutrient(p, f).reset();
        }
        answer = schema::product_to_json(p).dump();
    } else if (task == "decision_generation") {
        answer = decision_program(ix.ingredient_keywords, ix.nutrition_keywords, d, cfg_.decision_noise).dump();
    } else if (task == "function_generation") {
        std::vector<dsl::FieldRule> rules;
        if (truth) {
            auto tp = ix.true_programs.find(truth->template_id);
            if (tp != ix.true_programs.end()) {
                schema::FoodProduct ref;
                if (auto section = llm::prompt_section(req.user_prompt, "REFERENCE")) {
                    if (auto parsed = schema::parse_product(*section); parsed.product) ref = *parsed.product;
                }
                int k = cfg_.max_random_imperfections > 0
                            ? static_cast<int>(d.below(static_cast<std::uint64_t>(cfg_.max_random_imperfections) + 1))
                            : cfg_.imperfections;
                if (cfg_.unreparable_templates.count(truth->template_id)) k = std::max(k, 1);
                rules = corrupt(tp->second.rules, ref, k, d);
            }
        }
        answer = json{{"rules", dsl::rules_to_json(rules)}}.dump();
    } else if (task == "function_refinement") {
        std::string program = llm::prompt_section(req.user_prompt, "PROGRAM").value_or("");
        json doc = json::parse(program, nullptr, false);
        auto parsed = dsl::parse_rules(doc);
        std::vector<dsl::FieldRule> rules = parsed.program.value_or(std::vector<dsl::FieldRule>{});
        if (truth) {
            auto tp = ix.true_programs.find(truth->template_id);
            if (tp != ix.true_programs.end() && !cfg_.unreparable_templates.count(truth->template_id)) {
                rules = parsed.ok() ? repair_one(rules, tp->second) : tp->second.rules;
            }
        }
        if (!parsed.ok() && !truth) rules.clear();
        answer = json{{"rules", dsl::rules_to_json(rules)}}.dump();
    } else {
        throw llm::ProviderRefusal("oracle cannot answer task '" + task + "'");
    }

    llm::Usage usage;
    usage.input_tokens = html::count_tokens(req.system_prompt) + html::count_tokens(req.user_prompt);
    usage.output_tokens = html::count_tokens(answer);
    return {std::move(answer), usage};
}

} // namespace shopx::oracle
