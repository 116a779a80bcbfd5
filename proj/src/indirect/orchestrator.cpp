#include "shopx/indirect/orchestrator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "shopx/common/hash.hpp"
#include "shopx/common/parallel.hpp"
#include "shopx/direct/direct.hpp"
#include "shopx/dsl/interpreter.hpp"
#include "shopx/llm/prompts.hpp"
#include "shopx/similarity/similarity.hpp"

namespace shopx::indirect {

using nlohmann::json;

void OrchestratorConfig::validate() const {
    auto fail = [](const std::string& m) { throw PreconditionViolation("orchestrator config: " + m); };
    if (decision_ensemble_size < 1 || decision_ensemble_size % 2 == 0) fail("decision_ensemble_size must be odd");
    if (bootstrap_sample_size < 2) fail("bootstrap_sample_size must be at least 2");
    if (!(reference_fill_threshold > 0.0 && reference_fill_threshold <= 1.0)) {
        fail("reference_fill_threshold must lie in (0, 1]");
    }
    if (max_refinements < 0 || max_alternatives < 0) fail("refinement and alternative budgets must be >= 0");
    if (max_decision_attempts < 1) fail("max_decision_attempts must be >= 1");
    if (min_valid_attributes < 1) fail("min_valid_attributes must be >= 1");
    if (primary_model.empty() || decision_model.empty()) fail("model ids must not be empty");
    if (threads < 1) fail("threads must be >= 1");
}

json OrchestratorConfig::to_json() const {
    return {{"decision_ensemble_size", decision_ensemble_size},
            {"bootstrap_sample_size", bootstrap_sample_size},
            {"reference_fill_threshold", reference_fill_threshold},
            {"max_refinements", max_refinements},
            {"max_alternatives", max_alternatives},
            {"max_decision_attempts", max_decision_attempts},
            {"min_valid_attributes", min_valid_attributes},
            {"rng_seed", rng_seed},
            {"primary_model", primary_model},
            {"decision_model", decision_model},
            {"reference_variant", html::to_string(reference_variant)},
            {"threads", threads}};
}

OrchestratorConfig OrchestratorConfig::from_json(const json& j) {
    if (!j.is_object()) throw SchemaViolation("orchestrator", "config must be a JSON object");
    static const std::set<std::string> known = {
        "decision_ensemble_size", "bootstrap_sample_size", "reference_fill_threshold", "max_refinements",
        "max_alternatives", "max_decision_attempts", "min_valid_attributes", "rng_seed", "primary_model",
        "decision_model", "reference_variant", "threads"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw SchemaViolation("orchestrator", "unknown config key '" + k + "'");
    }
    OrchestratorConfig c;
    try {
        c.decision_ensemble_size = j.value("decision_ensemble_size", c.decision_ensemble_size);
        c.bootstrap_sample_size = j.value("bootstrap_sample_size", c.bootstrap_sample_size);
        c.reference_fill_threshold = j.value("reference_fill_threshold", c.reference_fill_threshold);
        c.max_refinements = j.value("max_refinements", c.max_refinements);
        c.max_alternatives = j.value("max_alternatives", c.max_alternatives);
        c.max_decision_attempts = j.value("max_decision_attempts", c.max_decision_attempts);
        c.min_valid_attributes = j.value("min_valid_attributes", c.min_valid_attributes);
        c.rng_seed = j.value("rng_seed", c.rng_seed);
        c.primary_model = j.value("primary_model", c.primary_model);
        c.decision_model = j.value("decision_model", c.decision_model);
        if (j.contains("reference_variant")) c.reference_variant = html::parse_variant(j["reference_variant"].get<std::string>());
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw SchemaViolation("orchestrator", e.what());
    }
    c.validate();
    return c;
}

void FunctionLibrary::add(LibraryEntry e) {
    for (const auto& x : entries_) {
        if (x.program.program_id == e.program.program_id) {
            throw PreconditionViolation("duplicate program id " + e.program.program_id);
        }
    }
    entries_.push_back(std::move(e));
}

json FunctionLibrary::to_json() const {
    json programs = json::array();
    for (const auto& e : entries_) {
        programs.push_back({{"program", dsl::to_json(e.program)},
                            {"source_page_id", e.source_page_id},
                            {"reference_similarity", e.reference_similarity},
                            {"accepted", e.accepted},
                            {"pages_matched", e.pages_matched},
                            {"attributes_total", e.attributes_total},
                            {"mean_attributes_extracted", e.mean_attributes_extracted()}});
    }
    return {{"programs", programs}};
}

FunctionLibrary FunctionLibrary::from_json(const json& j) {
    FunctionLibrary lib;
    if (!j.is_object() || !j.contains("programs") || !j["programs"].is_array()) {
        throw SchemaViolation("library", "expected {\"programs\": [...]}");
    }
    for (const auto& item : j["programs"]) {
        auto parsed = dsl::parse_extraction(item.value("program", json()));
        if (!parsed.program) throw dsl::ProgramError(parsed.issues);
        LibraryEntry e;
        e.program = std::move(*parsed.program);
        try {
            e.source_page_id = item.value("source_page_id", "");
            e.reference_similarity = item.value("reference_similarity", 0.0);
            e.accepted = item.value("accepted", false);
            e.pages_matched = item.value("pages_matched", 0);
            e.attributes_total = item.value("attributes_total", 0LL);
        } catch (const json::exception& ex) {
            throw SchemaViolation("library", ex.what());
        }
        lib.add(std::move(e));
    }
    return lib;
}

json ShopRunMetrics::to_json() const {
    json j = {{"shop_id", shop_id},
              {"seed", seed},
              {"pages_total", pages_total},
              {"llm_calls_primary_model", llm_calls_primary_model},
              {"llm_calls_decision_model", llm_calls_decision_model},
              {"functions_generated", functions_generated},
              {"refinements_performed", refinements_performed},
              {"reference_extractions", reference_extractions},
              {"reference_failures", reference_failures},
              {"syntheses", syntheses},
              {"max_calls_per_synthesis", max_calls_per_synthesis},
              {"decision_positive_pages", decision_positive_pages},
              {"pages_with_result", pages_with_result},
              {"cost_primary_usd", cost_primary.usd()},
              {"cost_decision_usd", cost_decision.usd()},
              {"cost_total_usd", cost_total.usd()}};
    j["decision_accuracy"] = decision_accuracy ? json(*decision_accuracy) : json(nullptr);
    j["accuracy"] = accuracy ? json(*accuracy) : json(nullptr);
    return j;
}

ShopRunMetrics ShopRunMetrics::from_json(const json& j) {
    ShopRunMetrics m;
    try {
        m.shop_id = j.at("shop_id").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.pages_total = j.at("pages_total").get<int>();
        m.llm_calls_primary_model = j.at("llm_calls_primary_model").get<int>();
        m.llm_calls_decision_model = j.at("llm_calls_decision_model").get<int>();
        m.functions_generated = j.at("functions_generated").get<int>();
        m.refinements_performed = j.at("refinements_performed").get<int>();
        m.reference_extractions = j.at("reference_extractions").get<int>();
        m.reference_failures = j.value("reference_failures", 0);
        m.syntheses = j.value("syntheses", 0);
        m.max_calls_per_synthesis = j.value("max_calls_per_synthesis", 0);
        m.decision_positive_pages = j.value("decision_positive_pages", 0);
        m.pages_with_result = j.value("pages_with_result", 0);
        m.cost_primary = llm::Money::from_usd_string(j.at("cost_primary_usd").get<std::string>());
        m.cost_decision = llm::Money::from_usd_string(j.at("cost_decision_usd").get<std::string>());
        m.cost_total = llm::Money::from_usd_string(j.at("cost_total_usd").get<std::string>());
        if (j.contains("decision_accuracy") && !j["decision_accuracy"].is_null()) {
            m.decision_accuracy = j["decision_accuracy"].get<double>();
        }
        if (j.contains("accuracy") && !j["accuracy"].is_null()) m.accuracy = j["accuracy"].get<double>();
    } catch (const json::exception& e) {
        throw SchemaViolation("metrics", e.what());
    }
    return m;
}

namespace {

std::uint64_t below(std::uint64_t& state, std::uint64_t n) {
    state = mix_seed(state, 0x9e3779b97f4a7c15ULL);
    return state % n;
}

template <class T>
void shuffle(std::vector<T>& v, std::uint64_t seed) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(seed, i)]);
}

std::string samples_block(const std::vector<LabeledSample>& samples) {
    std::string out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::string name = "SAMPLE " + std::to_string(i + 1) + " " + (samples[i].positive ? "positive" : "negative");
        out += llm::section(name, samples[i].text.content);
    }
    return out;
}

int correct_on(const dsl::Predicate& p, const std::vector<LabeledSample>& samples) {
    int n = 0;
    for (const auto& s : samples) n += dsl::evaluate(p, s.text.content) == s.positive;
    return n;
}

std::size_t ledger_size(llm::Gateway& g) { return g.ledger().size(); }

} // namespace

std::vector<dsl::DecisionProgram> build_decision_ensemble(const std::vector<LabeledSample>& samples,
                                                          llm::Gateway& gateway, const OrchestratorConfig& cfg) {
    cfg.validate();
    if (samples.size() != static_cast<std::size_t>(cfg.bootstrap_sample_size)) {
        throw PreconditionViolation("expected " + std::to_string(cfg.bootstrap_sample_size) + " bootstrap samples, got " +
                                    std::to_string(samples.size()));
    }
    bool any_pos = false, any_neg = false;
    for (const auto& s : samples) {
        if (s.text.variant != html::Variant::Text) throw html::WrongVariant("bootstrap samples must be TEXT documents");
        (s.positive ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) throw PreconditionViolation("bootstrap samples need a positive and a negative page");

    const auto& sys = llm::prompt_template("decision_system");
    const auto& user = llm::prompt_template("decision_user");
    const json schema = dsl::decision_response_schema();
    const std::string system_prompt = llm::render(sys, {{"schema", schema.dump()}});
    const std::string block = samples_block(samples);
    const int total = static_cast<int>(samples.size());

    struct Scored {
        dsl::DecisionProgram program;
        int correct;
    };
    std::vector<Scored> kept;
    for (int c = 0; c < cfg.decision_ensemble_size; ++c) {
        std::optional<Scored> best;
        for (int a = 0; a < cfg.max_decision_attempts; ++a) {
            llm::CompletionRequest req;
            req.model_id = cfg.decision_model;
            req.system_prompt = system_prompt;
            req.user_prompt = llm::render(
                user, {{"candidate", std::to_string(c + 1)}, {"attempt", std::to_string(a + 1)}, {"samples", block}});
            req.schema = schema;
            req.schema_name = "decision_program";
            req.prompt_template = user.tag();
            std::optional<dsl::Predicate> pred;
            try {
                auto answer = gateway.complete_structured(req, llm::Role::DecisionGen);
                json doc = json::parse(answer.json_text, nullptr, false);
                auto parsed = dsl::parse_predicate_response(doc);
                if (parsed.program) pred = std::move(*parsed.program);
            } catch (const SchemaViolation&) {
            }
            if (!pred) continue;
            int score = correct_on(*pred, samples);
            if (!best || score > best->correct) {
                best = Scored{{"decision-" + std::to_string(c + 1), std::move(*pred), cfg.decision_model}, score};
            }
            if (score == total) break;
        }
        if (best && 2 * best->correct > total) kept.push_back(std::move(*best));
    }
    if (kept.empty()) throw EnsembleBootstrapFailed("no decision program classified more than half of the samples");
    if (kept.size() % 2 == 0) {
        // Drop the weakest (the latest among equals) so the vote cannot tie.
        auto worst = kept.begin();
        for (auto it = kept.begin(); it != kept.end(); ++it) {
            if (it->correct <= worst->correct) worst = it;
        }
        kept.erase(worst);
    }
    std::vector<dsl::DecisionProgram> out;
    for (auto& k : kept) out.push_back(std::move(k.program));
    return out;
}

bool decide(const std::vector<dsl::DecisionProgram>& ensemble, const html::CompressedDocument& text) {
    if (ensemble.empty() || ensemble.size() % 2 == 0) {
        throw PreconditionViolation("a decision ensemble needs an odd, non-zero number of programs");
    }
    std::size_t yes = 0;
    for (const auto& p : ensemble) yes += dsl::run_decision(p, text);
    return 2 * yes > ensemble.size();
}

schema::FoodProduct acquire_reference(const html::CompressedDocument& page, const schema::SchemaDescriptor& desc,
                                      llm::Gateway& gateway, const OrchestratorConfig& cfg, int* calls) {
    if (page.variant != html::Variant::HtmlCompressed) throw html::WrongVariant("reference pages must be HTML_COMPRESSED");
    const std::size_t before = ledger_size(gateway);
    auto attempt = [&](const html::CompressedDocument& doc) -> std::optional<schema::FoodProduct> {
        try {
            auto r = direct::extract_direct(doc, desc, gateway, cfg.primary_model, llm::Role::Reference);
            if (schema::filled_field_ratio(r.product) >= cfg.reference_fill_threshold) return std::move(r.product);
        } catch (const direct::ExtractionFailed&) {
        }
        return std::nullopt;
    };
    auto first = attempt(cfg.reference_variant == html::Variant::Text ? html::extract_text(page) : page);
    if (!first) first = attempt(html::extract_text(page));
    if (calls) *calls = static_cast<int>(ledger_size(gateway) - before);
    if (!first) throw ReferenceUnattainable(page.page_id + ": no reference object reached the fill threshold");
    return std::move(*first);
}

SynthesisOutcome synthesize_program(const html::CompressedDocument& page, const schema::FoodProduct& reference,
                                    const schema::SchemaDescriptor& desc, llm::Gateway& gateway,
                                    const OrchestratorConfig& cfg) {
    if (page.variant != html::Variant::HtmlCompressed) throw html::WrongVariant("synthesis needs HTML_COMPRESSED");
    const std::size_t before = ledger_size(gateway);

    std::string paths;
    for (const auto& p : schema::field_paths(desc)) paths += "- " + p + "\n";
    const json schema = dsl::extraction_response_schema(desc);
    const std::string system_prompt = llm::render(
        llm::prompt_template("function_system"),
        {{"field_paths", paths}, {"target_schema", schema::to_json_schema(desc)}, {"schema", schema.dump()}});
    const auto& gen_user = llm::prompt_template("function_user");
    const auto& refine_user = llm::prompt_template("refine_user");
    const std::string ref_text = schema::serialize_product(reference);

    SynthesisOutcome out;
    out.page_id = page.page_id;
    bool have_best = false;

    auto request = [&](const llm::PromptTemplate& t, std::map<std::string, std::string> vars) {
        vars["reference"] = ref_text;
        vars["page"] = page.content;
        llm::CompletionRequest req;
        req.model_id = cfg.primary_model;
        req.system_prompt = system_prompt;
        req.user_prompt = llm::render(t, vars);
        req.schema = schema;
        req.schema_name = "extraction_rules";
        req.prompt_template = t.tag();
        req.page_id = page.page_id;
        return req;
    };

    struct Step {
        std::string program_text; ///< what the next refinement sees as the prior program
        std::string feedback;
        double similarity = 0.0;
    };
    // Runs one answer through parse, extraction and comparison; parse
    // failures score 0 and feed their issues back.
    auto assess = [&](const llm::CompletionRequest& req, llm::Role role, int c, int r) {
        Step s;
        std::string answer;
        try {
            answer = gateway.complete_structured(req, role).json_text;
        } catch (const SchemaViolation& e) {
            s.program_text = "{\"rules\":[]}";
            s.feedback = std::string("The answer did not conform to the response schema: ") + e.what();
            return s;
        }
        s.program_text = answer;
        json doc = json::parse(answer, nullptr, false);
        auto parsed = dsl::parse_rules(doc, desc);
        if (!parsed.program) {
            s.feedback = "The program is invalid:\n" + dsl::render_issues(parsed.issues);
            return s;
        }
        dsl::ExtractionProgram prog;
        prog.program_id = page.page_id + "/c" + std::to_string(c) + "r" + std::to_string(r);
        prog.target_schema_name = desc.name;
        prog.rules = std::move(*parsed.program);
        prog.created_by = cfg.primary_model;
        prog.generation = r;
        auto result = dsl::run_extraction(prog, page);
        auto report = similarity::compare(result.product, reference);
        s.similarity = report.overall;
        s.feedback = similarity::render_feedback(report);
        s.program_text = json{{"rules", dsl::rules_to_json(prog.rules)}}.dump();
        if (!have_best || report.overall > out.similarity) {
            out.best = std::move(prog);
            out.similarity = report.overall;
            have_best = true;
        }
        return s;
    };

    for (int c = 0; c <= cfg.max_alternatives; ++c) {
        ++out.generations;
        Step s = assess(request(gen_user, {{"candidate", std::to_string(c + 1)}}), llm::Role::FuncGen, c, 0);
        for (int r = 1; s.similarity < 1.0 && r <= cfg.max_refinements; ++r) {
            ++out.refinements;
            s = assess(request(refine_user, {{"candidate", std::to_string(c + 1)},
                                             {"refinement", std::to_string(r)},
                                             {"program", s.program_text},
                                             {"feedback", s.feedback}}),
                       llm::Role::Refine, c, r);
        }
        if (s.similarity >= 1.0) break;
    }
    out.accepted = have_best && out.similarity >= 1.0;
    if (!have_best) {
        out.best.program_id = page.page_id + "/empty";
        out.best.target_schema_name = desc.name;
        out.best.created_by = cfg.primary_model;
    }
    out.primary_calls = static_cast<int>(ledger_size(gateway) - before);
    return out;
}

std::vector<std::string> bootstrap_page_ids(const corpus::Corpus& corpus, const OrchestratorConfig& cfg) {
    std::vector<std::string> ids;
    if (!corpus.labels.empty()) {
        for (const auto& [id, positive] : corpus.labels) {
            bool found = std::any_of(corpus.pages.begin(), corpus.pages.end(),
                                     [&](const html::RawDocument& d) { return d.page_id == id; });
            if (!found) throw PreconditionViolation("labelled page " + id + " is not in the corpus");
            ids.push_back(id);
        }
        return ids;
    }
    if (corpus.truth.size() != corpus.pages.size()) {
        throw PreconditionViolation("no bootstrap labels and no ground truth to draw them from");
    }
    std::vector<std::string> pos, neg;
    for (const auto& r : corpus.truth) (corpus::is_positive(r) ? pos : neg).push_back(r.page_id);
    const std::uint64_t seed = derive_seed(cfg.rng_seed, "bootstrap");
    shuffle(pos, derive_seed(seed, "positive"));
    shuffle(neg, derive_seed(seed, "negative"));
    const std::size_t want_pos = static_cast<std::size_t>(cfg.bootstrap_sample_size + 1) / 2;
    const std::size_t want_neg = static_cast<std::size_t>(cfg.bootstrap_sample_size) / 2;
    if (pos.size() < want_pos || neg.size() < want_neg) {
        throw PreconditionViolation("the corpus has too few positive or negative pages for bootstrapping");
    }
    ids.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(want_pos));
    ids.insert(ids.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(want_neg));
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

struct Candidate {
    int attributes = 0;
    schema::FoodProduct product;
};

// Per page, extraction results of library programs by library index.
using ResultCache = std::vector<std::map<std::size_t, Candidate>>;

const Candidate& result_of(ResultCache& cache, std::size_t page, std::size_t prog, const FunctionLibrary& lib,
                           const html::CompressedDocument& doc) {
    auto it = cache[page].find(prog);
    if (it == cache[page].end()) {
        auto r = dsl::run_extraction(lib.entries()[prog].program, doc);
        Candidate c{dsl::count_extracted(r.product), std::move(r.product)};
        it = cache[page].emplace(prog, std::move(c)).first;
    }
    return it->second;
}

// Library index of the best result on a page: most attributes, then the
// higher mean over earlier selections, then the earlier program.
std::optional<std::size_t> select(ResultCache& cache, std::size_t page, const FunctionLibrary& lib,
                                  const html::CompressedDocument& doc, int min_valid) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < lib.size(); ++k) {
        const Candidate& c = result_of(cache, page, k, lib, doc);
        if (c.attributes < min_valid) continue;
        if (!best) {
            best = k;
            continue;
        }
        const Candidate& b = cache[page].at(*best);
        if (c.attributes > b.attributes ||
            (c.attributes == b.attributes &&
             lib.entries()[k].mean_attributes_extracted() > lib.entries()[*best].mean_attributes_extracted())) {
            best = k;
        }
    }
    return best;
}

bool primary_role(llm::Role r) { return r == llm::Role::Reference || r == llm::Role::FuncGen || r == llm::Role::Refine; }

} // namespace

ShopRun process_shop(const corpus::Corpus& corpus, llm::Provider& provider, const llm::PriceTable& prices,
                     const OrchestratorConfig& cfg, const schema::SchemaDescriptor& desc) {
    cfg.validate();
    ShopRun run;
    llm::Gateway gateway(provider, prices, run.ledger);
    const std::size_t n = corpus.pages.size();

    std::vector<html::CompressedDocument> compressed(n), text(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        compressed[i] = html::compress_html(corpus.pages[i]);
        text[i] = html::extract_text(compressed[i]);
    });
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of.emplace(corpus.pages[i].page_id, i);

    std::vector<LabeledSample> samples;
    for (const auto& id : bootstrap_page_ids(corpus, cfg)) {
        bool positive;
        if (auto it = corpus.labels.find(id); it != corpus.labels.end()) positive = it->second;
        else positive = corpus::is_positive(*corpus.truth_for(id));
        samples.push_back({text[index_of.at(id)], positive});
    }
    run.ensemble = build_decision_ensemble(samples, gateway, cfg);

    std::vector<char> decisions(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) { decisions[i] = decide(run.ensemble, text[i]); });

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle(order, derive_seed(cfg.rng_seed, "visit"));
    for (std::size_t i : order) run.visit_order.push_back(corpus.pages[i].page_id);

    run.results.resize(n);
    ResultCache cache(n);
    std::vector<std::optional<std::size_t>> chosen(n);
    auto take = [&](std::size_t i, std::size_t prog) {
        chosen[i] = prog;
        auto& e = run.library.entries()[prog];
        e.pages_matched += 1;
        e.attributes_total += cache[i].at(prog).attributes;
    };

    for (std::size_t i : order) {
        PageResult& res = run.results[i];
        res.page_id = corpus.pages[i].page_id;
        res.decision = decisions[i];
        if (auto k = select(cache, i, run.library, compressed[i], cfg.min_valid_attributes)) {
            take(i, *k);
            continue;
        }
        if (!res.decision) {
            res.status = "decision_negative";
            continue;
        }
        try {
            schema::FoodProduct reference = acquire_reference(compressed[i], desc, gateway, cfg);
            SynthesisOutcome syn = synthesize_program(compressed[i], reference, desc, gateway, cfg);
            const bool useful = dsl::count_extracted(dsl::run_extraction(syn.best, compressed[i]).product) >= 1;
            if (useful) {
                run.library.add({syn.best, res.page_id, syn.similarity, syn.accepted, 0, 0});
            }
            run.syntheses.push_back(std::move(syn));
            if (auto k = select(cache, i, run.library, compressed[i], cfg.min_valid_attributes)) {
                take(i, *k);
            } else {
                res.status = "no_result";
            }
        } catch (const ReferenceUnattainable& e) {
            res.status = "reference_unattainable";
            res.error = e.what();
        } catch (const PreconditionViolation&) {
            throw;
        } catch (const llm::UnknownModel&) {
            throw;
        } catch (const Error& e) {
            res.status = "failed";
            res.error = e.what();
        }
    }

    // Programs added late may beat what earlier pages got; re-select everywhere.
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        for (std::size_t k = 0; k < run.library.size(); ++k) {
            result_of(cache, i, k, run.library, compressed[i]);
        }
    });
    for (auto& e : run.library.entries()) {
        e.pages_matched = 0;
        e.attributes_total = 0;
    }
    std::vector<std::optional<std::size_t>> final_choice(n);
    for (std::size_t i = 0; i < n; ++i) final_choice[i] = select(cache, i, run.library, compressed[i], cfg.min_valid_attributes);
    for (std::size_t i = 0; i < n; ++i) {
        PageResult& res = run.results[i];
        if (!final_choice[i]) continue;
        take(i, *final_choice[i]);
        const auto& entry = run.library.entries()[*final_choice[i]];
        res.product = cache[i].at(*final_choice[i]).product;
        res.program_id = entry.program.program_id;
        res.status = entry.source_page_id == res.page_id ? "synthesized" : "library";
        res.error.reset();
    }

    ShopRunMetrics& m = run.metrics;
    m.shop_id = corpus.shop_id;
    m.seed = cfg.rng_seed;
    m.pages_total = static_cast<int>(n);
    for (const auto& e : run.ledger.entries()) {
        if (primary_role(e.role)) {
            ++m.llm_calls_primary_model;
            m.cost_primary += e.cost;
        } else if (e.role == llm::Role::DecisionGen) {
            ++m.llm_calls_decision_model;
            m.cost_decision += e.cost;
        }
    }
    m.functions_generated = static_cast<int>(run.ledger.count(llm::Role::FuncGen));
    m.refinements_performed = static_cast<int>(run.ledger.count(llm::Role::Refine));
    m.reference_extractions = static_cast<int>(run.ledger.count(llm::Role::Reference));
    m.syntheses = static_cast<int>(run.syntheses.size());
    for (const auto& s : run.syntheses) m.max_calls_per_synthesis = std::max(m.max_calls_per_synthesis, s.primary_calls);
    for (const auto& r : run.results) {
        m.reference_failures += r.status == "reference_unattainable";
        m.decision_positive_pages += r.decision;
        m.pages_with_result += r.program_id.has_value();
    }
    m.cost_total = run.ledger.total();
    if (n > 0 && corpus.truth.size() == n) {
        double sim = 0.0;
        int agree = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sim += similarity::compare(run.results[i].product, corpus.truth[i].product).overall;
            agree += run.results[i].decision == corpus::is_positive(corpus.truth[i]);
        }
        m.accuracy = 100.0 * sim / static_cast<double>(n);
        m.decision_accuracy = 100.0 * agree / static_cast<double>(n);
    }
    return run;
}

std::uint64_t run_seed(std::uint64_t master_seed, int index) {
    return derive_seed(master_seed, "run:" + std::to_string(index));
}

std::vector<ShopRun> process_runs(const corpus::Corpus& corpus, const ProviderFactory& make_provider,
                                  const llm::PriceTable& prices, const OrchestratorConfig& cfg, int runs,
                                  const schema::SchemaDescriptor& desc) {
    if (runs < 1) throw PreconditionViolation("runs must be >= 1");
    std::vector<ShopRun> out;
    for (int i = 0; i < runs; ++i) {
        OrchestratorConfig c = cfg;
        c.rng_seed = run_seed(cfg.rng_seed, i);
        auto provider = make_provider(c.rng_seed);
        out.push_back(process_shop(corpus, *provider, prices, c, desc));
    }
    return out;
}

} // namespace shopx::indirect
