// shopx: command-line front end.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shopx/corpus/corpus.hpp"
#include "shopx/direct/direct.hpp"
#include "shopx/dsl/program.hpp"
#include "shopx/eval/report.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/indirect/orchestrator.hpp"
#include "shopx/llm/live.hpp"
#include "shopx/llm/prompts.hpp"
#include "shopx/llm/session.hpp"
#include "shopx/oracle/oracle.hpp"
#include "shopx/schema/descriptor.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shopx;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) {
    json j = json::parse(read_text(p), nullptr, false);
    if (j.is_discarded()) throw Error(p.string() + " is not valid JSON");
    return j;
}

void write_text(const fs::path& p, const std::string& data) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << data;
    }
    fs::rename(tmp, p);
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

void emit(const std::optional<fs::path>& out, const std::string& data) {
    if (out) write_text(*out, data);
    else std::cout << data;
}

struct Globals {
    std::optional<fs::path> config_file;
    std::uint64_t seed = 7;
    std::string provider = "oracle";
    std::optional<fs::path> session;
    bool record = false;
    std::optional<fs::path> prices_file;
    std::size_t threads = 4;

    // Oracle knobs; flags override the config file's "oracle" section.
    std::optional<int> oracle_imperfections;
    std::optional<int> oracle_random_imperfections;
    std::optional<double> oracle_decision_noise;
    std::optional<double> oracle_reference_dropout;
    std::vector<std::string> oracle_unreparable;

    json config() const { return config_file ? read_json(*config_file) : json::object(); }

    llm::PriceTable prices() const {
        if (prices_file) return llm::PriceTable::load(prices_file->string());
        json c = config();
        if (c.contains("prices")) return llm::PriceTable::from_json(c["prices"]);
        return llm::PriceTable::defaults();
    }

    oracle::OracleConfig oracle_config(std::uint64_t run_seed) const {
        json c = config();
        oracle::OracleConfig o = oracle::OracleConfig::from_json(c.value("oracle", json::object()));
        if (oracle_imperfections) o.imperfections = *oracle_imperfections;
        if (oracle_random_imperfections) o.max_random_imperfections = *oracle_random_imperfections;
        if (oracle_decision_noise) o.decision_noise = *oracle_decision_noise;
        if (oracle_reference_dropout) o.reference_dropout = *oracle_reference_dropout;
        for (const auto& t : oracle_unreparable) o.unreparable_templates.insert(t);
        o.seed = run_seed;
        return oracle::OracleConfig::from_json(o.to_json());
    }

    json provider_json(std::uint64_t run_seed) const {
        json j = {{"kind", provider}, {"record", record}};
        if (session) j["session"] = session->string();
        if (provider == "oracle") j["oracle"] = oracle_config(run_seed).to_json();
        if (provider == "live") j["base_url"] = llm::LiveConfig::from_env().base_url;
        return j;
    }
};

// A provider plus whatever it wraps, kept alive together.
struct ProviderStack {
    std::unique_ptr<llm::Provider> base;
    std::unique_ptr<llm::Provider> top;
    llm::Provider& get() { return top ? *top : *base; }
};

ProviderStack make_provider(const Globals& g, const corpus::Corpus& corpus, std::uint64_t seed,
                            const std::optional<fs::path>& session_dir) {
    ProviderStack s;
    if (g.provider == "oracle") {
        if (corpus.truth.size() != corpus.pages.size()) {
            throw PreconditionViolation("the oracle provider needs a corpus with truth.jsonl");
        }
        s.base = std::make_unique<oracle::OracleProvider>(corpus, g.oracle_config(seed));
    } else if (g.provider == "live") {
        auto cfg = llm::LiveConfig::from_env();
        if (cfg.base_url.empty()) throw PreconditionViolation("SHOPX_LLM_BASE_URL is not set");
        s.base = std::make_unique<llm::LiveProvider>(cfg);
    } else if (g.provider == "replay") {
        if (!session_dir) throw PreconditionViolation("--provider replay needs --session");
        s.base = std::make_unique<llm::ReplayProvider>(*session_dir);
        return s;
    } else {
        throw PreconditionViolation("unknown provider '" + g.provider + "'");
    }
    if (g.record) {
        if (!session_dir) throw PreconditionViolation("--record needs --session");
        s.top = std::make_unique<llm::RecordingProvider>(*s.base, *session_dir);
    }
    return s;
}

json prompt_tags() {
    json tags = json::array();
    for (const auto* t : llm::all_prompt_templates()) tags.push_back(t->tag());
    return tags;
}

corpus::Corpus load_corpus_with_labels(const fs::path& dir, const std::optional<fs::path>& labels) {
    corpus::Corpus c = corpus::load_corpus(dir);
    if (labels) {
        json j = read_json(*labels);
        if (!j.is_object()) throw Error(labels->string() + " must map page ids to booleans");
        c.labels.clear();
        for (const auto& [id, v] : j.items()) {
            if (!v.is_boolean()) throw Error(labels->string() + ": '" + id + "' is not a boolean");
            c.labels[id] = v.get<bool>();
        }
    }
    return c;
}

std::string fingerprint_of(const corpus::Corpus& c) {
    return c.truth.size() == c.pages.size() && !c.truth.empty() ? eval::corpus_fingerprint(c.truth) : "";
}

// ---- corpus generate -------------------------------------------------------

struct GenerateArgs {
    std::string preset = "alpha";
    int pages = 100;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> shop_id;
    fs::path out;
};

void run_generate(const Globals& g, const GenerateArgs& a) {
    auto spec = corpus::preset(a.preset, a.pages, a.seed.value_or(g.seed));
    if (a.shop_id) spec.shop_id = *a.shop_id;
    auto c = corpus::generate_shop(spec);
    corpus::write_corpus(c, a.out);
    std::cout << "wrote " << c.pages.size() << " pages of shop " << c.shop_id << " to " << a.out.string() << "\n";
}

// ---- compress ----------------------------------------------------------------

struct CompressArgs {
    std::optional<fs::path> input;
    std::optional<fs::path> corpus_dir;
    std::string variant = "html_compressed";
    std::optional<fs::path> out;
};

void run_compress(const CompressArgs& a) {
    const auto variant = html::parse_variant(a.variant);
    auto convert = [&](const html::RawDocument& d) {
        auto c = html::compress_html(d);
        return variant == html::Variant::Text ? html::extract_text(c) : c;
    };
    if (a.input) {
        auto doc = convert({a.input->stem().string(), "", read_text(*a.input)});
        emit(a.out, doc.content);
        std::cerr << doc.token_count << " tokens\n";
        return;
    }
    if (!a.corpus_dir || !a.out) throw PreconditionViolation("give --in, or --corpus with --out");
    auto c = corpus::load_corpus(*a.corpus_dir);
    const std::string ext = variant == html::Variant::Text ? ".txt" : ".html";
    std::int64_t raw = 0, reduced = 0;
    for (const auto& page : c.pages) {
        auto doc = convert(page);
        write_text(*a.out / (page.page_id + ext), doc.content);
        raw += html::count_tokens(page.html);
        reduced += doc.token_count;
    }
    std::cout << c.pages.size() << " pages, " << raw << " -> " << reduced << " tokens\n";
}

// ---- extract direct ----------------------------------------------------------

struct DirectArgs {
    fs::path corpus_dir;
    std::string variant = "html_compressed";
    std::string model = "o3-mini";
    fs::path out;
};

void run_direct(const Globals& g, const DirectArgs& a) {
    auto c = corpus::load_corpus(a.corpus_dir);
    auto stack = make_provider(g, c, g.seed, g.session);
    fs::create_directories(a.out);
    llm::CostLedger ledger;
    if (fs::exists(a.out / "ledger.json")) ledger = llm::CostLedger::from_json(read_json(a.out / "ledger.json"));
    llm::Gateway gateway(stack.get(), g.prices(), ledger);

    direct::BatchOptions opts;
    opts.variant = html::parse_variant(a.variant);
    opts.model_id = a.model;
    opts.threads = g.threads;
    opts.out_dir = a.out;
    direct::BatchOutcome outcome;
    try {
        outcome = direct::extract_direct_batch(c, schema::food_product_descriptor(), gateway, opts);
    } catch (...) {
        write_json(a.out / "ledger.json", ledger.to_json());
        throw;
    }
    write_json(a.out / "ledger.json", ledger.to_json());
    json failures = json::object();
    for (const auto& [id, msg] : outcome.failures) failures[id] = msg;
    write_json(a.out / "failures.json", failures);
    write_json(a.out / "manifest.json",
               {{"tool", "shopx"},
                {"version", kVersion},
                {"command", "extract direct"},
                {"strategy", "direct"},
                {"shop_id", c.shop_id},
                {"corpus", fs::absolute(a.corpus_dir).lexically_normal().string()},
                {"corpus_fingerprint", fingerprint_of(c)},
                {"variant", html::to_string(opts.variant)},
                {"model_id", a.model},
                {"seed", g.seed},
                {"provider", g.provider_json(g.seed)},
                {"prompt_templates", prompt_tags()}});
    std::cout << outcome.results.size() << " products (" << outcome.resumed.size() << " resumed), "
              << outcome.failures.size() << " failures, " << ledger.size() << " calls, $" << ledger.total().usd()
              << "\n";
    if (!outcome.failures.empty()) throw Error(std::to_string(outcome.failures.size()) + " pages failed");
}

// ---- extract indirect --------------------------------------------------------

struct IndirectArgs {
    fs::path corpus_dir;
    std::optional<fs::path> labels;
    int runs = 10;
    fs::path out;
};

std::string run_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run-%02d", i);
    return buf;
}

void write_run(const fs::path& dir, const indirect::ShopRun& run) {
    write_json(dir / "metrics.json", run.metrics.to_json());
    write_json(dir / "library.json", run.library.to_json());
    write_json(dir / "ledger.json", run.ledger.to_json());
    json ensemble = json::array();
    for (const auto& p : run.ensemble) ensemble.push_back(dsl::to_json(p));
    write_json(dir / "ensemble.json", ensemble);
    std::string lines;
    for (const auto& r : run.results) {
        json j = {{"page_id", r.page_id},
                  {"product", schema::product_to_json(r.product)},
                  {"status", r.status},
                  {"decision", r.decision}};
        j["program_id"] = r.program_id ? json(*r.program_id) : json(nullptr);
        if (r.error) j["error"] = *r.error;
        lines += j.dump() + "\n";
    }
    write_text(dir / "products.jsonl", lines);
    json order = run.visit_order;
    write_json(dir / "visit_order.json", order);
}

void run_indirect(const Globals& g, const IndirectArgs& a) {
    if (a.runs < 1) throw PreconditionViolation("--runs must be >= 1");
    auto c = load_corpus_with_labels(a.corpus_dir, a.labels);
    json conf = g.config();
    indirect::OrchestratorConfig cfg = indirect::OrchestratorConfig::from_json(conf.value("orchestrator", json::object()));
    cfg.rng_seed = g.seed;
    cfg.threads = g.threads;
    const auto prices = g.prices();
    fs::create_directories(a.out);

    json runs = json::array();
    std::vector<double> acc, calls, decision_acc;
    for (int i = 0; i < a.runs; ++i) {
        indirect::OrchestratorConfig rc = cfg;
        rc.rng_seed = indirect::run_seed(g.seed, i);
        const fs::path dir = a.out / run_name(i);
        std::optional<fs::path> session;
        if (g.session) session = *g.session / run_name(i);
        auto stack = make_provider(g, c, rc.rng_seed, session);
        auto run = indirect::process_shop(c, stack.get(), prices, rc);
        write_run(dir, run);
        const auto& m = run.metrics;
        runs.push_back({{"index", i},
                        {"seed", rc.rng_seed},
                        {"dir", run_name(i)},
                        {"metrics", run_name(i) + "/metrics.json"},
                        {"llm_calls_primary_model", m.llm_calls_primary_model},
                        {"accuracy", m.accuracy ? json(*m.accuracy) : json(nullptr)}});
        calls.push_back(m.llm_calls_primary_model);
        if (m.accuracy) acc.push_back(*m.accuracy);
        if (m.decision_accuracy) decision_acc.push_back(*m.decision_accuracy);
        std::cout << run_name(i) << ": seed " << rc.rng_seed << ", " << m.llm_calls_primary_model
                  << " primary calls, " << m.functions_generated << " functions, " << m.refinements_performed
                  << " refinements";
        if (m.accuracy) std::cout << ", accuracy " << *m.accuracy;
        std::cout << "\n";
    }
    auto stats = [](const std::vector<double>& xs) {
        auto d = eval::DistributionStats::of(xs);
        return json{{"n", d.n}, {"min", d.min}, {"max", d.max}, {"mean", d.mean}, {"stddev", d.stddev}};
    };
    json summary = {{"shop_id", c.shop_id},
                    {"master_seed", g.seed},
                    {"runs", runs},
                    {"llm_calls_primary_model", stats(calls)}};
    if (!acc.empty()) summary["accuracy"] = stats(acc);
    if (!decision_acc.empty()) summary["decision_accuracy"] = stats(decision_acc);
    write_json(a.out / "summary.json", summary);
    write_json(a.out / "manifest.json",
               {{"tool", "shopx"},
                {"version", kVersion},
                {"command", "extract indirect"},
                {"strategy", "indirect"},
                {"shop_id", c.shop_id},
                {"corpus", fs::absolute(a.corpus_dir).lexically_normal().string()},
                {"corpus_fingerprint", fingerprint_of(c)},
                {"labels", a.labels ? json(fs::absolute(*a.labels).lexically_normal().string()) : json(nullptr)},
                {"master_seed", g.seed},
                {"runs", a.runs},
                {"orchestrator", cfg.to_json()},
                {"provider", g.provider_json(g.seed)},
                {"prompt_templates", prompt_tags()}});
}

// ---- evaluate / compare --------------------------------------------------------

std::vector<eval::PageProduct> products_jsonl(const fs::path& p) {
    std::vector<eval::PageProduct> out;
    std::istringstream in(read_text(p));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        auto parsed = schema::parse_product_json(j.at("product"));
        if (!parsed.product) throw SchemaViolation(p.string(), describe(parsed.errors));
        out.push_back({j.at("page_id").get<std::string>(), std::move(*parsed.product)});
    }
    return out;
}

eval::ShopReport evaluate_run_dir(const fs::path& dir, const std::optional<fs::path>& corpus_override,
                                  eval::Strategy& strategy) {
    json manifest = read_json(dir / "manifest.json");
    strategy = eval::parse_strategy(manifest.at("strategy").get<std::string>());
    fs::path corpus_dir = corpus_override ? *corpus_override : fs::path(manifest.at("corpus").get<std::string>());
    auto c = corpus::load_corpus(corpus_dir);
    if (c.truth.size() != c.pages.size() || c.truth.empty()) {
        throw eval::MissingTruth(corpus_dir.string() + " has no ground truth");
    }
    std::vector<eval::RunInput> runs;
    std::string variant;
    if (strategy == eval::Strategy::Direct) {
        variant = manifest.value("variant", "");
        eval::RunInput r;
        for (const auto& page : c.pages) {
            fs::path p = dir / "products" / (page.page_id + ".json");
            if (!fs::exists(p)) continue;
            r.products.push_back({page.page_id, schema::parse_product_or_throw(read_text(p))});
        }
        r.ledger = llm::CostLedger::from_json(read_json(dir / "ledger.json"));
        runs.push_back(std::move(r));
    } else {
        for (int i = 0; i < manifest.at("runs").get<int>(); ++i) {
            fs::path rd = dir / run_name(i);
            runs.push_back({products_jsonl(rd / "products.jsonl"), llm::CostLedger::from_json(read_json(rd / "ledger.json"))});
        }
    }
    return eval::evaluate(c.shop_id, runs, c.truth, variant);
}

struct EvaluateArgs {
    std::vector<fs::path> run_dirs;
    std::optional<fs::path> corpus_dir;
    std::string format = "markdown";
    std::optional<fs::path> out;
    std::optional<fs::path> distribution_csv;
};

void run_evaluate(const EvaluateArgs& a) {
    if (a.corpus_dir && a.run_dirs.size() > 1) throw PreconditionViolation("--corpus works with a single --run only");
    eval::RunReport report;
    for (std::size_t i = 0; i < a.run_dirs.size(); ++i) {
        eval::Strategy s;
        report.shops.push_back(evaluate_run_dir(a.run_dirs[i], a.corpus_dir, s));
        if (i == 0) report.strategy = s;
        else if (s != report.strategy) throw PreconditionViolation("runs of different strategies cannot share a report");
    }
    emit(a.out, eval::emit_report(report, eval::parse_format(a.format)));
    if (a.distribution_csv) write_text(*a.distribution_csv, eval::emit_distribution_csv(report));
}

struct CompareArgs {
    fs::path direct_report;
    fs::path indirect_report;
    std::string format = "markdown";
    std::optional<fs::path> out;
};

void run_compare(const CompareArgs& a) {
    auto d = eval::report_from_json(read_json(a.direct_report));
    auto i = eval::report_from_json(read_json(a.indirect_report));
    emit(a.out, eval::emit_comparison(eval::compare_strategies(d, i), eval::parse_format(a.format)));
}

// ---- schema emit ---------------------------------------------------------------

void run_schema(const std::string& what, const std::optional<fs::path>& out) {
    const auto& desc = schema::food_product_descriptor();
    json j;
    if (what == "product") j = schema::to_json_schema_document(desc);
    else if (what == "rules") j = dsl::extraction_response_schema(desc);
    else if (what == "predicate") j = dsl::decision_response_schema();
    else if (what == "program") j = dsl::program_document_schema(desc);
    else throw PreconditionViolation("unknown schema '" + what + "'");
    emit(out, j.dump(2) + "\n");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schema-constrained product data extraction from shop pages"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Globals g;
    app.add_option("--config", g.config_file, "JSON file with orchestrator, oracle and prices sections")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--provider", g.provider, "oracle, live or replay")
        ->check(CLI::IsMember({"oracle", "live", "replay"}));
    app.add_option("--session", g.session, "Session directory for --record and replay");
    app.add_flag("--record", g.record, "Record every exchange into --session");
    app.add_option("--prices", g.prices_file, "Price table JSON")->check(CLI::ExistingFile);
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--oracle-imperfections", g.oracle_imperfections, "Broken rules per generated program");
    app.add_option("--oracle-random-imperfections", g.oracle_random_imperfections,
                   "Draw 0..N broken rules per generated program");
    app.add_option("--oracle-decision-noise", g.oracle_decision_noise, "Chance of a sloppy decision program");
    app.add_option("--oracle-reference-dropout", g.oracle_reference_dropout,
                   "Chance that a direct answer omits one attribute");
    app.add_option("--oracle-unreparable", g.oracle_unreparable, "Template the oracle never repairs");

    auto* corpus_cmd = app.add_subcommand("corpus", "Synthetic corpora");
    corpus_cmd->require_subcommand(1);
    GenerateArgs gen;
    auto* gen_cmd = corpus_cmd->add_subcommand("generate", "Generate a synthetic shop");
    gen_cmd->add_option("--preset", gen.preset, "alpha, beta or gamma");
    gen_cmd->add_option("--pages", gen.pages, "Number of pages")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--corpus-seed", gen.seed, "Seed of the corpus (defaults to --seed)");
    gen_cmd->add_option("--shop-id", gen.shop_id, "Override the shop id");
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();

    CompressArgs comp;
    auto* comp_cmd = app.add_subcommand("compress", "Reduce pages to HTML_COMPRESSED or TEXT");
    comp_cmd->add_option("--in", comp.input, "A single HTML file")->check(CLI::ExistingFile);
    comp_cmd->add_option("--corpus", comp.corpus_dir, "A corpus directory")->check(CLI::ExistingDirectory);
    comp_cmd->add_option("--variant", comp.variant, "html_compressed or text");
    comp_cmd->add_option("--out", comp.out, "Output file (--in) or directory (--corpus)");

    auto* extract_cmd = app.add_subcommand("extract", "Run an extraction strategy");
    extract_cmd->require_subcommand(1);
    DirectArgs dir_args;
    auto* direct_cmd = extract_cmd->add_subcommand("direct", "One model call per page");
    direct_cmd->add_option("--corpus", dir_args.corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    direct_cmd->add_option("--variant", dir_args.variant, "html_compressed or text");
    direct_cmd->add_option("--model", dir_args.model, "Model id");
    direct_cmd->add_option("--out", dir_args.out, "Run directory")->required();

    IndirectArgs ind;
    auto* indirect_cmd = extract_cmd->add_subcommand("indirect", "Generated, reusable extraction programs");
    indirect_cmd->add_option("--corpus", ind.corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    indirect_cmd->add_option("--labels", ind.labels, "Bootstrap labels: page id -> bool")->check(CLI::ExistingFile);
    indirect_cmd->add_option("--runs", ind.runs, "Independent runs with derived seeds");
    indirect_cmd->add_option("--out", ind.out, "Run directory")->required();

    EvaluateArgs ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score run directories against ground truth");
    eval_cmd->add_option("--run", ev.run_dirs, "Run directory (repeatable)")->required()->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--corpus", ev.corpus_dir, "Corpus directory (defaults to the run's manifest)")
        ->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--format", ev.format, "json, csv or markdown");
    eval_cmd->add_option("--out", ev.out, "Output file");
    eval_cmd->add_option("--distribution-csv", ev.distribution_csv, "Per-run accuracies as CSV");

    CompareArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "Compare a direct and an indirect JSON report");
    cmp_cmd->add_option("--direct", cmp.direct_report, "Direct report JSON")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--indirect", cmp.indirect_report, "Indirect report JSON")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--format", cmp.format, "json, csv or markdown");
    cmp_cmd->add_option("--out", cmp.out, "Output file");

    auto* schema_cmd = app.add_subcommand("schema", "JSON Schemas");
    schema_cmd->require_subcommand(1);
    std::string schema_what = "product";
    std::optional<fs::path> schema_out;
    auto* schema_emit = schema_cmd->add_subcommand("emit", "Print a JSON Schema");
    schema_emit->add_option("--what", schema_what, "product, rules, predicate or program");
    schema_emit->add_option("--out", schema_out, "Output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) run_generate(g, gen);
        else if (*comp_cmd) run_compress(comp);
        else if (*direct_cmd) run_direct(g, dir_args);
        else if (*indirect_cmd) run_indirect(g, ind);
        else if (*eval_cmd) run_evaluate(ev);
        else if (*cmp_cmd) run_compare(cmp);
        else if (*schema_emit) run_schema(schema_what, schema_out);
    } catch (const PreconditionViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
