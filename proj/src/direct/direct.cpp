#include "shopx/direct/direct.hpp"

#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "shopx/common/parallel.hpp"
#include "shopx/llm/prompts.hpp"
#include "shopx/schema/json_schema.hpp"

namespace shopx::direct {

namespace fs = std::filesystem;
using nlohmann::json;

llm::CompletionRequest direct_request(const html::CompressedDocument& doc, const schema::SchemaDescriptor& desc,
                                      const std::string& model_id) {
    const auto& sys = llm::prompt_template("direct_system");
    const auto& user = llm::prompt_template("direct_user");
    llm::CompletionRequest req;
    req.model_id = model_id;
    req.system_prompt = llm::render(sys, {{"schema", schema::to_json_schema(desc)}});
    req.user_prompt = llm::render(user, {{"variant", std::string(html::to_string(doc.variant))}, {"page", doc.content}});
    req.schema = schema::to_json_schema_document(desc);
    req.schema_name = desc.name;
    req.prompt_template = user.tag();
    req.page_id = doc.page_id;
    return req;
}

DirectResult extract_direct(const html::CompressedDocument& doc, const schema::SchemaDescriptor& desc,
                            llm::Gateway& gateway, const std::string& model_id, llm::Role role) {
    llm::StructuredResult answer;
    try {
        answer = gateway.complete_structured(direct_request(doc, desc, model_id), role);
    } catch (const SchemaViolation& e) {
        throw ExtractionFailed(doc.page_id + ": " + e.what());
    }
    auto parsed = schema::parse_product(answer.json_text);
    if (!parsed.product) throw ExtractionFailed(doc.page_id + ": " + describe(parsed.errors));
    return {doc.page_id, std::move(*parsed.product), answer.usage, doc.variant, answer.calls};
}

namespace {

void write_atomic(const fs::path& p, const std::string& data) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << data;
        if (!out) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

BatchOutcome extract_direct_batch(const corpus::Corpus& corpus, const schema::SchemaDescriptor& desc,
                                  llm::Gateway& gateway, const BatchOptions& opts) {
    BatchOutcome out;
    std::set<std::string> done;
    fs::path checkpoint;
    if (opts.out_dir) {
        fs::create_directories(*opts.out_dir / "products");
        checkpoint = *opts.out_dir / "checkpoint.json";
        if (auto text = read_file(checkpoint)) {
            json j = json::parse(*text, nullptr, false);
            if (j.is_discarded() || !j.is_object()) throw Error(checkpoint.string() + " is not a valid checkpoint");
            if (j.value("variant", "") != html::to_string(opts.variant) || j.value("model_id", "") != opts.model_id) {
                throw PreconditionViolation("checkpoint in " + opts.out_dir->string() +
                                            " was written for a different variant or model");
            }
            for (const auto& id : j.value("done", json::array())) done.insert(id.get<std::string>());
        }
    }

    std::vector<std::optional<DirectResult>> slots(corpus.pages.size());
    std::mutex mutex;
    auto save_progress = [&] {
        json j = {{"variant", html::to_string(opts.variant)}, {"model_id", opts.model_id}, {"done", done}};
        write_atomic(checkpoint, j.dump(2) + "\n");
    };

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < corpus.pages.size(); ++i) {
        const std::string& id = corpus.pages[i].page_id;
        if (opts.out_dir && done.count(id)) {
            auto text = read_file(*opts.out_dir / "products" / (id + ".json"));
            auto parsed = text ? schema::parse_product(*text) : schema::ProductParse{};
            if (parsed.product) {
                slots[i] = DirectResult{id, std::move(*parsed.product), {}, opts.variant, 0};
                out.resumed.push_back(id);
                continue;
            }
            done.erase(id);
        }
        todo.push_back(i);
    }

    parallel_for(todo.size(), opts.threads, [&](std::size_t k) {
        const std::size_t i = todo[k];
        const auto& page = corpus.pages[i];
        try {
            auto compressed = html::compress_html(page);
            if (opts.variant == html::Variant::Text) compressed = html::extract_text(compressed);
            DirectResult r = extract_direct(compressed, desc, gateway, opts.model_id, llm::Role::Direct);
            if (opts.out_dir) {
                write_atomic(*opts.out_dir / "products" / (page.page_id + ".json"),
                             schema::product_to_json(r.product).dump(2) + "\n");
            }
            std::lock_guard lock(mutex);
            slots[i] = std::move(r);
            if (opts.out_dir) {
                done.insert(page.page_id);
                save_progress();
            }
        } catch (const PreconditionViolation&) {
            throw;
        } catch (const llm::UnknownModel&) {
            throw;
        } catch (const std::exception& e) {
            std::lock_guard lock(mutex);
            out.failures[page.page_id] = e.what();
        }
    });

    for (auto& s : slots) {
        if (s) out.results.push_back(std::move(*s));
    }
    return out;
}

} // namespace shopx::direct
