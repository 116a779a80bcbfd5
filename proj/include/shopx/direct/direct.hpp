#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shopx/corpus/corpus.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/llm/gateway.hpp"
#include "shopx/schema/descriptor.hpp"
#include "shopx/schema/product.hpp"

namespace shopx::direct {

struct DirectResult {
    std::string page_id;
    schema::FoodProduct product;
    llm::Usage usage;
    html::Variant variant_used = html::Variant::HtmlCompressed;
    int calls = 0;
};

class ExtractionFailed : public Error {
public:
    using Error::Error;
};

/// The user prompt sent for `doc`; exposed so callers can record or inspect it.
llm::CompletionRequest direct_request(const html::CompressedDocument& doc, const schema::SchemaDescriptor& desc,
                                      const std::string& model_id);

/// One schema-constrained call (plus the gateway's corrective retry). Throws
/// ExtractionFailed when the answer still violates the schema or does not
/// parse as a product; provider errors propagate.
DirectResult extract_direct(const html::CompressedDocument& doc, const schema::SchemaDescriptor& desc,
                            llm::Gateway& gateway, const std::string& model_id,
                            llm::Role role = llm::Role::Direct);

struct BatchOptions {
    html::Variant variant = html::Variant::HtmlCompressed;
    std::string model_id = "o3-mini";
    std::size_t threads = 4;
    /// When set, products are written to <out_dir>/products/<page_id>.json and
    /// progress to <out_dir>/checkpoint.json; finished pages are skipped on rerun.
    std::optional<std::filesystem::path> out_dir;
};

struct BatchOutcome {
    std::vector<DirectResult> results;          ///< corpus order, failed pages left out
    std::map<std::string, std::string> failures; ///< page_id -> message
    std::vector<std::string> resumed;           ///< page ids loaded from the checkpoint
};

BatchOutcome extract_direct_batch(const corpus::Corpus& corpus, const schema::SchemaDescriptor& desc,
                                  llm::Gateway& gateway, const BatchOptions& opts);

} // namespace shopx::direct
