#pragma once

#include <map>
#include <string>

#include "shopx/dsl/program.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/html/dom.hpp"
#include "shopx/schema/product.hpp"

namespace shopx::dsl {

enum class FieldStatus { Extracted, NoMatch, PostOpFailed };

std::string_view to_string(FieldStatus s) noexcept;

struct ExtractionResult {
    schema::FoodProduct product;
    std::map<std::string, FieldStatus> field_status; ///< keyed by rule field path
};

struct InterpreterLimits {
    std::size_t max_selector_matches = 10'000;
};

/// Evaluates every rule independently against an HTML_COMPRESSED document.
/// A quantity is produced only when its .value rule succeeds.
/// Throws html::WrongVariant for TEXT input.
ExtractionResult run_extraction(const ExtractionProgram& prog, const html::CompressedDocument& doc,
                                const InterpreterLimits& limits = {});
/// Same, against an already parsed document.
ExtractionResult run_extraction(const ExtractionProgram& prog, const html::Document& dom,
                                const InterpreterLimits& limits = {});

/// Evaluates the predicate over TEXT content. Throws html::WrongVariant for
/// HTML_COMPRESSED input.
bool run_decision(const DecisionProgram& prog, const html::CompressedDocument& doc);
bool evaluate(const Predicate& p, std::string_view text);

/// Populated top-level attributes; a quantity counts when its value is set.
int count_extracted(const schema::FoodProduct& product);

} // namespace shopx::dsl
