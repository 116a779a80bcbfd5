#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "shopx/common/error.hpp"
#include "shopx/schema/descriptor.hpp"

namespace shopx::dsl {

enum class PostOpKind { Trim, StripLabelPrefix, ParseDecimalComma, ToUnitCode };

std::string_view to_string(PostOpKind k) noexcept;

struct PostOp {
    PostOpKind kind = PostOpKind::Trim;
    std::vector<std::string> prefixes;             ///< StripLabelPrefix; empty means the default label list
    std::map<std::string, std::string> unit_map;   ///< ToUnitCode; keys match case-insensitively
    std::optional<std::string> unit_default;       ///< ToUnitCode fallback

    bool operator==(const PostOp&) const = default;
};

struct FieldRule {
    std::string field_path; ///< "ingredient_statement", "fat.value", "fat.unit_code", ...
    std::string selector;
    std::optional<int> node_index;
    std::optional<std::string> capture; ///< regex; group 1 is the value
    std::vector<PostOp> post_ops;

    bool operator==(const FieldRule&) const = default;
};

struct ExtractionProgram {
    std::string program_id;
    std::string target_schema_name = "FoodBeverageTobaccoProduct";
    std::vector<FieldRule> rules;
    std::string created_by;
    int generation = 0;

    const FieldRule* rule_for(std::string_view field_path) const;
    bool operator==(const ExtractionProgram&) const = default;
};

struct Predicate {
    enum class Op { And, Or, Not, ContainsKeyword, MatchesRegex };
    Op op = Op::ContainsKeyword;
    std::string argument; ///< keyword or pattern for leaves
    std::vector<Predicate> args;

    static Predicate keyword(std::string k);
    static Predicate regex(std::string pattern);
    static Predicate all(std::vector<Predicate> xs);
    static Predicate any(std::vector<Predicate> xs);
    static Predicate negate(Predicate x);

    int depth() const;
    bool operator==(const Predicate&) const = default;
};

struct DecisionProgram {
    std::string program_id;
    Predicate predicate;
    std::string created_by;

    bool operator==(const DecisionProgram&) const = default;
};

inline constexpr int kMaxPredicateDepth = 8;

enum class IssueKind { Malformed, InvalidSelector, InvalidRegex, UnknownField, UnknownPostOp, InapplicablePostOp,
                       DuplicateRule, TooDeep };

std::string_view to_string(IssueKind k) noexcept;

struct ProgramIssue {
    std::string path; ///< e.g. "rules[2].selector"
    IssueKind kind = IssueKind::Malformed;
    std::string message;
};

/// Renders issues one per line so they can be fed back into a prompt.
std::string render_issues(const std::vector<ProgramIssue>& issues);

class ProgramError : public Error {
public:
    explicit ProgramError(std::vector<ProgramIssue> issues);
    const std::vector<ProgramIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ProgramIssue> issues_;
};

// Thrown by the *_or_throw parsers according to the first issue.
class InvalidSelector : public ProgramError {
public:
    using ProgramError::ProgramError;
};
class InvalidRegex : public ProgramError {
public:
    using ProgramError::ProgramError;
};
class UnknownField : public ProgramError {
public:
    using ProgramError::ProgramError;
};
class UnknownPostOp : public ProgramError {
public:
    using ProgramError::ProgramError;
};

using Program = std::variant<ExtractionProgram, DecisionProgram>;

template <class T>
struct Parsed {
    std::optional<T> program;
    std::vector<ProgramIssue> issues;
    bool ok() const noexcept { return program.has_value(); }
};

/// Accepts a full canonical document with "kind" set to "extraction" or "decision".
Parsed<Program> parse_program(std::string_view json_text,
                              const schema::SchemaDescriptor& desc = schema::food_product_descriptor());
Program parse_program_or_throw(std::string_view json_text,
                               const schema::SchemaDescriptor& desc = schema::food_product_descriptor());

Parsed<ExtractionProgram> parse_extraction(const nlohmann::json& doc,
                                           const schema::SchemaDescriptor& desc = schema::food_product_descriptor());
Parsed<DecisionProgram> parse_decision(const nlohmann::json& doc);

/// Rules only, as answered by the model: {"rules": [...]}.
Parsed<std::vector<FieldRule>> parse_rules(const nlohmann::json& doc,
                                           const schema::SchemaDescriptor& desc = schema::food_product_descriptor());
/// Predicate only, as answered by the model: {"predicate": {...}}.
Parsed<Predicate> parse_predicate_response(const nlohmann::json& doc);

nlohmann::json to_json(const FieldRule& r);
nlohmann::json to_json(const Predicate& p);
nlohmann::json to_json(const ExtractionProgram& p);
nlohmann::json to_json(const DecisionProgram& p);
nlohmann::json rules_to_json(const std::vector<FieldRule>& rules);

/// Compact JSON with sorted keys.
std::string serialize(const ExtractionProgram& p);
std::string serialize(const DecisionProgram& p);
std::string serialize(const Program& p);

/// JSON Schema of a model answer: {"rules": [...]} with field paths of `desc`.
nlohmann::json extraction_response_schema(const schema::SchemaDescriptor& desc = schema::food_product_descriptor());
/// JSON Schema of a model answer: {"predicate": ...}.
nlohmann::json decision_response_schema();
/// JSON Schema of a complete canonical program document of either kind.
nlohmann::json program_document_schema(const schema::SchemaDescriptor& desc = schema::food_product_descriptor());

} // namespace shopx::dsl
