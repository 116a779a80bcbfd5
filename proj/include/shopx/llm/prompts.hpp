#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shopx::llm {

/// A prompt text asset, compiled in from assets/prompts/<id>.v<version>.txt.
struct PromptTemplate {
    std::string id;
    int version = 0;
    std::string text;
    std::string hash; ///< first 16 hex digits of the SHA-256 of text

    /// "id@version#hash", recorded in ledgers.
    std::string tag() const;
};

/// Latest version of a template. Throws Error for unknown ids.
const PromptTemplate& prompt_template(std::string_view id);
std::vector<const PromptTemplate*> all_prompt_templates();

/// Replaces every {{name}}. Throws Error for a placeholder without a value.
std::string render(const PromptTemplate& t, const std::map<std::string, std::string>& vars);

/// Body between "=== NAME ===" and "=== END NAME ===" lines.
std::optional<std::string> prompt_section(std::string_view text, std::string_view name);
/// Value of the first "Key: value" line.
std::optional<std::string> prompt_header(std::string_view text, std::string_view key);

std::string section(std::string_view name, std::string_view body);

} // namespace shopx::llm
