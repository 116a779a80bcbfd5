#include "shopx/llm/prompts.hpp"


#include "shopx/common/error.hpp"
#include "shopx/common/hash.hpp"
#include "shopx/common/text.hpp"

namespace shopx::llm {

// Generated from assets/prompts at configure time.
extern const std::vector<std::pair<std::string_view, std::string_view>> kPromptAssets;

std::string PromptTemplate::tag() const { return id + "@" + std::to_string(version) + "#" + hash; }

namespace {

const std::map<std::string, PromptTemplate, std::less<>>& registry() {
    static const auto table = [] {
        std::map<std::string, PromptTemplate, std::less<>> out;
        for (const auto& [name, body] : kPromptAssets) {
            auto dot = name.rfind(".v");
            if (dot == std::string_view::npos) throw Error("prompt asset without version: " + std::string(name));
            PromptTemplate t;
            t.id = std::string(name.substr(0, dot));
            t.version = std::stoi(std::string(name.substr(dot + 2)));
            t.text = std::string(body);
            t.hash = sha256_hex(t.text).substr(0, 16);
            auto it = out.find(t.id);
            if (it == out.end() || it->second.version < t.version) out[t.id] = std::move(t);
        }
        return out;
    }();
    return table;
}

} // namespace

const PromptTemplate& prompt_template(std::string_view id) {
    const auto& reg = registry();
    auto it = reg.find(id);
    if (it == reg.end()) throw Error("unknown prompt template '" + std::string(id) + "'");
    return it->second;
}

std::vector<const PromptTemplate*> all_prompt_templates() {
    std::vector<const PromptTemplate*> out;
    for (const auto& [id, t] : registry()) out.push_back(&t);
    return out;
}

std::string render(const PromptTemplate& t, const std::map<std::string, std::string>& vars) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = t.text.find("{{", pos);
        if (open == std::string::npos) break;
        std::size_t close = t.text.find("}}", open + 2);
        if (close == std::string::npos) break;
        std::string name = t.text.substr(open + 2, close - open - 2);
        auto it = vars.find(name);
        if (it == vars.end()) throw Error("prompt " + t.id + " needs a value for {{" + name + "}}");
        out.append(t.text, pos, open - pos);
        out += it->second;
        pos = close + 2;
    }
    out.append(t.text, pos);
    return out;
}

std::optional<std::string> prompt_section(std::string_view text, std::string_view name) {
    const std::string open = "=== " + std::string(name) + " ===\n";
    const std::string close = "\n=== END " + std::string(name) + " ===";
    std::size_t start = text.find(open);
    if (start == std::string_view::npos) return std::nullopt;
    start += open.size();
    std::size_t end = text.find(close, start);
    if (end == std::string_view::npos) return std::nullopt;
    return std::string(text.substr(start, end - start));
}

std::optional<std::string> prompt_header(std::string_view text, std::string_view key) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        if (line.starts_with("=== ")) break;
        if (line.size() > key.size() + 1 && line.substr(0, key.size()) == key && line[key.size()] == ':') {
            return std::string(text::trim(line.substr(key.size() + 1)));
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return std::nullopt;
}

std::string section(std::string_view name, std::string_view body) {
    return "=== " + std::string(name) + " ===\n" + std::string(body) + "\n=== END " + std::string(name) + " ===";
}

} // namespace shopx::llm
