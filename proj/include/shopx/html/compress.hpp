#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "shopx/common/error.hpp"

namespace shopx::html {

struct RawDocument {
    std::string page_id;
    std::string url;
    std::string html;
};

enum class Variant { HtmlCompressed, Text };

std::string_view to_string(Variant v) noexcept;
/// Accepts "html", "html_compressed", "text" (any case).
Variant parse_variant(std::string_view s);

struct CompressedDocument {
    std::string page_id;
    Variant variant = Variant::HtmlCompressed;
    std::string content;
    std::int64_t token_count = 0;
};

class UnparsableDocument : public Error {
public:
    using Error::Error;
};

class WrongVariant : public Error {
public:
    using Error::Error;
};

/// Elements dropped together with their subtrees.
inline constexpr std::array<std::string_view, 13> kBannedElements = {
    "head", "footer", "header", "script", "iframe", "path", "style",
    "symbol", "noscript", "svg", "g", "use", "option"};

bool is_banned_element(std::string_view tag) noexcept;

/// Token estimate: ceil(byte_length / 4).
std::int64_t count_tokens(std::string_view content) noexcept;

/// Drops banned elements, comments and CDATA, strips every attribute except
/// class and id, and removes whitespace-only text between tags.
CompressedDocument compress_html(const RawDocument& doc);

/// Plain-text projection of an HTML_COMPRESSED document: a newline between
/// block-level elements, a single space between inline pieces.
CompressedDocument extract_text(const CompressedDocument& doc);

} // namespace shopx::html
