#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shopx::text {

bool is_space(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

/// Collapses every run of ASCII whitespace (and U+00A0) into one space and trims.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

/// Lowercases ASCII and the Latin-1 uppercase letters (Ä, Ö, Ü, ...).
std::string casefold(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

bool starts_with_icase(std::string_view s, std::string_view prefix);

std::u32string utf8_decode(std::string_view s);

/// Parses "3.5", "3,5", "-0,25" or "12". Rejects anything else, including
/// thousands separators and exponents.
std::optional<double> parse_decimal(std::string_view s);

/// Shortest round-trip representation with a decimal point.
std::string format_decimal(double v);

std::string json_escape(std::string_view s);

} // namespace shopx::text
