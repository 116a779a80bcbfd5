#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace shopx {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// splitmix64 step; used to derive independent seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

/// Seed derived from a master seed and an arbitrary label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

} // namespace shopx
