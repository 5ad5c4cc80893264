#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace crisis::hash {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// 64-bit keyed hash: first eight bytes (big-endian) of SHA-256(seed_le64 || data).
/// Stable across platforms and runs.
std::uint64_t keyed_hash64(std::uint64_t seed, std::string_view data);

}  // namespace crisis::hash
