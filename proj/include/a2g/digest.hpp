#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace a2g {

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

// First eight SHA-256 bytes, big-endian.
std::uint64_t digest64(std::string_view bytes);

}  // namespace a2g
