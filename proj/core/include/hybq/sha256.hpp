#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hybq {

// FIPS 180-4 SHA-256 of a byte string, returned as 64 lowercase hex digits.
std::string sha256_hex(std::string_view data);

}  // namespace hybq
