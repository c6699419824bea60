#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace permap {

// 128-bit FNV-1a. Used for stable record identifiers; not cryptographic.
struct Hash128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool operator==(const Hash128&) const = default;
};

Hash128 fnv1a_128(std::string_view data);

// Lowercase hex, 32 characters.
std::string to_hex(const Hash128& h);

} // namespace permap
