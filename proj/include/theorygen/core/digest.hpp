#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace theorygen {

/// SHA-256 of the input, lowercase hex.
std::string sha256_hex(std::string_view data);

/// FNV-1a 64-bit. Cheap non-cryptographic hash for request keys and RNG stream
/// derivation; never used where collision resistance matters.
constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr std::uint64_t fnv1a64_mix(std::uint64_t value, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (i * 8)) & 0xff;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace theorygen
