#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace prk {

// FNV-1a, used for seeding per-kernel RNG streams and artifact hashes.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string file_hash_hex(const std::string& path);

}  // namespace prk
