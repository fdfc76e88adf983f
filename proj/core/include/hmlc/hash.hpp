#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace hmlc {

/// FNV-1a over a byte string.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

/// FNV-1a of a file's contents. Throws ValidationError if unreadable.
std::uint64_t file_digest(const std::filesystem::path& path);

} // namespace hmlc
