#pragma once

#include <cstdint>
#include <string_view>

namespace fedsparql::util {

// 64-bit FNV-1a over raw bytes. Shard assignment depends on this being
// bit-exact across platforms, so the constants are spelled out here and
// repeated in every shard manifest.
inline constexpr std::uint64_t kFnv1a64OffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnv1a64Prime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = kFnv1a64OffsetBasis;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnv1a64Prime;
    }
    return h;
}

} // namespace fedsparql::util
