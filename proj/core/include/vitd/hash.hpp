#pragma once

#include <cstdint>
#include <string_view>

namespace vitd {

/// XXH64 (xxHash, 64-bit variant) over the raw bytes of `data`.
///
/// Output is independent of host endianness and word size, so feature
/// indices and config fingerprints are stable across machines.
std::uint64_t xxh64(std::string_view data, std::uint64_t seed = 0) noexcept;

/// Identity string recorded in run manifests and model artifacts.
inline constexpr std::string_view kFeatureHashName = "xxh64";

} // namespace vitd
