#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace spinal {

/// Registered 64-bit mixing functions. The id is recorded in every output so a
/// run can be reproduced with the same hash.
enum class HashId : std::uint8_t {
    splitmix64,  // SplitMix64 output function (Steele, Lea, Flood 2014)
    murmur3,     // MurmurHash3 fmix64 finalizer
};

inline constexpr HashId kDefaultHash = HashId::splitmix64;

std::string_view hash_name(HashId id) noexcept;
std::optional<HashId> parse_hash(std::string_view name) noexcept;
std::span<const HashId> registered_hashes() noexcept;
/// "splitmix64, murmur3"
std::string registered_hash_list();

std::uint64_t mix64(HashId id, std::uint64_t x) noexcept;

/// Two-word keyed hash: mix(mix(a + tag) ^ b). `tag` separates the spine
/// hash from the symbol generator so the two never share outputs.
inline std::uint64_t keyed_hash(HashId id, std::uint64_t a, std::uint64_t b,
                                std::uint64_t tag) noexcept {
    return mix64(id, mix64(id, a + tag) ^ b);
}

/// Folds a 64-bit word to its low `bits` bits (xor of the high part into the
/// low part). bits in [1, 64].
inline std::uint64_t fold_to_bits(std::uint64_t x, unsigned bits) noexcept {
    if (bits >= 64) return x;
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    return (x ^ (x >> bits)) & mask;
}

}  // namespace spinal
