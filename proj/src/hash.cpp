#include "spinal/hash.hpp"

#include <array>

namespace spinal {
namespace {

constexpr std::array<HashId, 2> kRegistered{HashId::splitmix64, HashId::murmur3};

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t murmur3_fmix64(std::uint64_t k) noexcept {
    // fmix64 maps 0 to 0; offset so the all-zero spine does not stay fixed.
    k += 0x9e3779b97f4a7c15ULL;
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

}  // namespace

std::string_view hash_name(HashId id) noexcept {
    switch (id) {
        case HashId::splitmix64: return "splitmix64";
        case HashId::murmur3: return "murmur3";
    }
    return "unknown";
}

std::optional<HashId> parse_hash(std::string_view name) noexcept {
    for (HashId id : kRegistered)
        if (hash_name(id) == name) return id;
    return std::nullopt;
}

std::span<const HashId> registered_hashes() noexcept { return kRegistered; }

std::string registered_hash_list() {
    std::string out;
    for (HashId id : kRegistered) {
        if (!out.empty()) out += ", ";
        out += hash_name(id);
    }
    return out;
}

std::uint64_t mix64(HashId id, std::uint64_t x) noexcept {
    switch (id) {
        case HashId::splitmix64: return splitmix64(x);
        case HashId::murmur3: return murmur3_fmix64(x);
    }
    return splitmix64(x);
}

}  // namespace spinal
