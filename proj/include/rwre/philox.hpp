#pragma once

#include <array>
#include <cstdint>

namespace rwre {

// Philox4x32-10 (Salmon et al., SC'11). Stateless: every output block is a
// pure function of (key, counter), which is what lets the environment be
// realized lazily in any order.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit constexpr Philox4x32(std::uint64_t key)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    constexpr Philox4x32(std::uint32_t k0, std::uint32_t k1) : key_{k0, k1} {}

    constexpr Block operator()(Block ctr) const {
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += kWeylA;
                k[1] += kWeylB;
            }
            const std::uint64_t p0 = std::uint64_t{kMulA} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMulB} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMulA = 0xD2511F53;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85;

    std::array<std::uint32_t, 2> key_;
};

/// Stream tags placed in the third counter word so that independent uses of one
/// seed never share a counter.
enum class Stream : std::uint32_t {
    environment = 0x454E5631, // "ENV1"
    walk = 0x57414C4B,        // "WALK"
    census = 0x43454E53,      // "CENS"
    replica = 0x5245504C,     // "REPL"
    test = 0x54455354,        // "TEST"
};

/// Keyed uniform source: u(seed, stream, index) in [0,1) with 53-bit resolution.
class KeyedUniform {
public:
    constexpr KeyedUniform(std::uint64_t seed, Stream stream, std::uint32_t substream = 0)
        : gen_(seed), stream_(static_cast<std::uint32_t>(stream)), substream_(substream) {}

    constexpr Philox4x32::Block block(std::uint64_t index) const {
        return gen_({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream_, substream_});
    }

    constexpr double operator()(std::uint64_t index) const {
        const auto b = block(index);
        return to_unit(b[0], b[1]);
    }

    constexpr std::uint64_t bits(std::uint64_t index) const {
        const auto b = block(index);
        return (std::uint64_t{b[0]} << 32) | b[1];
    }

    static constexpr double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t x = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return static_cast<double>(x) * 0x1.0p-53;
    }

private:
    Philox4x32 gen_;
    std::uint32_t stream_;
    std::uint32_t substream_;
};

/// Derive an independent 64-bit seed from a parent seed (used for replicas).
constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index) {
    return KeyedUniform(parent, stream).bits(index);
}

} // namespace rwre
