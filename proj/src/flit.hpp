#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace accnoc {

// One NoC flow-control unit: a 137-bit word stored in three little-endian
// 64-bit limbs. Bits 137..191 are always zero.
class Flit {
public:
    static constexpr int kBits = 137;

    constexpr Flit() : limbs_{0, 0, 0} {}

    // lo..lo+width-1 must lie inside 0..136, width <= 64.
    std::uint64_t bits(int lo, int width) const;
    void set_bits(int lo, int width, std::uint64_t value);

    bool bit(int pos) const { return bits(pos, 1) != 0; }
    void set_bit(int pos, bool value) { set_bits(pos, 1, value ? 1 : 0); }

    const std::array<std::uint64_t, 3>& limbs() const { return limbs_; }
    static std::optional<Flit> from_limbs(std::uint64_t w0, std::uint64_t w1,
                                          std::uint64_t w2);

    // 35 hex digits (140 bits, top 3 always zero), most significant first.
    std::string to_hex() const;
    static std::optional<Flit> from_hex(std::string_view hex);

    bool operator==(const Flit& o) const { return limbs_ == o.limbs_; }
    bool operator!=(const Flit& o) const { return !(*this == o); }

private:
    std::array<std::uint64_t, 3> limbs_;
};

} // namespace accnoc
