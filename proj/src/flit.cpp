#include "flit.hpp"

#include <cassert>
#include <cctype>

namespace accnoc {

std::uint64_t Flit::bits(int lo, int width) const {
    assert(width >= 1 && width <= 64);
    assert(lo >= 0 && lo + width <= kBits);
    const int limb = lo / 64;
    const int off = lo % 64;
    std::uint64_t v = limbs_[limb] >> off;
    if (off + width > 64)
        v |= limbs_[limb + 1] << (64 - off);
    if (width < 64)
        v &= (std::uint64_t{1} << width) - 1;
    return v;
}

void Flit::set_bits(int lo, int width, std::uint64_t value) {
    assert(width >= 1 && width <= 64);
    assert(lo >= 0 && lo + width <= kBits);
    const std::uint64_t mask =
        width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
    assert((value & ~mask) == 0);
    const int limb = lo / 64;
    const int off = lo % 64;
    limbs_[limb] = (limbs_[limb] & ~(mask << off)) | ((value & mask) << off);
    if (off + width > 64) {
        const int spill = off + width - 64;
        const std::uint64_t hi_mask = (std::uint64_t{1} << spill) - 1;
        limbs_[limb + 1] =
            (limbs_[limb + 1] & ~hi_mask) | ((value >> (64 - off)) & hi_mask);
    }
}

std::optional<Flit> Flit::from_limbs(std::uint64_t w0, std::uint64_t w1,
                                     std::uint64_t w2) {
    // Only bits 128..136 of the top limb may be used.
    if (w2 >> (kBits - 128) != 0)
        return std::nullopt;
    Flit f;
    f.limbs_ = {w0, w1, w2};
    return f;
}

std::string Flit::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(35, '0');
    for (int d = 0; d < 35; ++d) {
        const int lo = d * 4; // nibble d covers bits [4d, 4d+3]
        const int width = lo + 4 <= kBits ? 4 : kBits - lo;
        const std::uint64_t v = bits(lo, width);
        out[34 - d] = digits[v];
    }
    return out;
}

std::optional<Flit> Flit::from_hex(std::string_view hex) {
    if (hex.size() != 35)
        return std::nullopt;
    Flit f;
    for (int d = 0; d < 35; ++d) {
        const char c = hex[34 - d];
        int v;
        if (c >= '0' && c <= '9')
            v = c - '0';
        else if (c >= 'a' && c <= 'f')
            v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            v = c - 'A' + 10;
        else
            return std::nullopt;
        const int lo = d * 4;
        if (lo + 4 <= kBits) {
            f.set_bits(lo, 4, static_cast<std::uint64_t>(v));
        } else {
            const int width = kBits - lo; // top nibble is only 1 bit wide
            if (v >> width != 0)
                return std::nullopt;
            if (width > 0)
                f.set_bits(lo, width, static_cast<std::uint64_t>(v));
        }
    }
    return f;
}

} // namespace accnoc
