/*
 * Copyright (C) 2026 The clonedetect Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * Fixed-width 256-bit unsigned integer.
 *
 * Four 64-bit limbs, least significant first. Everything is constexpr so the
 * curve constants and Montgomery parameters are computed at compile time.
 */

#ifndef CLONEDETECT_UINT256_HPP
#define CLONEDETECT_UINT256_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clonedetect {

using u128 = unsigned __int128;

struct U256 {
    std::array<std::uint64_t, 4> limb{};

    constexpr U256() = default;
    constexpr explicit U256(std::uint64_t v) : limb{v, 0, 0, 0} {}
    constexpr U256(std::uint64_t l3, std::uint64_t l2, std::uint64_t l1, std::uint64_t l0)
        : limb{l0, l1, l2, l3} {}

    static constexpr U256 zero() { return U256{}; }
    static constexpr U256 one() { return U256{1}; }

    /// Parses a big-endian hex string, optional "0x" prefix.
    static constexpr U256 from_hex(std::string_view hex) {
        if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X'))
            hex.remove_prefix(2);
        if (hex.empty() || hex.size() > 64)
            throw std::invalid_argument("U256::from_hex: bad length");
        U256 r;
        int bit = 0;
        for (auto it = hex.rbegin(); it != hex.rend(); ++it, bit += 4) {
            const char c = *it;
            std::uint64_t nib = 0;
            if (c >= '0' && c <= '9')
                nib = static_cast<std::uint64_t>(c - '0');
            else if (c >= 'a' && c <= 'f')
                nib = static_cast<std::uint64_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F')
                nib = static_cast<std::uint64_t>(c - 'A' + 10);
            else
                throw std::invalid_argument("U256::from_hex: bad digit");
            r.limb[static_cast<std::size_t>(bit / 64)] |= nib << (bit % 64);
        }
        return r;
    }

    static constexpr U256 from_bytes_be(std::span<const std::uint8_t, 32> in) {
        U256 r;
        for (std::size_t i = 0; i < 32; ++i)
            r.limb[3 - i / 8] |= static_cast<std::uint64_t>(in[i]) << (56 - 8 * (i % 8));
        return r;
    }

    constexpr std::array<std::uint8_t, 32> to_bytes_be() const {
        std::array<std::uint8_t, 32> out{};
        for (std::size_t i = 0; i < 32; ++i)
            out[i] = static_cast<std::uint8_t>(limb[3 - i / 8] >> (56 - 8 * (i % 8)));
        return out;
    }

    std::string to_hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s(64, '0');
        for (std::size_t i = 0; i < 64; ++i)
            s[63 - i] = digits[(limb[i / 16] >> (4 * (i % 16))) & 0xf];
        return s;
    }

    constexpr bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }
    constexpr bool is_odd() const { return (limb[0] & 1) != 0; }

    constexpr bool bit(std::size_t i) const { return ((limb[i / 64] >> (i % 64)) & 1) != 0; }

    constexpr void set_bit(std::size_t i) { limb[i / 64] |= std::uint64_t{1} << (i % 64); }

    /// 4-bit window i (bits 4i .. 4i+3).
    constexpr unsigned nibble(std::size_t i) const {
        return static_cast<unsigned>((limb[i / 16] >> (4 * (i % 16))) & 0xf);
    }

    constexpr std::size_t bit_length() const {
        for (std::size_t i = 4; i-- > 0;) {
            if (limb[i] != 0) {
                std::size_t n = 64;
                while (((limb[i] >> (n - 1)) & 1) == 0) --n;
                return i * 64 + n;
            }
        }
        return 0;
    }

    friend constexpr bool operator==(const U256&, const U256&) = default;

    friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
        for (std::size_t i = 4; i-- > 0;) {
            if (a.limb[i] != b.limb[i])
                return a.limb[i] < b.limb[i] ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }
};

/// r = a + b, returns carry out.
constexpr std::uint64_t add_carry(U256& r, const U256& a, const U256& b) {
    u128 c = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        c += static_cast<u128>(a.limb[i]) + b.limb[i];
        r.limb[i] = static_cast<std::uint64_t>(c);
        c >>= 64;
    }
    return static_cast<std::uint64_t>(c);
}

/// r = a - b, returns borrow out.
constexpr std::uint64_t sub_borrow(U256& r, const U256& a, const U256& b) {
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const std::uint64_t ai = a.limb[i];
        const std::uint64_t d = ai - b.limb[i];
        const std::uint64_t b1 = ai < b.limb[i] ? 1 : 0;
        r.limb[i] = d - borrow;
        const std::uint64_t b2 = d < borrow ? 1 : 0;
        borrow = b1 | b2;
    }
    return borrow;
}

constexpr U256 shl1(const U256& a, std::uint64_t& carry_out) {
    U256 r;
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        r.limb[i] = (a.limb[i] << 1) | carry;
        carry = a.limb[i] >> 63;
    }
    carry_out = carry;
    return r;
}

constexpr U256 shr1(const U256& a) {
    U256 r;
    for (std::size_t i = 0; i < 4; ++i) {
        r.limb[i] = a.limb[i] >> 1;
        if (i < 3) r.limb[i] |= a.limb[i + 1] << 63;
    }
    return r;
}

/// Full 512-bit product, eight limbs little-endian.
using U512 = std::array<std::uint64_t, 8>;

constexpr U512 mul_wide(const U256& a, const U256& b) {
    U512 r{};
    for (std::size_t i = 0; i < 4; ++i) {
        u128 carry = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            carry += static_cast<u128>(a.limb[i]) * b.limb[j] + r[i + j];
            r[i + j] = static_cast<std::uint64_t>(carry);
            carry >>= 64;
        }
        r[i + 4] = static_cast<std::uint64_t>(carry);
    }
    return r;
}

/// (a mod m) for a 512-bit a and nonzero m, by binary long division.
/// Slow but modulus-agnostic (works for even m).
constexpr U256 mod_wide(const U512& a, const U256& m) {
    if (m.is_zero()) throw std::domain_error("mod_wide: zero modulus");
    U256 rem;
    for (std::size_t i = 512; i-- > 0;) {
        std::uint64_t top = 0;
        rem = shl1(rem, top);
        if ((a[i / 64] >> (i % 64)) & 1) rem.limb[0] |= 1;
        if (top != 0 || rem >= m) sub_borrow(rem, rem, m);
    }
    return rem;
}

constexpr U256 mod(const U256& a, const U256& m) {
    U512 w{};
    for (std::size_t i = 0; i < 4; ++i) w[i] = a.limb[i];
    return mod_wide(w, m);
}

constexpr U256 mulmod_generic(const U256& a, const U256& b, const U256& m) {
    return mod_wide(mul_wide(a, b), m);
}

constexpr U256 powmod_generic(const U256& base, const U256& exp, const U256& m) {
    U256 result = mod(U256::one(), m);
    U256 b = mod(base, m);
    const std::size_t bits = exp.bit_length();
    for (std::size_t i = bits; i-- > 0;) {
        result = mulmod_generic(result, result, m);
        if (exp.bit(i)) result = mulmod_generic(result, b, m);
    }
    return result;
}

}  // namespace clonedetect

#endif  // CLONEDETECT_UINT256_HPP
