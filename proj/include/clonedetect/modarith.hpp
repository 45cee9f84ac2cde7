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
 * Montgomery arithmetic modulo an odd 256-bit modulus, and the ModInt wrapper
 * used for P-256 base-field elements and scalars.
 *
 * NOT constant time. Branches and table lookups depend on secret data; this
 * code backs a simulator and must not be used to protect real keys.
 */

#ifndef CLONEDETECT_MODARITH_HPP
#define CLONEDETECT_MODARITH_HPP

#include <span>
#include <vector>

#include "clonedetect/uint256.hpp"

namespace clonedetect {

class Montgomery {
public:
    constexpr explicit Montgomery(const U256& modulus) : m_(modulus) {
        if (!modulus.is_odd() || modulus <= U256::one())
            throw std::invalid_argument("Montgomery: modulus must be odd and > 1");
        // -m^-1 mod 2^64 by Newton iteration
        std::uint64_t inv = 1;
        for (int i = 0; i < 7; ++i) inv *= 2 - m_.limb[0] * inv;
        n0_ = ~inv + 1;
        // R^2 mod m, R = 2^256, by 512 modular doublings of 1
        U256 x = mod(U256::one(), m_);
        for (int i = 0; i < 512; ++i) x = add(x, x);
        r2_ = x;
        one_ = to_mont(U256::one());
    }

    constexpr const U256& modulus() const { return m_; }
    constexpr const U256& mont_one() const { return one_; }

    constexpr U256 add(const U256& a, const U256& b) const {
        U256 r;
        const std::uint64_t carry = add_carry(r, a, b);
        if (carry != 0 || r >= m_) sub_borrow(r, r, m_);
        return r;
    }

    constexpr U256 sub(const U256& a, const U256& b) const {
        U256 r;
        if (sub_borrow(r, a, b) != 0) add_carry(r, r, m_);
        return r;
    }

    constexpr U256 neg(const U256& a) const {
        if (a.is_zero()) return a;
        U256 r;
        sub_borrow(r, m_, a);
        return r;
    }

    /// CIOS Montgomery product a*b*R^-1 mod m.
    constexpr U256 mul(const U256& a, const U256& b) const {
        std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
        for (std::size_t i = 0; i < 4; ++i) {
            u128 c = 0;
            for (std::size_t j = 0; j < 4; ++j) {
                c += static_cast<u128>(a.limb[j]) * b.limb[i] + t[j];
                t[j] = static_cast<std::uint64_t>(c);
                c >>= 64;
            }
            c += t[4];
            t[4] = static_cast<std::uint64_t>(c);
            t[5] = static_cast<std::uint64_t>(c >> 64);

            const std::uint64_t q = t[0] * n0_;
            c = static_cast<u128>(q) * m_.limb[0] + t[0];
            c >>= 64;
            for (std::size_t j = 1; j < 4; ++j) {
                c += static_cast<u128>(q) * m_.limb[j] + t[j];
                t[j - 1] = static_cast<std::uint64_t>(c);
                c >>= 64;
            }
            c += t[4];
            t[3] = static_cast<std::uint64_t>(c);
            t[4] = t[5] + static_cast<std::uint64_t>(c >> 64);
        }
        U256 r{t[3], t[2], t[1], t[0]};
        if (t[4] != 0 || r >= m_) sub_borrow(r, r, m_);
        return r;
    }

    constexpr U256 sqr(const U256& a) const { return mul(a, a); }

    /// Maps any 256-bit value into Montgomery form (reducing it first).
    constexpr U256 to_mont(const U256& a) const {
        const U256 reduced = a < m_ ? a : mod(a, m_);
        return mul(reduced, r2_);
    }

    constexpr U256 from_mont(const U256& a) const { return mul(a, U256::one()); }

    /// a^e for a in Montgomery form; result in Montgomery form.
    constexpr U256 pow(const U256& a, const U256& e) const {
        std::array<U256, 16> table{};
        table[0] = one_;
        for (std::size_t i = 1; i < 16; ++i) table[i] = mul(table[i - 1], a);
        U256 r = one_;
        for (std::size_t w = 64; w-- > 0;) {
            r = sqr(sqr(sqr(sqr(r))));
            const unsigned nib = e.nibble(w);
            if (nib != 0) r = mul(r, table[nib]);
        }
        return r;
    }

private:
    U256 m_;
    std::uint64_t n0_ = 0;
    U256 r2_;
    U256 one_;
};

/// Residue modulo the prime held by Tag::ctx (a Montgomery instance).
/// Stored in Montgomery form; value() always yields the canonical residue.
template <class Tag>
class ModInt {
public:
    constexpr ModInt() = default;

    static constexpr const Montgomery& ctx() { return Tag::ctx; }
    static constexpr const U256& modulus() { return Tag::ctx.modulus(); }

    static constexpr ModInt from(const U256& v) { return ModInt(ctx().to_mont(v), raw_tag{}); }
    static constexpr ModInt from(std::uint64_t v) { return from(U256{v}); }
    static constexpr ModInt zero() { return ModInt{}; }
    static constexpr ModInt one() { return ModInt(ctx().mont_one(), raw_tag{}); }

    constexpr U256 value() const { return ctx().from_mont(m_); }
    constexpr bool is_zero() const { return m_.is_zero(); }

    constexpr ModInt operator+(const ModInt& o) const { return ModInt(ctx().add(m_, o.m_), raw_tag{}); }
    constexpr ModInt operator-(const ModInt& o) const { return ModInt(ctx().sub(m_, o.m_), raw_tag{}); }
    constexpr ModInt operator*(const ModInt& o) const { return ModInt(ctx().mul(m_, o.m_), raw_tag{}); }
    constexpr ModInt operator-() const { return ModInt(ctx().neg(m_), raw_tag{}); }
    constexpr ModInt& operator+=(const ModInt& o) { return *this = *this + o; }
    constexpr ModInt& operator-=(const ModInt& o) { return *this = *this - o; }
    constexpr ModInt& operator*=(const ModInt& o) { return *this = *this * o; }

    constexpr ModInt sqr() const { return ModInt(ctx().sqr(m_), raw_tag{}); }
    constexpr ModInt dbl() const { return *this + *this; }

    constexpr ModInt pow(const U256& e) const { return ModInt(ctx().pow(m_, e), raw_tag{}); }

    /// Fermat inverse; the modulus is prime. inverse(0) is 0.
    constexpr ModInt inverse() const {
        U256 e;
        sub_borrow(e, modulus(), U256{2});
        return pow(e);
    }

    friend constexpr bool operator==(const ModInt&, const ModInt&) = default;

private:
    struct raw_tag {};
    constexpr ModInt(const U256& mont, raw_tag) : m_(mont) {}
    U256 m_;
};

/// Inverts every element in place with a single field inversion.
/// Zero entries are left as zero.
template <class Tag>
void batch_invert(std::span<ModInt<Tag>> values) {
    using F = ModInt<Tag>;
    std::vector<F> prefix(values.size());
    F acc = F::one();
    for (std::size_t i = 0; i < values.size(); ++i) {
        prefix[i] = acc;
        if (!values[i].is_zero()) acc *= values[i];
    }
    F inv = acc.inverse();
    for (std::size_t i = values.size(); i-- > 0;) {
        if (values[i].is_zero()) continue;
        const F next = inv * values[i];
        values[i] = inv * prefix[i];
        inv = next;
    }
}

}  // namespace clonedetect

#endif  // CLONEDETECT_MODARITH_HPP
