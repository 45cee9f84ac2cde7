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
 * NIST P-256 group arithmetic.
 *
 * The public contract is affine: every CurvePoint handed out is either the
 * point at infinity or a fully reduced (x, y) on the curve. Internally the
 * ladders run in Jacobian coordinates and normalise once at the end.
 *
 * WARNING: nothing here is constant time. Scalar multiplication branches on
 * scalar bits and indexes tables with them. Fine for a simulator, unsafe for
 * keys that matter.
 */

#ifndef CLONEDETECT_EC_HPP
#define CLONEDETECT_EC_HPP

#include <algorithm>
#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clonedetect/modarith.hpp"

namespace clonedetect::ec {

inline constexpr U256 kP256Prime =
    U256::from_hex("ffffffff00000001000000000000000000000000ffffffffffffffffffffffff");
inline constexpr U256 kP256Order =
    U256::from_hex("ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551");
inline constexpr U256 kP256B =
    U256::from_hex("5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b");
inline constexpr U256 kP256Gx =
    U256::from_hex("6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296");
inline constexpr U256 kP256Gy =
    U256::from_hex("4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5");

struct FieldTag {
    static constexpr Montgomery ctx{kP256Prime};
};
struct ScalarTag {
    static constexpr Montgomery ctx{kP256Order};
};

/// Element of F_p, p the P-256 prime.
using FieldElement = ModInt<FieldTag>;
/// Integer modulo the group order n.
using Scalar = ModInt<ScalarTag>;

class InvalidPointError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct CurvePoint {
    bool infinity = true;
    FieldElement x;
    FieldElement y;

    static CurvePoint at_infinity() { return {}; }
    static CurvePoint affine(const FieldElement& x, const FieldElement& y) { return {false, x, y}; }
    static CurvePoint affine(const U256& x, const U256& y) {
        return {false, FieldElement::from(x), FieldElement::from(y)};
    }

    bool on_curve() const {
        if (infinity) return true;
        // y^2 = x^3 - 3x + b
        const FieldElement rhs = x.sqr() * x - x.dbl() - x + FieldElement::from(kP256B);
        return y.sqr() == rhs;
    }

    CurvePoint negate() const { return infinity ? *this : CurvePoint{false, x, -y}; }

    friend bool operator==(const CurvePoint& a, const CurvePoint& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
};

inline CurvePoint generator() { return CurvePoint::affine(kP256Gx, kP256Gy); }

struct DomainParams {
    U256 p;
    U256 a;
    U256 b;
    CurvePoint G;
    U256 n;
    U256 h;

    static DomainParams p256() {
        U256 a;
        sub_borrow(a, kP256Prime, U256{3});
        return {kP256Prime, a, kP256B, generator(), kP256Order, U256::one()};
    }
};

namespace detail {

/// Jacobian point (X/Z^2, Y/Z^3); Z = 0 encodes infinity.
struct Jacobian {
    FieldElement X;
    FieldElement Y;
    FieldElement Z;

    static Jacobian infinity() { return {FieldElement::one(), FieldElement::one(), FieldElement::zero()}; }
    static Jacobian from_affine(const CurvePoint& p) {
        if (p.infinity) return infinity();
        return {p.x, p.y, FieldElement::one()};
    }
    bool is_infinity() const { return Z.is_zero(); }
};

// dbl-2001-b, a = -3
inline Jacobian dbl(const Jacobian& p) {
    if (p.is_infinity() || p.Y.is_zero()) return Jacobian::infinity();
    const FieldElement delta = p.Z.sqr();
    const FieldElement gamma = p.Y.sqr();
    const FieldElement beta = p.X * gamma;
    const FieldElement t = (p.X - delta) * (p.X + delta);
    const FieldElement alpha = t.dbl() + t;
    const FieldElement beta4 = beta.dbl().dbl();
    const FieldElement x3 = alpha.sqr() - beta4.dbl();
    const FieldElement z3 = (p.Y + p.Z).sqr() - gamma - delta;
    const FieldElement g2 = gamma.sqr();
    const FieldElement y3 = alpha * (beta4 - x3) - g2.dbl().dbl().dbl();
    return {x3, y3, z3};
}

// add-2007-bl without the doubled r
inline Jacobian add(const Jacobian& p, const Jacobian& q) {
    if (p.is_infinity()) return q;
    if (q.is_infinity()) return p;
    const FieldElement z1z1 = p.Z.sqr();
    const FieldElement z2z2 = q.Z.sqr();
    const FieldElement u1 = p.X * z2z2;
    const FieldElement u2 = q.X * z1z1;
    const FieldElement s1 = p.Y * q.Z * z2z2;
    const FieldElement s2 = q.Y * p.Z * z1z1;
    const FieldElement h = u2 - u1;
    const FieldElement r = s2 - s1;
    if (h.is_zero()) return r.is_zero() ? dbl(p) : Jacobian::infinity();
    const FieldElement hh = h.sqr();
    const FieldElement hhh = h * hh;
    const FieldElement v = u1 * hh;
    const FieldElement x3 = r.sqr() - hhh - v.dbl();
    const FieldElement y3 = r * (v - x3) - s1 * hhh;
    const FieldElement z3 = p.Z * q.Z * h;
    return {x3, y3, z3};
}

/// p + q with q affine (Z = 1).
inline Jacobian add_mixed(const Jacobian& p, const CurvePoint& q) {
    if (q.infinity) return p;
    if (p.is_infinity()) return Jacobian::from_affine(q);
    const FieldElement z1z1 = p.Z.sqr();
    const FieldElement u2 = q.x * z1z1;
    const FieldElement s2 = q.y * p.Z * z1z1;
    const FieldElement h = u2 - p.X;
    const FieldElement r = s2 - p.Y;
    if (h.is_zero()) return r.is_zero() ? dbl(p) : Jacobian::infinity();
    const FieldElement hh = h.sqr();
    const FieldElement hhh = h * hh;
    const FieldElement v = p.X * hh;
    const FieldElement x3 = r.sqr() - hhh - v.dbl();
    const FieldElement y3 = r * (v - x3) - p.Y * hhh;
    const FieldElement z3 = p.Z * h;
    return {x3, y3, z3};
}

inline Jacobian neg(const Jacobian& p) { return {p.X, -p.Y, p.Z}; }

inline CurvePoint to_affine(const Jacobian& p) {
    if (p.is_infinity()) return CurvePoint::at_infinity();
    const FieldElement zi = p.Z.inverse();
    const FieldElement zi2 = zi.sqr();
    return CurvePoint::affine(p.X * zi2, p.Y * zi2 * zi);
}

/// Normalises a run of Jacobian points with one inversion.
inline std::vector<CurvePoint> to_affine_batch(std::span<const Jacobian> pts) {
    std::vector<FieldElement> zs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) zs[i] = pts[i].Z;
    batch_invert<FieldTag>(zs);
    std::vector<CurvePoint> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].is_infinity()) continue;
        const FieldElement zi2 = zs[i].sqr();
        out[i] = CurvePoint::affine(pts[i].X * zi2, pts[i].Y * zi2 * zs[i]);
    }
    return out;
}

/// Compares a Jacobian point against an affine one without inverting Z.
inline bool equals_affine(const Jacobian& p, const CurvePoint& q) {
    if (p.is_infinity() || q.infinity) return p.is_infinity() && q.infinity;
    const FieldElement z2 = p.Z.sqr();
    return p.X == q.x * z2 && p.Y == q.y * z2 * p.Z;
}

/// 0P .. 15P.
inline std::array<Jacobian, 16> window_table(const Jacobian& p) {
    std::array<Jacobian, 16> t;
    t[0] = Jacobian::infinity();
    t[1] = p;
    for (std::size_t i = 2; i < 16; ++i) t[i] = (i % 2 == 0) ? dbl(t[i / 2]) : add(t[i - 1], p);
    return t;
}

inline Jacobian scalar_mul_window(const U256& k, const Jacobian& p) {
    if (k.is_zero() || p.is_infinity()) return Jacobian::infinity();
    const auto table = window_table(p);
    Jacobian acc = Jacobian::infinity();
    const std::size_t top = (k.bit_length() + 3) / 4;
    for (std::size_t w = top; w-- > 0;) {
        if (!acc.is_infinity()) acc = dbl(dbl(dbl(dbl(acc))));
        const unsigned nib = k.nibble(w);
        if (nib != 0) acc = add(acc, table[nib]);
    }
    return acc;
}

/// Fixed-base comb for G: entry [w][j] = j * 16^w * G, affine.
class GeneratorTable {
public:
    static const GeneratorTable& instance() {
        static const GeneratorTable table;
        return table;
    }

    Jacobian mul(const U256& k) const {
        Jacobian acc = Jacobian::infinity();
        for (std::size_t w = 0; w < 64; ++w) {
            const unsigned nib = k.nibble(w);
            if (nib != 0) acc = add_mixed(acc, rows_[w][nib]);
        }
        return acc;
    }

private:
    GeneratorTable() {
        std::vector<Jacobian> all;
        all.reserve(64 * 16);
        Jacobian base = Jacobian::from_affine(generator());
        for (std::size_t w = 0; w < 64; ++w) {
            const auto row = window_table(base);
            all.insert(all.end(), row.begin(), row.end());
            base = dbl(dbl(dbl(dbl(base))));
        }
        const auto affine = to_affine_batch(all);
        for (std::size_t w = 0; w < 64; ++w)
            for (std::size_t j = 0; j < 16; ++j) rows_[w][j] = affine[w * 16 + j];
    }

    std::array<std::array<CurvePoint, 16>, 64> rows_;
};

struct JacobianTerm {
    U256 scalar;
    Jacobian point;
};

/// Straus interleaving with 4-bit windows over all terms.
inline Jacobian straus(std::span<const JacobianTerm> terms) {
    std::vector<std::array<Jacobian, 16>> tables;
    tables.reserve(terms.size());
    std::size_t top = 0;
    for (const auto& t : terms) {
        tables.push_back(window_table(t.point));
        top = std::max(top, (t.scalar.bit_length() + 3) / 4);
    }
    Jacobian acc = Jacobian::infinity();
    for (std::size_t w = top; w-- > 0;) {
        if (!acc.is_infinity()) acc = dbl(dbl(dbl(dbl(acc))));
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const unsigned nib = terms[i].scalar.nibble(w);
            if (nib != 0) acc = add(acc, tables[i][nib]);
        }
    }
    return acc;
}

inline void require_on_curve(const CurvePoint& p) {
    if (!p.on_curve()) throw InvalidPointError("point is not on P-256");
}

}  // namespace detail

inline CurvePoint point_add(const CurvePoint& p, const CurvePoint& q) {
    detail::require_on_curve(p);
    detail::require_on_curve(q);
    return detail::to_affine(detail::add(detail::Jacobian::from_affine(p), detail::Jacobian::from_affine(q)));
}

inline CurvePoint point_double(const CurvePoint& p) {
    detail::require_on_curve(p);
    return detail::to_affine(detail::dbl(detail::Jacobian::from_affine(p)));
}

/// k * P for any 256-bit k >= 0.
inline CurvePoint scalar_mul(const U256& k, const CurvePoint& p) {
    detail::require_on_curve(p);
    if (p == generator()) return detail::to_affine(detail::GeneratorTable::instance().mul(k));
    return detail::to_affine(detail::scalar_mul_window(k, detail::Jacobian::from_affine(p)));
}

struct ScalarPoint {
    U256 scalar;
    CurvePoint point;
};

/// Sum of k_i * P_i. Empty input gives infinity.
inline CurvePoint multi_scalar_mul(std::span<const ScalarPoint> pairs) {
    std::vector<detail::JacobianTerm> terms;
    terms.reserve(pairs.size());
    for (const auto& sp : pairs) {
        detail::require_on_curve(sp.point);
        if (sp.point.infinity || sp.scalar.is_zero()) continue;
        terms.push_back({sp.scalar, detail::Jacobian::from_affine(sp.point)});
    }
    return detail::to_affine(detail::straus(terms));
}

/// Nonzero, on the curve, and of order n under the given parameters.
inline bool validate_public_key(const CurvePoint& q, const DomainParams& params) {
    if (q.infinity || !q.on_curve()) return false;
    return detail::scalar_mul_window(params.n, detail::Jacobian::from_affine(q)).is_infinity();
}

// ---------------------------------------------------------------------------
// Curve-parameter sanity checks
// ---------------------------------------------------------------------------

struct SecurityCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline bool miller_rabin(const U256& n, int rounds) {
    if (n < U256{2}) return false;
    static constexpr std::uint64_t kSmallPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                                     37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                                                     83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
    for (std::uint64_t sp : kSmallPrimes) {
        if (n == U256{sp}) return true;
        if (mod(n, U256{sp}).is_zero()) return false;
    }
    const Montgomery mont(n);
    U256 n_minus_1;
    sub_borrow(n_minus_1, n, U256::one());
    U256 d = n_minus_1;
    std::size_t s = 0;
    while (!d.is_odd()) {
        d = shr1(d);
        ++s;
    }
    const U256 one = mont.mont_one();
    const U256 minus_one = mont.to_mont(n_minus_1);
    const int count = std::min<int>(rounds, static_cast<int>(std::size(kSmallPrimes)));
    for (int i = 0; i < count; ++i) {
        U256 x = mont.pow(mont.to_mont(U256{kSmallPrimes[i]}), d);
        if (x == one || x == minus_one) continue;
        bool witness = true;
        for (std::size_t r = 1; r < s; ++r) {
            x = mont.sqr(x);
            if (x == minus_one) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

}  // namespace detail

/// Anomalous-curve, embedding-degree, cofactor and order-primality checks.
inline std::vector<SecurityCheck> validate_curve_security(const DomainParams& params,
                                                          unsigned embedding_bound = 100) {
    if (embedding_bound < 1) throw std::invalid_argument("embedding_bound must be >= 1");
    std::vector<SecurityCheck> out;

    // |E(F_p)| = n * h must differ from p
    {
        const U512 order = mul_wide(params.n, params.h);
        bool equal = true;
        for (std::size_t i = 0; i < 8; ++i) {
            const std::uint64_t pl = i < 4 ? params.p.limb[i] : 0;
            if (order[i] != pl) equal = false;
        }
        out.push_back({"anomalous", !equal, equal ? "group order equals field prime" : "n*h != p"});
    }

    // p^k != 1 (mod n) for 1 <= k <= bound
    {
        SecurityCheck c{"embedding_degree", true, "p^k != 1 mod n for k <= " + std::to_string(embedding_bound)};
        if (params.n <= U256::one()) {
            c.passed = false;
            c.detail = "degenerate order";
        } else {
            const U256 base = mod(params.p, params.n);
            U256 acc = base;
            for (unsigned k = 1; k <= embedding_bound; ++k) {
                if (acc == U256::one()) {
                    c.passed = false;
                    c.detail = "p^" + std::to_string(k) + " = 1 mod n";
                    break;
                }
                acc = mulmod_generic(acc, base, params.n);
            }
        }
        out.push_back(std::move(c));
    }

    out.push_back({"cofactor", params.h == U256::one(), "h = " + params.h.to_hex()});

    const bool prime = detail::miller_rabin(params.n, 32);
    out.push_back({"order_prime", prime, prime ? "n is probably prime" : "n is composite"});
    return out;
}

// ---------------------------------------------------------------------------
// SEC1 compressed encoding
// ---------------------------------------------------------------------------

using CompressedPoint = std::array<std::uint8_t, 33>;

inline CompressedPoint compress(const CurvePoint& p) {
    if (p.infinity) throw InvalidPointError("cannot compress the point at infinity");
    CompressedPoint out{};
    out[0] = p.y.value().is_odd() ? 0x03 : 0x02;
    const auto xb = p.x.value().to_bytes_be();
    std::copy(xb.begin(), xb.end(), out.begin() + 1);
    return out;
}

inline CurvePoint decompress(std::span<const std::uint8_t, 33> in) {
    if (in[0] != 0x02 && in[0] != 0x03) throw InvalidPointError("bad compressed point prefix");
    const U256 xv = U256::from_bytes_be(in.subspan<1, 32>());
    if (xv >= kP256Prime) throw InvalidPointError("x coordinate out of range");
    const FieldElement x = FieldElement::from(xv);
    const FieldElement rhs = x.sqr() * x - x.dbl() - x + FieldElement::from(kP256B);
    // p = 3 mod 4, so sqrt(a) = a^((p+1)/4)
    static constexpr U256 kSqrtExp =
        U256::from_hex("3fffffffc0000000400000000000000000000000400000000000000000000000");
    FieldElement y = rhs.pow(kSqrtExp);
    if (y.sqr() != rhs) throw InvalidPointError("x is not on the curve");
    if (y.value().is_odd() != (in[0] == 0x03)) y = -y;
    return CurvePoint::affine(x, y);
}

}  // namespace clonedetect::ec

#endif  // CLONEDETECT_EC_HPP
