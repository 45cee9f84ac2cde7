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
 * ECDSA and ECDSA* over P-256 with SHA-256.
 *
 * ECDSA* differs from plain ECDSA only in what travels on the wire: the
 * signer ships the full nonce point R = kG instead of r = x(R) mod n. The
 * verifier can then test u1*G + u2*Q == R directly, and many signatures can
 * be folded into one randomized multi-scalar equation:
 *
 *     sum l_i R_i == (sum l_i u1_i) G + sum (l_i u2_i) Q_i
 *
 * with independent random l_i. A batch containing an invalid signature
 * passes with probability at most 2^-bits.
 */

#ifndef CLONEDETECT_SIG_HPP
#define CLONEDETECT_SIG_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "clonedetect/ec.hpp"
#include "clonedetect/hash.hpp"
#include "clonedetect/rng.hpp"

namespace clonedetect::sig {

using ec::CurvePoint;
using ec::Scalar;

struct KeyPair {
    U256 d;
    CurvePoint Q;
};

struct EcdsaSignature {
    U256 r;
    U256 s;
};

struct EcdsaStarSignature {
    CurvePoint R;
    U256 s;

    /// Classic (r, s) view, r = x(R) mod n.
    EcdsaSignature to_classic() const { return {Scalar::from(R.x.value()).value(), s}; }
};

inline constexpr std::size_t kPrivateKeyBytes = 32;
inline constexpr std::size_t kPublicKeyBytes = 33;
inline constexpr std::size_t kSignatureBytes = 65;
inline constexpr std::size_t kDefaultRandomizerBits = 64;

using SignatureBytes = std::array<std::uint8_t, kSignatureBytes>;

/// e = SHA-256(message) read big-endian, reduced mod n.
inline Scalar hash_to_scalar(std::span<const std::uint8_t> message) {
    const Digest d = sha256(message);
    return Scalar::from(U256::from_bytes_be(d));
}

inline bool in_scalar_range(const U256& v) { return !v.is_zero() && v < ec::kP256Order; }

inline KeyPair keygen(Rng& rng) {
    const U256 d = rng.uniform_nonzero_below(ec::kP256Order);
    return {d, ec::scalar_mul(d, ec::generator())};
}

inline KeyPair keypair_from_private(const U256& d) {
    if (!in_scalar_range(d)) throw std::invalid_argument("private key out of range");
    return {d, ec::scalar_mul(d, ec::generator())};
}

inline EcdsaStarSignature sign(std::span<const std::uint8_t> message, const U256& d, Rng& rng) {
    if (!in_scalar_range(d)) throw std::invalid_argument("private key out of range");
    const Scalar e = hash_to_scalar(message);
    const Scalar priv = Scalar::from(d);
    for (;;) {
        const U256 k = rng.uniform_nonzero_below(ec::kP256Order);
        const CurvePoint R = ec::detail::to_affine(ec::detail::GeneratorTable::instance().mul(k));
        const Scalar r = Scalar::from(R.x.value());
        if (r.is_zero()) continue;
        const Scalar s = Scalar::from(k).inverse() * (e + priv * r);
        if (s.is_zero()) continue;
        return {R, s.value()};
    }
}

namespace detail {

// u1*G + u2*Q in Jacobian form
inline ec::detail::Jacobian combine(const Scalar& u1, const Scalar& u2, const CurvePoint& Q) {
    const auto& gt = ec::detail::GeneratorTable::instance();
    const ec::detail::Jacobian a = gt.mul(u1.value());
    const ec::detail::Jacobian b = ec::detail::scalar_mul_window(u2.value(), ec::detail::Jacobian::from_affine(Q));
    return ec::detail::add(a, b);
}

}  // namespace detail

/// Textbook ECDSA verification on (r, s).
inline bool verify_classic(std::span<const std::uint8_t> message, const EcdsaSignature& sig, const CurvePoint& Q) {
    if (!in_scalar_range(sig.r) || !in_scalar_range(sig.s)) return false;
    if (Q.infinity || !Q.on_curve()) return false;
    const Scalar e = hash_to_scalar(message);
    const Scalar w = Scalar::from(sig.s).inverse();
    const Scalar r = Scalar::from(sig.r);
    const auto X = detail::combine(e * w, r * w, Q);
    if (X.is_infinity()) return false;
    const CurvePoint x_aff = ec::detail::to_affine(X);
    return Scalar::from(x_aff.x.value()) == r;
}

/// ECDSA* verification: full-point comparison against R.
inline bool verify_star(std::span<const std::uint8_t> message, const EcdsaStarSignature& sig, const CurvePoint& Q) {
    if (sig.R.infinity || !sig.R.on_curve()) return false;
    if (!in_scalar_range(sig.s)) return false;
    if (Q.infinity || !Q.on_curve()) return false;
    const Scalar r = Scalar::from(sig.R.x.value());
    if (r.is_zero()) return false;
    const Scalar e = hash_to_scalar(message);
    const Scalar w = Scalar::from(sig.s).inverse();
    return ec::detail::equals_affine(detail::combine(e * w, r * w, Q), sig.R);
}

struct BatchItem {
    std::span<const std::uint8_t> message;
    EcdsaStarSignature sig;
    CurvePoint Q;
};

/// Randomized batch verification. Empty input throws; bits must be in [64, 255].
///
/// Public keys are screened with the on-curve / non-identity test. With
/// cofactor 1 this is equivalent to ec::validate_public_key and skips the
/// n*Q multiplication per item.
inline bool batch_verify(std::span<const BatchItem> items, Rng& rng,
                         std::size_t randomizer_bits = kDefaultRandomizerBits) {
    if (items.empty()) throw std::invalid_argument("batch_verify: empty batch");
    if (randomizer_bits < 64 || randomizer_bits > 255)
        throw std::invalid_argument("batch_verify: randomizer_bits must be in [64, 255]");

    for (const auto& it : items) {
        if (it.sig.R.infinity || !it.sig.R.on_curve()) return false;
        if (it.Q.infinity || !it.Q.on_curve()) return false;
        if (!in_scalar_range(it.sig.s)) return false;
    }

    std::vector<Scalar> w(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) w[i] = Scalar::from(items[i].sig.s);
    batch_invert<ec::ScalarTag>(w);

    std::vector<ec::detail::JacobianTerm> terms;
    terms.reserve(2 * items.size());
    Scalar g_coeff = Scalar::zero();
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        const Scalar r = Scalar::from(it.sig.R.x.value());
        if (r.is_zero()) return false;
        // l in [1, 2^bits]
        U256 lambda = rng.random_bits(randomizer_bits);
        add_carry(lambda, lambda, U256::one());
        const Scalar l = Scalar::from(lambda);
        const Scalar e = hash_to_scalar(it.message);
        g_coeff += l * e * w[i];
        terms.push_back({(l * r * w[i]).value(), ec::detail::Jacobian::from_affine(it.Q)});
        terms.push_back({lambda, ec::detail::neg(ec::detail::Jacobian::from_affine(it.sig.R))});
    }
    const auto& gt = ec::detail::GeneratorTable::instance();
    const auto sum = ec::detail::add(gt.mul(g_coeff.value()), ec::detail::straus(terms));
    return sum.is_infinity();
}

// ---------------------------------------------------------------------------
// Wire encoding: compressed R (33) | s (32, big-endian)
// ---------------------------------------------------------------------------

inline SignatureBytes encode(const EcdsaStarSignature& sig) {
    SignatureBytes out{};
    const auto r = ec::compress(sig.R);
    const auto s = sig.s.to_bytes_be();
    std::copy(r.begin(), r.end(), out.begin());
    std::copy(s.begin(), s.end(), out.begin() + 33);
    return out;
}

inline EcdsaStarSignature decode(std::span<const std::uint8_t, kSignatureBytes> in) {
    EcdsaStarSignature sig;
    sig.R = ec::decompress(in.subspan<0, 33>());
    sig.s = U256::from_bytes_be(in.subspan<33, 32>());
    return sig;
}

inline std::array<std::uint8_t, kPrivateKeyBytes> encode_private_key(const U256& d) { return d.to_bytes_be(); }

inline ec::CompressedPoint encode_public_key(const CurvePoint& Q) { return ec::compress(Q); }

}  // namespace clonedetect::sig

#endif  // CLONEDETECT_SIG_HPP
