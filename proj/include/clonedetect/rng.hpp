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
 * Seeded random source shared by key generation, nonces, batch randomizers
 * and the simulator. Deterministic replay is the point; this is not a CSPRNG.
 */

#ifndef CLONEDETECT_RNG_HPP
#define CLONEDETECT_RNG_HPP

#include <cstdint>
#include <random>

#include "clonedetect/uint256.hpp"

namespace clonedetect {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent child stream; the parent advances by one draw.
    Rng fork(std::uint64_t stream) { return Rng(splitmix(next_u64() ^ splitmix(stream))); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
    }

    /// Uniform real in [lo, hi).
    double uniform_real(double lo, double hi) {
        if (hi <= lo) return lo;
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

    /// Uniform value with the given number of low bits random (bits <= 256).
    U256 random_bits(std::size_t bits) {
        U256 r;
        for (std::size_t i = 0; i < 4; ++i) {
            if (bits >= 64 * (i + 1))
                r.limb[i] = next_u64();
            else if (bits > 64 * i)
                r.limb[i] = next_u64() & ((std::uint64_t{1} << (bits - 64 * i)) - 1);
        }
        return r;
    }

    /// Uniform in [1, bound - 1] by rejection sampling.
    U256 uniform_nonzero_below(const U256& bound) {
        const std::size_t bits = bound.bit_length();
        for (;;) {
            const U256 c = random_bits(bits);
            if (!c.is_zero() && c < bound) return c;
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace clonedetect

#endif  // CLONEDETECT_RNG_HPP
