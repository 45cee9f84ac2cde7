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

#ifndef CLONEDETECT_HASH_HPP
#define CLONEDETECT_HASH_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include <openssl/evp.h>

namespace clonedetect {

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256 via OpenSSL's EVP interface.
inline Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
        throw std::runtime_error("sha256: EVP_Digest failed");
    return out;
}

}  // namespace clonedetect

#endif  // CLONEDETECT_HASH_HPP
