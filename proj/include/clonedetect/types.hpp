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

#ifndef CLONEDETECT_TYPES_HPP
#define CLONEDETECT_TYPES_HPP

#include <cstdint>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>

namespace clonedetect {

using DeviceId = std::uint16_t;

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

/// Invalid configuration or a violated precondition on counts and weights.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using WarningSink = std::function<void(const std::string&)>;

/// Process-wide warning hook. Defaults to stderr; tests swap it out.
inline WarningSink& warning_sink() {
    static WarningSink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

inline void warn(const std::string& msg) {
    if (warning_sink()) warning_sink()(msg);
}

}  // namespace clonedetect

#endif  // CLONEDETECT_TYPES_HPP
