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
 * Umbrella header.
 */

#ifndef CLONEDETECT_CLONEDETECT_HPP
#define CLONEDETECT_CLONEDETECT_HPP

#include "clonedetect/uint256.hpp"
#include "clonedetect/modarith.hpp"
#include "clonedetect/ec.hpp"
#include "clonedetect/hash.hpp"
#include "clonedetect/rng.hpp"
#include "clonedetect/sig.hpp"
#include "clonedetect/types.hpp"
#include "clonedetect/trust.hpp"
#include "clonedetect/context.hpp"
#include "clonedetect/metrics.hpp"
#include "clonedetect/report.hpp"
#include "clonedetect/sim.hpp"
#include "clonedetect/experiment.hpp"

#endif  // CLONEDETECT_CLONEDETECT_HPP
