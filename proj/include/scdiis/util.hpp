/*
 * Copyright 2026 The scdiis Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>

namespace scdiis {

using Rng = std::mt19937_64;

/// Seed for the named sub-stream `stream` (and item `index`) of a global
/// seed.  Streams are independent of how many other streams are drawn.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t base, std::string_view stream, std::uint64_t index = 0) {
    return Rng(derive_seed(base, stream, index));
}

/// Runs fn(0) .. fn(n-1) on up to `jobs` threads.  Each index is
/// processed exactly once; the exception of the lowest failing index is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::string trim(std::string_view s);

} // namespace scdiis
