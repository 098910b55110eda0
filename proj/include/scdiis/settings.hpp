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

// Typed views of a Config.

#include <optional>

#include "scdiis/config.hpp"
#include "scdiis/stats.hpp"
#include "scdiis/surrogate.hpp"

namespace scdiis {

Norm config_norm(const Config& c);
ModelParams model_params(const Config& c);
ScfConfig scf_config(const Config& c);
/// `md.threshold = auto` yields threshold 0; callers resolve it from the
/// training set (see md_threshold_auto).
MdConfig md_config(const Config& c);
bool md_threshold_auto(const Config& c);
FrozenDensity parse_frozen_density(std::string_view text);
GenConfig gen_config(const Config& c);
BinConfig bin_config(const Config& c);
/// nullopt for `auto`
std::optional<double> kernel_bandwidth(const Config& c);

} // namespace scdiis
