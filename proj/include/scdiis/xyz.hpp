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

// Extended-XYZ text: atom count, a comment line of key=value pairs that must
// include n_electrons, then one "species x y z" line per atom (Angstrom).

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scdiis/model.hpp"

namespace scdiis {

using KeyValues = std::map<std::string, std::string>;

/// Parses `key=value` and `key="quoted value"` tokens; bare words are skipped.
KeyValues parse_comment_line(std::string_view line);

struct XyzFrame {
    Geometry geometry;
    KeyValues info; ///< every key from the comment line
};

std::vector<XyzFrame> parse_xyz_frames(std::string_view text);
Geometry parse_xyz(std::string_view text);
Geometry read_xyz(const std::filesystem::path& path);

/// Single frame; `info` entries are appended after n_electrons.
std::string format_xyz(const Geometry& g, const KeyValues& info = {});
void write_xyz(const std::filesystem::path& path, const Geometry& g);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace scdiis
