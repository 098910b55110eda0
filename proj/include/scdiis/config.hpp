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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace scdiis {

/// Flat key=value run configuration.  Files hold `key = value` lines;
/// `[section]` headers prefix the following keys with `section.`; `#`
/// starts a comment.  Every key must be one of the documented defaults or
/// a per-species override `model.{eps0,hubbard_u,q_ref,mass}.<species>`.
class Config {
  public:
    /// Every documented key with its default value.
    static Config defaults();
    static bool is_known_key(std::string_view key);

    /// defaults() overlaid with the file contents.
    static Config load(const std::filesystem::path& path);

    void merge_text(std::string_view text, std::string_view origin = "<config>");
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    /// Sorted `key = value` lines; parses back to an identical Config.
    std::string to_text() const;

  private:
    std::map<std::string, std::string> values_;
};

} // namespace scdiis
