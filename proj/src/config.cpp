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

#include "scdiis/config.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "scdiis/error.hpp"
#include "scdiis/util.hpp"
#include "scdiis/xyz.hpp"

namespace scdiis {

namespace {

struct DefaultEntry {
    const char* key;
    const char* value;
};

// clang-format off
constexpr std::array kDefaults = {
    DefaultEntry{"seed", "0"},
    DefaultEntry{"norm", "frobenius"},
    DefaultEntry{"jobs", "1"},

    DefaultEntry{"model.t0", "2.5"},
    DefaultEntry{"model.beta", "2.0"},
    DefaultEntry{"model.alpha", "0.7"},
    DefaultEntry{"model.r0", "1.4"},
    DefaultEntry{"model.rep_a", "500"},
    DefaultEntry{"model.rep_rho", "0.25"},
    DefaultEntry{"model.eps0", "0"},
    DefaultEntry{"model.hubbard_u", "8.0"},
    DefaultEntry{"model.q_ref", "1.0"},
    DefaultEntry{"model.mass", "12.011"},

    DefaultEntry{"scf.max_iter", "200"},
    DefaultEntry{"scf.tol", "1e-9"},
    DefaultEntry{"scf.damping", "0.3"},
    DefaultEntry{"scf.diis", "true"},
    DefaultEntry{"scf.diis_depth", "8"},
    DefaultEntry{"scf.diis_start", "2"},
    DefaultEntry{"scf.lin_dep_tol", "1e-10"},

    DefaultEntry{"gen.n", "100"},
    DefaultEntry{"gen.mode", "random_perturb"},
    DefaultEntry{"gen.amplitude", "0.05"},
    DefaultEntry{"gen.temperature", "300"},
    DefaultEntry{"gen.equilibration", "400"},
    DefaultEntry{"gen.stride", "10"},

    DefaultEntry{"surrogate.bandwidth", "auto"},
    DefaultEntry{"surrogate.k_neighbors", "8"},
    DefaultEntry{"surrogate.noise_mode", "independent"},
    DefaultEntry{"surrogate.threshold_percentile", "95"},

    DefaultEntry{"validate.sigma", "1e-3"},
    DefaultEntry{"validate.sigma_min", "1e-4"},
    DefaultEntry{"validate.sigma_max", "1e-2"},
    DefaultEntry{"validate.n_sigma", "1"},
    DefaultEntry{"validate.samples_per_sigma", "0"},

    DefaultEntry{"stats.n_bins", "20"},
    DefaultEntry{"stats.scheme", "equal_count"},
    DefaultEntry{"stats.min_count", "5"},
    DefaultEntry{"stats.fit_raw_points", "false"},

    DefaultEntry{"grad.step", "1e-4"},

    DefaultEntry{"md.dt", "0.5"},
    DefaultEntry{"md.n_steps", "1000"},
    DefaultEntry{"md.t_target", "300"},
    DefaultEntry{"md.tau", "100"},
    DefaultEntry{"md.mode", "exact"},
    DefaultEntry{"md.threshold", "auto"},
    DefaultEntry{"md.fd_step", "1e-4"},
    DefaultEntry{"md.frozen", "orthogonal"},
};
// clang-format on

constexpr std::array kSpeciesFields = {"eps0", "hubbard_u", "q_ref", "mass"};

} // namespace

Config Config::defaults() {
    Config c;
    for (const auto& e : kDefaults) c.values_[e.key] = e.value;
    return c;
}

bool Config::is_known_key(std::string_view key) {
    for (const auto& e : kDefaults)
        if (key == e.key) return true;
    for (const char* field : kSpeciesFields) {
        const std::string prefix = fmt::format("model.{}.", field);
        if (key.size() > prefix.size() && key.substr(0, prefix.size()) == prefix) return true;
    }
    return false;
}

Config Config::load(const std::filesystem::path& path) {
    Config c = defaults();
    c.merge_text(read_text_file(path), path.string());
    return c;
}

void Config::merge_text(std::string_view text, std::string_view origin) {
    std::string section;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(ErrorCode::ParseError, fmt::format("{}:{}: malformed section header", origin, lineno));
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ParseError, fmt::format("{}:{}: expected 'key = value'", origin, lineno));
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (!section.empty()) key = section + "." + key;
        if (!is_known_key(key))
            fail(ErrorCode::ParseError, fmt::format("{}:{}: unknown key '{}'", origin, lineno, key));
        values_[key] = value;
    }
}

void Config::set(const std::string& key, const std::string& value) {
    if (!is_known_key(key)) fail(ErrorCode::InvalidArgument, fmt::format("unknown config key '{}'", key));
    values_[key] = value;
}

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::InvalidArgument, fmt::format("config key '{}' is not set", key));
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "inf" || v == "+inf") return INFINITY;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        fail(ErrorCode::ParseError, fmt::format("config key '{}': '{}' is not a number", key, v));
    return d;
}

int Config::get_int(const std::string& key) const {
    const std::string& v = get(key);
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        fail(ErrorCode::ParseError, fmt::format("config key '{}': '{}' is not an integer", key, v));
    return out;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string& v = get(key);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        fail(ErrorCode::ParseError, fmt::format("config key '{}': '{}' is not an unsigned integer", key, v));
    return out;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::ParseError, fmt::format("config key '{}': '{}' is not a boolean", key, v));
}

std::string Config::to_text() const {
    std::string out;
    for (const auto& [k, v] : values_) out += fmt::format("{} = {}\n", k, v);
    return out;
}

} // namespace scdiis
