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

#include "scdiis/xyz.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "scdiis/util.hpp"

namespace scdiis {

KeyValues parse_comment_line(std::string_view line) {
    KeyValues out;
    std::size_t i = 0;
    const std::size_t n = line.size();
    auto skip_ws = [&] {
        while (i < n && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    };
    while (true) {
        skip_ws();
        if (i >= n) break;
        const std::size_t start = i;
        while (i < n && line[i] != '=' && line[i] != ' ' && line[i] != '\t') ++i;
        if (i >= n || line[i] != '=') continue; // bare word
        const std::string key(line.substr(start, i - start));
        ++i;
        std::string value;
        if (i < n && line[i] == '"') {
            const std::size_t close = line.find('"', i + 1);
            if (close == std::string_view::npos)
                fail(ErrorCode::ParseError, fmt::format("unterminated quote for key '{}'", key));
            value = std::string(line.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            const std::size_t vstart = i;
            while (i < n && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
            value = std::string(line.substr(vstart, i - vstart));
        }
        out[key] = value;
    }
    return out;
}

namespace {

double parse_number(std::string_view tok, std::size_t lineno) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        fail(ErrorCode::ParseError, fmt::format("xyz line {}: bad number '{}'", lineno, tok));
    return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

} // namespace

std::vector<XyzFrame> parse_xyz_frames(std::string_view text) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos <= text.size();) {
        const std::size_t nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        lines.push_back(text.substr(pos, end - pos));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }

    std::vector<XyzFrame> frames;
    std::size_t li = 0;
    while (li < lines.size()) {
        if (trim(lines[li]).empty()) {
            ++li;
            continue;
        }
        const std::string count_tok = trim(lines[li]);
        int natoms = 0;
        const auto res = std::from_chars(count_tok.data(), count_tok.data() + count_tok.size(), natoms);
        if (res.ec != std::errc() || natoms <= 0)
            fail(ErrorCode::ParseError,
                 fmt::format("xyz line {}: expected a positive atom count, got '{}'", li + 1,
                             count_tok));
        if (li + 1 + static_cast<std::size_t>(natoms) >= lines.size())
            fail(ErrorCode::ParseError, fmt::format("xyz: frame at line {} is truncated", li + 1));

        XyzFrame frame;
        frame.info = parse_comment_line(lines[li + 1]);
        auto ne = frame.info.find("n_electrons");
        if (ne == frame.info.end())
            fail(ErrorCode::ParseError,
                 fmt::format("xyz line {}: comment line lacks n_electrons=", li + 2));
        frame.geometry.n_electrons = static_cast<int>(parse_number(ne->second, li + 2));
        for (int a = 0; a < natoms; ++a) {
            const std::size_t lineno = li + 2 + a;
            const auto tok = split_ws(lines[lineno]);
            if (tok.size() < 4)
                fail(ErrorCode::ParseError,
                     fmt::format("xyz line {}: expected 'species x y z'", lineno + 1));
            frame.geometry.species.emplace_back(tok[0]);
            frame.geometry.positions.emplace_back(parse_number(tok[1], lineno + 1),
                                                  parse_number(tok[2], lineno + 1),
                                                  parse_number(tok[3], lineno + 1));
        }
        frames.push_back(std::move(frame));
        li += 2 + natoms;
    }
    if (frames.empty()) fail(ErrorCode::ParseError, "xyz: no frames found");
    return frames;
}

Geometry parse_xyz(std::string_view text) { return parse_xyz_frames(text).front().geometry; }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::IoError, fmt::format("cannot open {} for writing", path.string()));
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) fail(ErrorCode::IoError, fmt::format("write to {} failed", path.string()));
}

Geometry read_xyz(const std::filesystem::path& path) {
    try {
        return parse_xyz(read_text_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError) throw;
        fail(e.code(), fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string format_xyz(const Geometry& g, const KeyValues& info) {
    std::string out = fmt::format("{}\nn_electrons={}", g.n_atoms(), g.n_electrons);
    for (const auto& [k, v] : info) {
        if (k == "n_electrons") continue;
        if (v.find(' ') != std::string::npos)
            out += fmt::format(" {}=\"{}\"", k, v);
        else
            out += fmt::format(" {}={}", k, v);
    }
    out += '\n';
    for (int a = 0; a < g.n_atoms(); ++a)
        out += fmt::format("{} {} {} {}\n", g.species[a], format_double(g.positions[a].x()),
                           format_double(g.positions[a].y()), format_double(g.positions[a].z()));
    return out;
}

void write_xyz(const std::filesystem::path& path, const Geometry& g) {
    write_text_file(path, format_xyz(g));
}

} // namespace scdiis
