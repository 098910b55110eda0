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

#include "scdiis/settings.hpp"

#include <fmt/format.h>

namespace scdiis {

Norm config_norm(const Config& c) { return parse_norm(c.get("norm")); }

ModelParams model_params(const Config& c) {
    ModelParams p;
    p.t0 = c.get_double("model.t0");
    p.beta = c.get_double("model.beta");
    p.alpha = c.get_double("model.alpha");
    p.r0 = c.get_double("model.r0");
    p.rep_a = c.get_double("model.rep_a");
    p.rep_rho = c.get_double("model.rep_rho");
    p.generic.eps0 = c.get_double("model.eps0");
    p.generic.hubbard_u = c.get_double("model.hubbard_u");
    p.generic.q_ref = c.get_double("model.q_ref");
    p.generic.mass = c.get_double("model.mass");
    for (const auto& [key, value] : c.values()) {
        for (const char* field : {"eps0", "hubbard_u", "q_ref", "mass"}) {
            const std::string prefix = fmt::format("model.{}.", field);
            if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0) continue;
            const std::string tag = key.substr(prefix.size());
            auto [it, fresh] = p.per_species.try_emplace(tag, p.generic);
            const double v = c.get_double(key);
            const std::string_view f = field;
            if (f == "eps0") it->second.eps0 = v;
            else if (f == "hubbard_u") it->second.hubbard_u = v;
            else if (f == "q_ref") it->second.q_ref = v;
            else it->second.mass = v;
        }
    }
    p.validate();
    return p;
}

ScfConfig scf_config(const Config& c) {
    ScfConfig s;
    s.max_iter = c.get_int("scf.max_iter");
    s.tol = c.get_double("scf.tol");
    s.damping = c.get_double("scf.damping");
    s.use_diis = c.get_bool("scf.diis");
    s.diis_depth = c.get_int("scf.diis_depth");
    s.diis_start = c.get_int("scf.diis_start");
    s.lin_dep_tol = c.get_double("scf.lin_dep_tol");
    s.norm = config_norm(c);
    s.validate();
    return s;
}

FrozenDensity parse_frozen_density(std::string_view text) {
    if (text == "orthogonal") return FrozenDensity::Orthogonal;
    if (text == "atomic") return FrozenDensity::Atomic;
    fail(ErrorCode::ParseError, fmt::format("unknown frozen density mode '{}' (orthogonal|atomic)", text));
}

bool md_threshold_auto(const Config& c) { return c.get("md.threshold") == "auto"; }

MdConfig md_config(const Config& c) {
    MdConfig m;
    m.dt = c.get_double("md.dt");
    m.n_steps = c.get_int("md.n_steps");
    m.t_target = c.get_double("md.t_target");
    m.tau = c.get_double("md.tau");
    m.threshold = md_threshold_auto(c) ? 0.0 : c.get_double("md.threshold");
    m.mode = parse_md_mode(c.get("md.mode"));
    m.seed = c.get_u64("seed");
    m.fd_step = c.get_double("md.fd_step");
    m.frozen = parse_frozen_density(c.get("md.frozen"));
    m.norm = config_norm(c);
    m.scf = scf_config(c);
    m.jobs = c.get_int("jobs");
    return m;
}

GenConfig gen_config(const Config& c) {
    GenConfig g;
    g.n = c.get_int("gen.n");
    g.mode = parse_gen_mode(c.get("gen.mode"));
    g.amplitude = c.get_double("gen.amplitude");
    g.temperature = c.get_double("gen.temperature");
    g.equilibration = c.get_int("gen.equilibration");
    g.stride = c.get_int("gen.stride");
    g.seed = c.get_u64("seed");
    g.jobs = c.get_int("jobs");
    g.md = md_config(c);
    return g;
}

BinConfig bin_config(const Config& c) {
    BinConfig b;
    b.n_bins = c.get_int("stats.n_bins");
    b.scheme = parse_bin_scheme(c.get("stats.scheme"));
    b.min_count = c.get_int("stats.min_count");
    b.fit_raw_points = c.get_bool("stats.fit_raw_points");
    b.validate();
    return b;
}

std::optional<double> kernel_bandwidth(const Config& c) {
    if (c.get("surrogate.bandwidth") == "auto") return std::nullopt;
    return c.get_double("surrogate.bandwidth");
}

} // namespace scdiis
