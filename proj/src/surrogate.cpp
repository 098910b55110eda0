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

#include "scdiis/surrogate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scdiis/config.hpp"
#include "scdiis/util.hpp"
#include "scdiis/xyz.hpp"

namespace scdiis {

void Dataset::validate() const {
    if (entries.empty()) fail(ErrorCode::EmptyDataset, "dataset has no entries");
    const Geometry& ref = entries.front().geometry;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const DatasetEntry& e = entries[i];
        if (e.geometry.species != ref.species || e.geometry.n_electrons != ref.n_electrons)
            fail(ErrorCode::SpeciesMismatch,
                 fmt::format("dataset entry {} differs in species or electron count", i));
        if (!e.solution.converged)
            fail(ErrorCode::InvalidArgument, fmt::format("dataset entry {} is not converged", i));
    }
}

std::string_view gen_mode_name(GenMode m) {
    return m == GenMode::RandomPerturb ? "random_perturb" : "md_sample";
}

GenMode parse_gen_mode(std::string_view text) {
    if (text == "random_perturb") return GenMode::RandomPerturb;
    if (text == "md_sample") return GenMode::MdSample;
    fail(ErrorCode::ParseError, fmt::format("unknown dataset mode '{}'", text));
}

namespace {

Dataset generate_perturbed(const Geometry& seed_geometry, const ModelParams& p,
                           const ScfConfig& scf, const GenConfig& cfg,
                           std::vector<std::string>* log) {
    const int n = cfg.n;
    const int budget = 10 * n;
    std::vector<DatasetEntry> entries(n);
    std::vector<int> attempts(n, 0);
    std::vector<std::vector<std::string>> skipped(n);

    parallel_for(static_cast<std::size_t>(n), cfg.jobs, [&](std::size_t slot) {
        const std::uint64_t slot_seed = derive_seed(cfg.seed, "dataset", slot);
        for (int a = 0; a < budget; ++a) {
            attempts[slot] = a + 1;
            Rng rng = make_rng(slot_seed, "attempt", static_cast<std::uint64_t>(a));
            std::uniform_real_distribution<double> u(-cfg.amplitude, cfg.amplitude);
            Geometry g = seed_geometry;
            for (Vec3& r : g.positions)
                for (int c = 0; c < 3; ++c) r(c) += cfg.amplitude > 0 ? u(rng) : 0.0;
            try {
                entries[slot] = {g, scf_solve(g, p, scf)};
                return;
            } catch (const Error& e) {
                skipped[slot].push_back(fmt::format("slot {} attempt {}: {}", slot, a, e.what()));
            }
        }
    });

    const int total = std::accumulate(attempts.begin(), attempts.end(), 0);
    if (log)
        for (const auto& s : skipped) log->insert(log->end(), s.begin(), s.end());
    for (int i = 0; i < n; ++i)
        if (!entries[i].solution.converged || total > budget)
            fail(ErrorCode::GenerationExhausted,
                 fmt::format("{} SCF attempts for {} entries exceed the budget of {}", total, n, budget));
    Dataset ds;
    ds.entries = std::move(entries);
    return ds;
}

Dataset generate_md_sampled(const Geometry& seed_geometry, const ModelParams& p,
                            const ScfConfig& scf, const GenConfig& cfg,
                            std::vector<std::string>* log) {
    Dataset ds;
    const int max_restarts = 10;
    for (int restart = 0; restart < max_restarts && ds.size() < cfg.n; ++restart) {
        MdConfig md = cfg.md;
        md.mode = MdMode::Exact;
        md.t_target = cfg.temperature;
        md.scf = scf;
        md.jobs = cfg.jobs;
        md.seed = derive_seed(cfg.seed, "md_sample", static_cast<std::uint64_t>(restart));
        const int still_needed = cfg.n - ds.size();
        md.n_steps = cfg.equilibration + (still_needed - 1) * cfg.stride;
        const Trajectory traj = run_md(seed_geometry, p, nullptr, md);
        if (traj.status != ErrorCode::Ok && log)
            log->push_back(fmt::format("trajectory {} stopped early: {}", restart, traj.message));
        for (const MdFrame& fr : traj.frames) {
            if (fr.step < cfg.equilibration || (fr.step - cfg.equilibration) % cfg.stride != 0)
                continue;
            if (ds.size() >= cfg.n) break;
            Geometry g = seed_geometry;
            g.positions = fr.positions;
            try {
                ds.entries.push_back({g, scf_solve(g, p, scf)});
            } catch (const Error& e) {
                if (log) log->push_back(fmt::format("frame {} skipped: {}", fr.step, e.what()));
            }
        }
    }
    if (ds.size() < cfg.n)
        fail(ErrorCode::GenerationExhausted,
             fmt::format("md_sample produced {} of {} frames", ds.size(), cfg.n));
    return ds;
}

} // namespace

Dataset generate_dataset(const Geometry& seed_geometry, const ModelParams& p, const ScfConfig& scf,
                         const GenConfig& cfg, std::vector<std::string>* log) {
    if (cfg.n < 1) fail(ErrorCode::InvalidArgument, "dataset size must be >= 1");
    if (!(cfg.amplitude >= 0)) fail(ErrorCode::InvalidArgument, "amplitude must be >= 0");
    if (cfg.stride < 1 || cfg.equilibration < 0)
        fail(ErrorCode::InvalidArgument, "md_sample needs stride >= 1 and equilibration >= 0");
    seed_geometry.validate();
    // the seed itself has to be solvable
    scf_solve(seed_geometry, p, scf);

    Dataset ds = cfg.mode == GenMode::RandomPerturb
                     ? generate_perturbed(seed_geometry, p, scf, cfg, log)
                     : generate_md_sampled(seed_geometry, p, scf, cfg, log);
    ds.metadata["mode"] = std::string(gen_mode_name(cfg.mode));
    ds.metadata["n"] = std::to_string(cfg.n);
    ds.metadata["seed"] = std::to_string(cfg.seed);
    if (cfg.mode == GenMode::RandomPerturb) {
        ds.metadata["amplitude"] = format_double(cfg.amplitude);
    } else {
        ds.metadata["temperature"] = format_double(cfg.temperature);
        ds.metadata["equilibration"] = std::to_string(cfg.equilibration);
        ds.metadata["stride"] = std::to_string(cfg.stride);
        ds.metadata["dt"] = format_double(cfg.md.dt);
        ds.metadata["tau"] = format_double(cfg.md.tau);
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    std::string manifest = "# scdiis dataset\n";
    for (const auto& [k, v] : ds.metadata) manifest += fmt::format("{} = {}\n", k, v);
    manifest += fmt::format("entries = {}\n", ds.size());
    for (int i = 0; i < ds.size(); ++i) {
        const std::string name = fmt::format("{:05d}", i);
        manifest += fmt::format("entry = {}\n", name);
        const fs::path sub = dir / name;
        fs::create_directories(sub, ec);
        if (ec) fail(ErrorCode::IoError, fmt::format("cannot create {}", sub.string()));
        const DatasetEntry& e = ds.entries[i];
        write_xyz(sub / "geometry.xyz", e.geometry);
        write_scvm(sub / "H.scvm", e.solution.hamiltonian);
        write_scvm(sub / "D.scvm", e.solution.density);
        write_scvm(sub / "S.scvm", e.solution.overlap);
        write_text_file(sub / "meta.txt",
                        fmt::format("e_total = {}\ngap = {}\nstrict_diis = {}\niterations = {}\n"
                                    "converged = {}\n",
                                    format_double(e.solution.e_total), format_double(e.solution.gap),
                                    format_double(e.solution.strict_diis), e.solution.iterations,
                                    e.solution.converged ? "true" : "false"));
    }
    write_text_file(dir / "manifest.txt", manifest);
}

namespace {

KeyValues parse_kv_lines(std::string_view text, std::vector<std::string>* entries) {
    KeyValues out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorCode::ParseError, fmt::format("bad line '{}'", line));
        const std::string k = trim(std::string_view(line).substr(0, eq));
        const std::string v = trim(std::string_view(line).substr(eq + 1));
        if (k == "entry" && entries)
            entries->push_back(v);
        else
            out[k] = v;
    }
    return out;
}

double to_double(const KeyValues& kv, const std::string& key, const std::string& where) {
    auto it = kv.find(key);
    if (it == kv.end()) fail(ErrorCode::ParseError, fmt::format("{}: missing '{}'", where, key));
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end != it->second.c_str() + it->second.size())
        fail(ErrorCode::ParseError, fmt::format("{}: bad number for '{}'", where, key));
    return v;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& dir) {
    std::vector<std::string> names;
    KeyValues manifest = parse_kv_lines(read_text_file(dir / "manifest.txt"), &names);
    Dataset ds;
    for (const auto& name : names) {
        const auto sub = dir / name;
        DatasetEntry e;
        e.geometry = read_xyz(sub / "geometry.xyz");
        e.solution.hamiltonian = read_scvm(sub / "H.scvm");
        e.solution.density = read_scvm(sub / "D.scvm");
        e.solution.overlap = read_scvm(sub / "S.scvm");
        const std::string where = (sub / "meta.txt").string();
        const KeyValues meta = parse_kv_lines(read_text_file(sub / "meta.txt"), nullptr);
        e.solution.e_total = to_double(meta, "e_total", where);
        e.solution.gap = to_double(meta, "gap", where);
        e.solution.strict_diis = to_double(meta, "strict_diis", where);
        e.solution.iterations = static_cast<int>(to_double(meta, "iterations", where));
        e.solution.converged = meta.count("converged") && meta.at("converged") == "true";
        require_same_dim({&e.solution.hamiltonian, &e.solution.density, &e.solution.overlap},
                         where);
        e.solution.orbitals = gen_eigensolve(e.solution.hamiltonian, e.solution.overlap);
        ds.entries.push_back(std::move(e));
    }
    manifest.erase("entries");
    ds.metadata = std::move(manifest);
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------

NoiseMode parse_noise_mode(std::string_view text) {
    if (text == "independent") return NoiseMode::Independent;
    if (text == "shared") return NoiseMode::Shared;
    fail(ErrorCode::ParseError, fmt::format("unknown noise mode '{}' (independent|shared)", text));
}

Prediction oracle_noise_predict(const ScfSolution& label, double sigma_h, double sigma_d,
                                std::uint64_t seed, NoiseMode mode) {
    if (!(sigma_h >= 0) || !(sigma_d >= 0))
        fail(ErrorCode::InvalidArgument, "noise amplitudes must be >= 0");
    const Eigen::Index n = label.hamiltonian.rows();
    Prediction out{label.hamiltonian, label.density, PredictionSource::OracleNoise};
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double zh = normal(rng);
            const double zd = mode == NoiseMode::Shared ? zh : normal(rng);
            out.h_pred(i, j) += sigma_h * zh;
            out.d_pred(i, j) += sigma_d * zd;
            if (i != j) {
                out.h_pred(j, i) = out.h_pred(i, j);
                out.d_pred(j, i) = out.d_pred(i, j);
            }
        }
    return out;
}

Prediction OracleNoisePredictor::predict(const Geometry& g) const {
    Prediction exact = exact_.predict(g);
    ScfSolution label;
    label.hamiltonian = std::move(exact.h_pred);
    label.density = std::move(exact.d_pred);
    return oracle_noise_predict(label, sigma_h_, sigma_d_, seed_, mode_);
}

// ---------------------------------------------------------------------------

Vector distance_descriptor(const Geometry& g) {
    const int n = g.n_atoms();
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d.push_back(g.distance(i, j));
    std::sort(d.begin(), d.end());
    return Eigen::Map<Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
}

namespace {

std::vector<std::pair<double, int>> ranked_neighbours(const KernelModel& m, const Vector& q,
                                                      int exclude) {
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(m.descriptors.size());
    for (int j = 0; j < m.size(); ++j)
        if (j != exclude) ranked.emplace_back((m.descriptors[j] - q).norm(), j);
    std::sort(ranked.begin(), ranked.end());
    return ranked;
}

} // namespace

KernelModel kernel_fit(const Dataset& ds, std::optional<double> bandwidth, int k_neighbors) {
    if (ds.entries.empty()) fail(ErrorCode::EmptyDataset, "cannot fit a kernel model on an empty dataset");
    ds.validate();
    if (k_neighbors < 1) fail(ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
    if (bandwidth && !(*bandwidth > 0)) fail(ErrorCode::InvalidArgument, "bandwidth must be > 0");

    KernelModel m;
    m.species = ds.entries.front().geometry.species;
    m.n_electrons = ds.entries.front().geometry.n_electrons;
    for (const DatasetEntry& e : ds.entries) {
        m.descriptors.push_back(distance_descriptor(e.geometry));
        m.hamiltonians.push_back(e.solution.hamiltonian);
        m.densities.push_back(e.solution.density);
    }
    m.k_neighbors = std::min(k_neighbors, m.size());

    if (bandwidth) {
        m.bandwidth = *bandwidth;
    } else {
        std::vector<double> nn;
        for (int i = 0; i < m.size(); ++i) {
            const auto ranked = ranked_neighbours(m, m.descriptors[i], i);
            if (!ranked.empty() && ranked.front().first > 0) nn.push_back(ranked.front().first);
        }
        // all-duplicate datasets have no scale; any positive bandwidth gives the same weights
        m.bandwidth = nn.empty() ? 1.0 : percentile(nn, 50.0);
    }
    return m;
}

Prediction kernel_predict(const KernelModel& m, const Geometry& g, int exclude) {
    if (g.species != m.species)
        fail(ErrorCode::SpeciesMismatch, "query species sequence differs from the training set");
    const Vector q = distance_descriptor(g);
    const auto ranked = ranked_neighbours(m, q, exclude);
    if (ranked.empty()) fail(ErrorCode::EmptyDataset, "kernel model has no usable entries");
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(m.k_neighbors), ranked.size());

    // weights relative to the nearest neighbour so that far queries do not underflow
    const double d0 = ranked.front().first;
    const double inv_2b2 = 1.0 / (2.0 * m.bandwidth * m.bandwidth);
    std::vector<double> w(k);
    double wsum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double d = ranked[i].first;
        w[i] = std::exp(-(d * d - d0 * d0) * inv_2b2);
        wsum += w[i];
    }
    const Eigen::Index n = m.hamiltonians.front().rows();
    Prediction out{Matrix::Zero(n, n), Matrix::Zero(n, n), PredictionSource::Kernel};
    for (std::size_t i = 0; i < k; ++i) {
        const double wi = w[i] / wsum;
        out.h_pred += wi * m.hamiltonians[ranked[i].second];
        out.d_pred += wi * m.densities[ranked[i].second];
    }
    out.h_pred = 0.5 * (out.h_pred + out.h_pred.transpose()).eval();
    out.d_pred = 0.5 * (out.d_pred + out.d_pred.transpose()).eval();
    return out;
}

std::vector<double> loo_self_diis(const KernelModel& m, const Dataset& ds, const ModelParams& p,
                                  Norm norm) {
    if (m.size() < 2) fail(ErrorCode::InsufficientData, "leave-one-out needs at least 2 entries");
    std::vector<double> out;
    out.reserve(ds.entries.size());
    for (int i = 0; i < ds.size(); ++i) {
        const Geometry& g = ds.entries[i].geometry;
        out.push_back(self_diis(kernel_predict(m, g, i), build_overlap(g, p), norm));
    }
    return out;
}

double percentile(std::vector<double> values, double pct) {
    if (values.empty()) fail(ErrorCode::InsufficientData, "percentile of an empty sample");
    if (!(pct >= 0 && pct <= 100)) fail(ErrorCode::InvalidArgument, "percentile must be in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

} // namespace scdiis
