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

// Reference implementations used as test oracles.  They share nothing with
// the library beyond the Eigen storage type.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Cyclic Jacobi rotations; returns ascending eigenvalues and the matching
/// orthonormal eigenvectors as columns.
inline std::pair<Vec, Mat> jacobi_eigen(Mat a) {
    const int n = static_cast<int>(a.rows());
    Mat v = Mat::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
    Vec w(n);
    Mat vs(n, n);
    for (int k = 0; k < n; ++k) {
        w(k) = a(idx[k], idx[k]);
        vs.col(k) = v.col(idx[k]);
    }
    return {w, vs};
}

inline Mat inv_sqrt(const Mat& s) {
    auto [w, u] = jacobi_eigen(s);
    Vec d(w.size());
    for (int i = 0; i < w.size(); ++i) d(i) = 1.0 / std::sqrt(w(i));
    return u * d.asDiagonal() * u.transpose();
}

/// Generalized eigenvalues of (H, S) by Jacobi on S^-1/2 H S^-1/2.
inline Vec gen_eigenvalues(const Mat& h, const Mat& s) {
    const Mat x = inv_sqrt(s);
    return jacobi_eigen(x * h * x).first;
}

/// Closed-shell density from the n_e/2 lowest generalized eigenvectors.
inline Mat ground_density(const Mat& h, const Mat& s, int n_e) {
    const Mat x = inv_sqrt(s);
    auto [w, u] = jacobi_eigen(x * h * x);
    const Mat c = x * u;
    Mat d = Mat::Zero(h.rows(), h.cols());
    for (int k = 0; k < n_e / 2; ++k) d += 2.0 * c.col(k) * c.col(k).transpose();
    return d;
}

inline Mat random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a(i, j) = a(j, i) = nd(rng);
    return a;
}

/// Symmetric positive definite with eigenvalues in [0.2, 2].
inline Mat random_spd(int n, std::mt19937_64& rng) {
    const Mat q = random_symmetric(n, rng).householderQr().householderQ();
    std::uniform_real_distribution<double> u(0.2, 2.0);
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = u(rng);
    return q * d.asDiagonal() * q.transpose();
}

// Tight-binding functional written straight from its closed form, for
// positions r (n x 3), uniform on-site parameters.
struct Tb {
    double t0 = 2.5, beta = 2.0, alpha = 0.7, r0 = 1.4, rep_a = 500.0, rep_rho = 0.25;
    double eps0 = 0.0, u = 8.0, q_ref = 1.0;
};

inline double dist(const Mat& r, int i, int j) { return (r.row(i) - r.row(j)).norm(); }

inline Mat tb_overlap(const Mat& r, const Tb& p) {
    const int n = static_cast<int>(r.rows());
    Mat s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s(i, j) = std::exp(-p.alpha * std::pow(dist(r, i, j), 2));
    return s;
}

inline Mat tb_h0(const Mat& r, const Tb& p) {
    const int n = static_cast<int>(r.rows());
    Mat h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h(i, j) = i == j ? p.eps0 : -p.t0 * std::exp(-p.beta * (dist(r, i, j) - p.r0));
    return h;
}

inline double tb_energy(const Mat& d, const Mat& r, const Tb& p) {
    const Mat s = tb_overlap(r, p), h0 = tb_h0(r, p);
    const int n = static_cast<int>(r.rows());
    double e = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e += d(i, j) * h0(j, i);
    for (int i = 0; i < n; ++i) {
        double q = 0.0;
        for (int k = 0; k < n; ++k) q += d(i, k) * s(k, i);
        e += 0.5 * p.u * (q - p.q_ref) * (q - p.q_ref);
        for (int j = i + 1; j < n; ++j) e += p.rep_a * std::exp(-dist(r, i, j) / p.rep_rho);
    }
    return e;
}

inline Mat tb_hamiltonian(const Mat& d, const Mat& r, const Tb& p) {
    const Mat s = tb_overlap(r, p);
    const int n = static_cast<int>(r.rows());
    Vec dq(n);
    for (int i = 0; i < n; ++i) dq(i) = d.row(i).dot(s.col(i)) - p.q_ref;
    Mat h = tb_h0(r, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) += 0.5 * s(i, j) * p.u * (dq(i) + dq(j));
    return h;
}

/// Plain linear mixing from the core-Hamiltonian guess.
inline double tb_brute_force_energy(const Mat& r, const Tb& p, int n_e, double mix = 0.05,
                                    int iters = 10000) {
    const Mat s = tb_overlap(r, p);
    Mat d = ground_density(tb_h0(r, p), s, n_e);
    for (int it = 0; it < iters; ++it)
        d = (1.0 - mix) * d + mix * ground_density(tb_hamiltonian(d, r, p), s, n_e);
    return tb_energy(d, r, p);
}

} // namespace oracle
