// Copyright 2026 The bio-lmr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Density-matrix exponentiation channels.
//
// The partial-swap step uses one copy of rho per step of length dt:
//
//   T(sigma) = cos^2(dt) sigma + sin^2(dt) rho - i sin(dt) cos(dt) [rho, sigma]
//
// and approximates exp(-i rho t) sigma exp(i rho t) after t/dt steps. The
// cloning-assisted variant spends k biomimetic copies per original copy, each
// for delta_t = dt / k. Its action has a closed form that only sees the
// diagonal of rho in the cloning basis (plus one extra term at k = 2, see
// BioCoefficients). Everything here is an exact density-matrix map; nothing
// samples measurement outcomes.

#include "biolmr/cloning.hpp"
#include "biolmr/matcore.hpp"
#include "biolmr/states.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace biolmr {

/// Total time t split over n original copies, each expanded into k biomimetic
/// copies: dt = t / n, delta_t = dt / k.
class ProtocolParams {
public:
    ProtocolParams(double t, std::size_t n, std::size_t k = 1) : t_(t), n_(n), k_(k) {
        if (!std::isfinite(t)) throw std::invalid_argument("ProtocolParams: t must be finite");
        if (n == 0) throw std::invalid_argument("ProtocolParams: n must be at least 1");
        if (k == 0) throw std::invalid_argument("ProtocolParams: k must be at least 1");
        dt_ = t_ / static_cast<double>(n_);
        delta_t_ = dt_ / static_cast<double>(k_);
    }

    double t() const noexcept { return t_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    double dt() const noexcept { return dt_; }
    double delta_t() const noexcept { return delta_t_; }

private:
    double t_;
    std::size_t n_;
    std::size_t k_;
    double dt_;
    double delta_t_;
};

enum class ChannelPath { kClosed, kBrute };

/// Non-fatal remarks a channel evaluation can raise.
struct ChannelDiagnostics {
    std::vector<std::string> warnings;
};

/// Scalar weights of the closed-form cloning-assisted channel for (delta_t, k).
struct BioCoefficients {
    double keep;   // cos^{2k}(delta_t), weight of sigma
    double drift;  // cos^k(delta_t) sin(k delta_t), weight of -i[rho o 1, sigma]
    double feed;   // 1 - cos^{2k}(delta_t), weight of tr(sigma) rho o 1
    double cross;  // cos^k(delta_t) (cos(k delta_t) - cos^k(delta_t)), weight of {rho o 1, sigma} - 2 rho o 1 o sigma
    // Only k = 2: weight 2 sin^2 cos^2 of (rho - rho o 1) o sigma^T. With two
    // copies the cross terms S_12 (.) S_13 keep rho's off-diagonals; three or
    // more copies always leave a traced copy pairing |psi_i> with <psi_j|.
    double pair;
};

inline BioCoefficients bio_coefficients(double delta_t, std::size_t k) {
    const double c = std::cos(delta_t);
    const double s = std::sin(delta_t);
    const double ck = std::pow(c, static_cast<double>(k));
    const double kd = static_cast<double>(k) * delta_t;
    return {ck * ck, ck * std::sin(kd), 1.0 - ck * ck, ck * (std::cos(kd) - ck),
            k == 2 ? 2.0 * s * s * c * c : 0.0};
}

namespace detail {

inline void require_pair(const DensityMatrix& sigma, const DensityMatrix& rho, const char* what) {
    if (sigma.dim() != rho.dim()) {
        throw DimensionError(std::string(what) + ": sigma and rho have different dimensions");
    }
}

inline DensityMatrix channel_output(ComplexMatrix m) {
    return DensityMatrix::from_matrix(std::move(m), kOutputPsdTol);
}

inline ComplexMatrix lmr_step_raw(const ComplexMatrix& sigma, const ComplexMatrix& rho, double dt) {
    const double c = std::cos(dt);
    const double s = std::sin(dt);
    return (c * c) * sigma + (s * s) * rho - kI * (s * c) * (rho * sigma - sigma * rho);
}

/// One closed-form step with everything expressed in the cloning basis.
/// `rho_b` is the full matrix of rho in that basis.
inline ComplexMatrix bio_closed_in_basis(const ComplexMatrix& sigma_b, const ComplexMatrix& rho_b,
                                         const BioCoefficients& w) {
    const ComplexMatrix rd = rho_b.diagonal().asDiagonal();
    const ComplexMatrix rs = rd * sigma_b;
    const ComplexMatrix sr = sigma_b * rd;
    ComplexMatrix out = w.keep * sigma_b - kI * w.drift * (rs - sr) + (w.feed * sigma_b.trace()) * rd +
                        w.cross * (rs + sr);
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) -= 2.0 * w.cross * rho_b(i, i) * sigma_b(i, i);
    if (w.pair != 0.0) {
        ComplexMatrix offdiag = rho_b - rd;
        out += w.pair * offdiag.cwiseProduct(sigma_b.transpose());
    }
    return out;
}

/// k -> infinity step in rho's eigenbasis (`rho_diag` diagonal):
/// sigma - i sin(dt)[rho, sigma] + 2 sin^2(dt/2) (2 rho o sigma - {rho, sigma}).
inline ComplexMatrix bio_limit_in_basis(const ComplexMatrix& sigma_b, const ComplexMatrix& rho_diag, double dt) {
    const ComplexMatrix rs = rho_diag * sigma_b;
    const ComplexMatrix sr = sigma_b * rho_diag;
    const double half = std::sin(0.5 * dt);
    const double w = 2.0 * half * half;
    ComplexMatrix out = sigma_b - kI * std::sin(dt) * (rs - sr) - w * (rs + sr);
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) += 2.0 * w * rho_diag(i, i) * sigma_b(i, i);
    return out;
}

inline bool offdiagonal_negligible(const ComplexMatrix& m, double tol = 1e-12) {
    const ComplexMatrix off = m - ComplexMatrix(m.diagonal().asDiagonal());
    return off.rows() == 1 || off.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

/// x -> U x U^dagger with U = exp(-i dt S_ij) = cos(dt) I - i sin(dt) S_ij,
/// applied through the basis permutation of S_ij instead of a dense product.
inline ComplexMatrix apply_partial_swap(const ComplexMatrix& x, std::span<const std::size_t> reg_dims,
                                        std::size_t i, std::size_t j, double dt) {
    detail::require_square(x, "apply_partial_swap");
    const auto perm = register_swap_permutation(reg_dims, i, j);
    if (perm.size() != static_cast<std::size_t>(x.rows())) {
        throw DimensionError("apply_partial_swap: register dimensions do not factor the matrix");
    }
    const double c = std::cos(dt);
    const double s = std::sin(dt);
    const Complex isc = kI * (s * c);
    const auto n = x.rows();
    ComplexMatrix out(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto pa = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < n; ++b) {
            const auto pb = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(b)]);
            out(a, b) = (c * c) * x(a, b) + isc * (x(a, pb) - x(pa, b)) + (s * s) * x(pa, pb);
        }
    }
    return out;
}

/// One partial-swap step with a single copy of rho.
inline DensityMatrix lmr_step(const DensityMatrix& sigma, const DensityMatrix& rho, double dt) {
    detail::require_pair(sigma, rho, "lmr_step");
    return detail::channel_output(detail::lmr_step_raw(sigma.mat(), rho.mat(), dt));
}

/// n partial-swap steps of length t/n (k is ignored).
inline DensityMatrix lmr_n(const DensityMatrix& sigma, const DensityMatrix& rho, const ProtocolParams& params) {
    detail::require_pair(sigma, rho, "lmr_n");
    ComplexMatrix state = sigma.mat();
    for (std::size_t step = 0; step < params.n(); ++step) state = detail::lmr_step_raw(state, rho.mat(), params.dt());
    return detail::channel_output(std::move(state));
}

/// Binomial expansion of the n-step map:
/// sum_j C(n,j) (-i sin dt)^j cos^{2n-j}(dt) [rho, sigma]_j + rho (1 - cos^{2n} dt).
inline DensityMatrix lmr_n_closed(const DensityMatrix& sigma, const DensityMatrix& rho,
                                  const ProtocolParams& params) {
    detail::require_pair(sigma, rho, "lmr_n_closed");
    const std::size_t n = params.n();
    const double c = std::cos(params.dt());
    const Complex mis = -kI * std::sin(params.dt());
    ComplexMatrix acc = ComplexMatrix::Zero(sigma.mat().rows(), sigma.mat().cols());
    ComplexMatrix nested = sigma.mat();
    double binom = 1.0;
    Complex mis_pow{1.0, 0.0};
    for (std::size_t j = 0; j <= n; ++j) {
        acc += (binom * std::pow(c, static_cast<double>(2 * n - j))) * mis_pow * nested;
        nested = rho.mat() * nested - nested * rho.mat();
        mis_pow *= mis;
        binom = binom * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    acc += (1.0 - std::pow(c, static_cast<double>(2 * n))) * rho.mat();
    return detail::channel_output(std::move(acc));
}

/// exp(-i rho t) sigma exp(i rho t).
inline DensityMatrix exact_target(const DensityMatrix& sigma, const DensityMatrix& rho, double t) {
    detail::require_pair(sigma, rho, "exact_target");
    const ComplexMatrix u = herm_expm(rho.mat(), t);
    return detail::channel_output(u * sigma.mat() * u.adjoint());
}

/// Closed form of one original copy expanded into k biomimetic copies, each
/// used for delta_t. k = 1 is plain single-copy LMR on the full rho; if rho is
/// not diagonal in `basis` that case is reported through `diagnostics`, since
/// the closed expression would only see rho's diagonal there.
inline DensityMatrix bio_channel_closed(const DensityMatrix& sigma, const DensityMatrix& rho,
                                        const CloningBasis& basis, double delta_t, std::size_t k,
                                        ChannelDiagnostics* diagnostics = nullptr) {
    detail::require_pair(sigma, rho, "bio_channel_closed");
    if (basis.dim() != rho.dim()) throw DimensionError("bio_channel_closed: basis dimension mismatch");
    if (k == 0) throw std::invalid_argument("bio_channel_closed: k must be at least 1");
    if (k == 1) {
        if (diagnostics != nullptr && !detail::offdiagonal_negligible(basis.to_basis(rho.mat()))) {
            diagnostics->warnings.push_back(
                "bio_channel_closed: k = 1 with rho not diagonal in the cloning basis; evaluated as "
                "single-copy LMR on the full rho");
        }
        return lmr_step(sigma, rho, delta_t);
    }
    const ComplexMatrix out = detail::bio_closed_in_basis(basis.to_basis(sigma.mat()), basis.to_basis(rho.mat()),
                                                          bio_coefficients(delta_t, k));
    return detail::channel_output(basis.from_basis(out));
}

/// Tensor-level simulation of the same channel: builds sigma (x) rho^(k),
/// applies exp(-i delta_t S_{1,j}) for j = 2..k+1 (j = 2 acts first) and traces
/// out every copy register.
inline DensityMatrix bio_channel_brute(const DensityMatrix& sigma, const DensityMatrix& rho,
                                       const CloningBasis& basis, double delta_t, std::size_t k,
                                       std::size_t size_cap = kDefaultSizeCap) {
    detail::require_pair(sigma, rho, "bio_channel_brute");
    if (basis.dim() != rho.dim()) throw DimensionError("bio_channel_brute: basis dimension mismatch");
    if (k == 0) throw std::invalid_argument("bio_channel_brute: k must be at least 1");
    const std::size_t d = rho.dim();
    detail::checked_power(d, k + 1, size_cap, "bio_channel_brute");

    std::vector<std::size_t> dims(k + 1, d);
    ComplexMatrix joint = kron(sigma.mat(), biomimetic_copies(rho, basis, k, size_cap));
    for (std::size_t reg = 1; reg <= k; ++reg) joint = apply_partial_swap(joint, dims, 0, reg, delta_t);
    return detail::channel_output(partial_trace(joint, dims, 0));
}

/// k -> infinity limit of the closed form at total step dt, cloning in rho's eigenbasis.
inline DensityMatrix bio_limit_step(const DensityMatrix& sigma, const DensityMatrix& rho, double dt) {
    detail::require_pair(sigma, rho, "bio_limit_step");
    const CloningBasis basis = rho_eigenbasis(rho);
    const ComplexMatrix rho_diag = basis.to_basis(rho.mat()).diagonal().asDiagonal();
    const ComplexMatrix out = detail::bio_limit_in_basis(basis.to_basis(sigma.mat()), rho_diag, dt);
    return detail::channel_output(basis.from_basis(out));
}

/// n original copies, each expanded into k biomimetic copies (delta_t = t/(nk)).
/// k = 1 is exactly lmr_n.
inline DensityMatrix bio_protocol(const DensityMatrix& sigma, const DensityMatrix& rho,
                                  const ProtocolParams& params, const CloningBasis& basis,
                                  ChannelPath path = ChannelPath::kClosed, std::size_t size_cap = kDefaultSizeCap) {
    detail::require_pair(sigma, rho, "bio_protocol");
    if (basis.dim() != rho.dim()) throw DimensionError("bio_protocol: basis dimension mismatch");
    if (params.k() == 1) return lmr_n(sigma, rho, params);

    if (path == ChannelPath::kBrute) {
        DensityMatrix state = sigma;
        for (std::size_t step = 0; step < params.n(); ++step) {
            state = bio_channel_brute(state, rho, basis, params.delta_t(), params.k(), size_cap);
        }
        return state;
    }

    const ComplexMatrix rho_b = basis.to_basis(rho.mat());
    const BioCoefficients w = bio_coefficients(params.delta_t(), params.k());
    ComplexMatrix state = basis.to_basis(sigma.mat());
    for (std::size_t step = 0; step < params.n(); ++step) state = detail::bio_closed_in_basis(state, rho_b, w);
    return detail::channel_output(basis.from_basis(state));
}

/// n limit steps of length t/n (k is ignored).
inline DensityMatrix bio_protocol_limit(const DensityMatrix& sigma, const DensityMatrix& rho,
                                        const ProtocolParams& params) {
    detail::require_pair(sigma, rho, "bio_protocol_limit");
    const CloningBasis basis = rho_eigenbasis(rho);
    const ComplexMatrix rho_diag = basis.to_basis(rho.mat()).diagonal().asDiagonal();
    ComplexMatrix state = basis.to_basis(sigma.mat());
    for (std::size_t step = 0; step < params.n(); ++step) {
        state = detail::bio_limit_in_basis(state, rho_diag, params.dt());
    }
    return detail::channel_output(basis.from_basis(state));
}

/// tr(T_k(sigma) theta) when cloning in theta's eigenbasis.
inline double theta_expectation_under_cloning(const DensityMatrix& sigma, const DensityMatrix& rho,
                                              const ComplexMatrix& theta, double delta_t, std::size_t k) {
    if (static_cast<std::size_t>(theta.rows()) != rho.dim()) {
        throw DimensionError("theta_expectation_under_cloning: observable dimension mismatch");
    }
    const CloningBasis basis = eigenbasis_of(theta, "theta-eigenbasis");
    const DensityMatrix out = bio_channel_closed(sigma, rho, basis, delta_t, k);
    const Complex value = (out.mat() * theta).trace();
    if (std::abs(value.imag()) > 1e-10) {
        throw std::runtime_error("theta_expectation_under_cloning: expectation value is not real");
    }
    return value.real();
}

}  // namespace biolmr
