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

#include "biolmr/matcore.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace biolmr {

struct InvalidStateError : std::domain_error {
    using std::domain_error::domain_error;
};

inline constexpr double kTraceTol = 1e-10;
inline constexpr double kInputPsdTol = 1e-10;
inline constexpr double kOutputPsdTol = 1e-9;

/// Seeded random stream. The generator (mt19937_64) and the Gaussian transform
/// (Box-Muller on 53-bit uniforms) are both fully specified, so draws are
/// reproducible across standard libraries.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64+boxmuller/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // 1 - u keeps the log argument in (0, 1].
        const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// (N(0,1) + i N(0,1)) / sqrt(2).
    Complex complex_gaussian() {
        const double re = normal();
        const double im = normal();
        return Complex{re, im} / std::numbers::sqrt2;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of one Monte Carlo sample, independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t q,
                                    std::uint64_t sample_index) {
    return mix64(mix64(mix64(master_seed) ^ q) ^ sample_index);
}

/// Hermitian, unit-trace, positive semidefinite matrix. The spectrum is
/// computed once at construction.
class DensityMatrix {
public:
    /// Validates `m`; `psd_tol` is the allowed negative eigenvalue magnitude.
    static DensityMatrix from_matrix(ComplexMatrix m, double psd_tol = kInputPsdTol) {
        detail::require_square(m, "DensityMatrix");
        const double defect = hermiticity_defect(m);
        if (!(defect <= kHermitianTol)) {
            throw InvalidStateError("DensityMatrix: not Hermitian (defect " + std::to_string(defect) + ")");
        }
        const Complex tr = m.trace();
        if (!(std::abs(tr - Complex{1.0, 0.0}) <= kTraceTol)) {
            throw InvalidStateError("DensityMatrix: trace " + std::to_string(tr.real()) + " is not 1");
        }
        RealVector spectrum = eig_herm(m).values;
        if (!(spectrum(0) >= -psd_tol)) {
            throw InvalidStateError("DensityMatrix: not positive semidefinite (min eigenvalue " +
                                    std::to_string(spectrum(0)) + ")");
        }
        return DensityMatrix(std::move(m), std::move(spectrum));
    }

    const ComplexMatrix& mat() const noexcept { return mat_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(mat_.rows()); }
    /// Ascending eigenvalues.
    const RealVector& spectrum() const noexcept { return spectrum_; }

    /// Number of qubits when the dimension is a power of two, otherwise -1.
    int qubits() const noexcept {
        const std::size_t d = dim();
        if ((d & (d - 1)) != 0) return -1;
        int q = 0;
        while ((std::size_t{1} << q) < d) ++q;
        return q;
    }

    double purity() const { return (mat_ * mat_).trace().real(); }

private:
    DensityMatrix(ComplexMatrix m, RealVector s) : mat_(std::move(m)), spectrum_(std::move(s)) {}

    ComplexMatrix mat_;
    RealVector spectrum_;
};

class PureState {
public:
    static PureState from_amplitudes(ComplexVector amps) {
        if (amps.size() == 0) throw InvalidStateError("PureState: empty amplitude vector");
        const double norm2 = amps.squaredNorm();
        if (!(std::abs(norm2 - 1.0) <= 1e-10)) {
            throw InvalidStateError("PureState: amplitudes are not normalized (|psi|^2 = " +
                                    std::to_string(norm2) + ")");
        }
        return PureState(std::move(amps));
    }

    const ComplexVector& amplitudes() const noexcept { return amps_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }

    DensityMatrix projector() const {
        return DensityMatrix::from_matrix(amps_ * amps_.adjoint());
    }

private:
    explicit PureState(ComplexVector a) : amps_(std::move(a)) {}
    ComplexVector amps_;
};

/// Hilbert-Schmidt random state G G^dagger / tr(G G^dagger) with Ginibre G.
inline DensityMatrix random_hs_state(std::size_t d, Rng& rng) {
    if (d == 0) throw DimensionError("random_hs_state: dimension must be positive");
    const auto n = static_cast<Eigen::Index>(d);
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
    }
    ComplexMatrix w = g * g.adjoint();
    w /= w.trace().real();
    return DensityMatrix::from_matrix(std::move(w));
}

inline PureState random_pure_state(std::size_t d, Rng& rng) {
    if (d == 0) throw DimensionError("random_pure_state: dimension must be positive");
    ComplexVector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_gaussian();
    v /= v.norm();
    return PureState::from_amplitudes(std::move(v));
}

/// Diagonal state with eigenvalues in [0, 4/d] summing to one.
///
/// Eigenvalues start uniform in [0, 4/d]. Each round rescales the entries that
/// are not yet pinned so the total is one, then pins any entry that crossed
/// 4/d at exactly 4/d. Every round pins at least one new entry or stops, so
/// the loop ends within d rounds.
inline DensityMatrix bounded_spectrum_state(std::size_t d, Rng& rng) {
    if (d < 2) throw DimensionError("bounded_spectrum_state: dimension must be at least 2");
    const double cap = 4.0 / static_cast<double>(d);
    std::vector<double> eps(d);
    for (auto& e : eps) e = rng.uniform(0.0, cap);
    std::vector<bool> pinned(d, false);

    constexpr int kMaxRounds = 100;
    bool feasible = false;
    for (int round = 0; round < kMaxRounds; ++round) {
        double free_mass = 0.0;
        std::size_t n_pinned = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (pinned[i]) ++n_pinned;
            else free_mass += eps[i];
        }
        const double target = 1.0 - static_cast<double>(n_pinned) * cap;
        if (free_mass <= 0.0) {
            // All free entries drew exactly zero; spread the remainder evenly.
            const std::size_t n_free = d - n_pinned;
            for (std::size_t i = 0; i < d; ++i) {
                if (!pinned[i]) eps[i] = target / static_cast<double>(n_free);
            }
        } else {
            const double scale = target / free_mass;
            for (std::size_t i = 0; i < d; ++i) {
                if (!pinned[i]) eps[i] *= scale;
            }
        }
        bool crossed = false;
        for (std::size_t i = 0; i < d; ++i) {
            if (!pinned[i] && eps[i] > cap) {
                eps[i] = cap;
                pinned[i] = true;
                crossed = true;
            }
        }
        if (!crossed) {
            feasible = true;
            break;
        }
    }
    if (!feasible) throw std::runtime_error("bounded_spectrum_state: projection did not converge");

    std::vector<Complex> diag(eps.begin(), eps.end());
    return DensityMatrix::from_matrix(diagonal(diag));
}

struct StatePair {
    DensityMatrix rho;
    DensityMatrix sigma;
};

/// rho = I/2 and sigma = I/2 + c X + d Y; requires c^2 + d^2 <= 1/4.
inline StatePair single_qubit_min_case(double c, double d_coef) {
    if (!(c * c + d_coef * d_coef <= 0.25 + 1e-12)) {
        throw InvalidStateError("single_qubit_min_case: c^2 + d^2 must not exceed 1/4");
    }
    ComplexMatrix sigma(2, 2);
    sigma << 0.5, Complex{c, -d_coef}, Complex{c, d_coef}, 0.5;
    return {DensityMatrix::from_matrix(0.5 * identity(2)), DensityMatrix::from_matrix(std::move(sigma))};
}

/// Haar-random unitary: QR of a Ginibre matrix with R's diagonal phases
/// moved into Q.
inline ComplexMatrix random_unitary(std::size_t d, Rng& rng) {
    if (d == 0) throw DimensionError("random_unitary: dimension must be positive");
    const auto n = static_cast<Eigen::Index>(d);
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR();
    for (Eigen::Index c = 0; c < n; ++c) {
        const double mag = std::abs(r(c, c));
        if (mag > 0.0) q.col(c) *= r(c, c) / mag;
    }
    return q;
}

inline DensityMatrix maximally_mixed(std::size_t d) {
    if (d == 0) throw DimensionError("maximally_mixed: dimension must be positive");
    return DensityMatrix::from_matrix(identity(d) / static_cast<double>(d));
}

/// u * state * u^dagger.
inline DensityMatrix conjugate_by(const DensityMatrix& state, const ComplexMatrix& u) {
    detail::require_square(u, "conjugate_by");
    if (static_cast<std::size_t>(u.rows()) != state.dim()) {
        throw DimensionError("conjugate_by: unitary dimension does not match the state");
    }
    if (!is_unitary(u)) throw std::invalid_argument("conjugate_by: matrix is not unitary");
    return DensityMatrix::from_matrix(u * state.mat() * u.adjoint());
}

}  // namespace biolmr
