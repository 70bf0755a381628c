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

// Error metrics and the quantities derived from them.
//
// To second order in t/n the plain protocol misses the target by
// (t^2 / 2n) ||A||_1 and the cloning-assisted limit by (t^2 / 2n) ||B||_1, with
//
//   A = [rho, sigma]_2 + 2 (rho - sigma)
//   B = [rho, sigma]_2 + 2 rho o sigma - {rho, sigma}
//   C = A - B = 2 (rho - sigma) + {rho, sigma} - 2 rho o sigma
//
// and Hadamard products taken in rho's eigenbasis. Q1 and Q2 are ||A|| / ||B||
// in the trace and Frobenius norms.

#include "biolmr/channels.hpp"
#include "biolmr/cloning.hpp"
#include "biolmr/matcore.hpp"
#include "biolmr/states.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace biolmr {

/// Raised when ||B|| vanishes, e.g. for commuting diagonal pairs where both
/// protocols are exact to second order and the quotient is 0/0.
struct DegenerateQuotient : std::domain_error {
    using std::domain_error::domain_error;
};

inline constexpr double kDegenerateNormTol = 1e-12;

struct AbcDecomposition {
    ComplexMatrix a_mat;
    ComplexMatrix b_mat;
    ComplexMatrix c_mat;
    double a_trace_norm = 0.0;
    double b_trace_norm = 0.0;
    double c_trace_norm = 0.0;
    double a_frobenius = 0.0;
    double b_frobenius = 0.0;
    double c_frobenius = 0.0;
};

inline AbcDecomposition abc_decomposition(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::require_pair(sigma, rho, "abc_decomposition");
    const CloningBasis basis = rho_eigenbasis(rho);
    const ComplexMatrix r = basis.to_basis(rho.mat()).diagonal().asDiagonal();
    const ComplexMatrix s = basis.to_basis(sigma.mat());

    const ComplexMatrix double_comm = nested_commutator(r, s, 2);
    const ComplexMatrix diff = 2.0 * (r - s);
    const ComplexMatrix dephased = 2.0 * hadamard_product(r, s) - anticommutator(r, s);

    AbcDecomposition out;
    out.a_mat = basis.from_basis(double_comm + diff);
    out.b_mat = basis.from_basis(double_comm + dephased);
    out.c_mat = basis.from_basis(diff - dephased);
    out.a_trace_norm = trace_norm(out.a_mat);
    out.b_trace_norm = trace_norm(out.b_mat);
    out.c_trace_norm = trace_norm(out.c_mat);
    out.a_frobenius = frobenius_norm(out.a_mat);
    out.b_frobenius = frobenius_norm(out.b_mat);
    out.c_frobenius = frobenius_norm(out.c_mat);
    return out;
}

inline double q1(const AbcDecomposition& abc) {
    if (!(abc.b_trace_norm > kDegenerateNormTol)) throw DegenerateQuotient("q1: ||B||_1 vanishes");
    return abc.a_trace_norm / abc.b_trace_norm;
}

inline double q2(const AbcDecomposition& abc) {
    if (!(abc.b_frobenius > kDegenerateNormTol)) throw DegenerateQuotient("q2: ||B||_2 vanishes");
    return abc.a_frobenius / abc.b_frobenius;
}

inline double q1(const DensityMatrix& rho, const DensityMatrix& sigma) { return q1(abc_decomposition(rho, sigma)); }
inline double q2(const DensityMatrix& rho, const DensityMatrix& sigma) { return q2(abc_decomposition(rho, sigma)); }

/// ||T_LMR^n(sigma) - exp(-i rho t) sigma exp(i rho t)||_1 at finite n.
inline double eps_lmr_exact(const DensityMatrix& rho, const DensityMatrix& sigma, double t, std::size_t n) {
    const DensityMatrix target = exact_target(sigma, rho, t);
    return trace_norm(lmr_n(sigma, rho, ProtocolParams(t, n)).mat() - target.mat());
}

/// Finite-k cloning-assisted error, cloning in rho's eigenbasis.
inline double eps_bio_exact(const DensityMatrix& rho, const DensityMatrix& sigma, double t, std::size_t n,
                            std::size_t k) {
    const DensityMatrix target = exact_target(sigma, rho, t);
    const DensityMatrix out = bio_protocol(sigma, rho, ProtocolParams(t, n, k), rho_eigenbasis(rho));
    return trace_norm(out.mat() - target.mat());
}

inline double eps_bio_limit_exact(const DensityMatrix& rho, const DensityMatrix& sigma, double t, std::size_t n) {
    const DensityMatrix target = exact_target(sigma, rho, t);
    return trace_norm(bio_protocol_limit(sigma, rho, ProtocolParams(t, n)).mat() - target.mat());
}

/// M = 4 (1 - p+^2) + (8 p+ - 3 p- - 4) p- with p+ = p_k + p_r, p- = (p_k - p_r)^2.
inline double mkr_coefficient(double p_k, double p_r) {
    if (!(p_k >= 0.0 && p_r >= 0.0 && p_k + p_r <= 1.0 + 1e-12)) {
        throw std::domain_error("mkr_coefficient: need p_k, p_r >= 0 and p_k + p_r <= 1");
    }
    const double plus = p_k + p_r;
    const double minus = (p_k - p_r) * (p_k - p_r);
    return 4.0 * (1.0 - plus * plus) + (8.0 * plus - 3.0 * minus - 4.0) * minus;
}

struct MixedlikeBound {
    double lhs;  // Q1 (infinite when ||B||_1 vanishes)
    double rhs;  // (d/8) (||rho - sigma||_1 - 32/d^2) / (1 + 4/d)
    bool holds;
};

/// Lower bound on Q1 for a diagonal rho whose eigenvalues are at most 4/d.
inline MixedlikeBound q1_mixedlike_bound(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::require_pair(sigma, rho, "q1_mixedlike_bound");
    const double d = static_cast<double>(rho.dim());
    if (!detail::offdiagonal_negligible(rho.mat(), 0.0)) {
        throw std::domain_error("q1_mixedlike_bound: rho must be diagonal");
    }
    for (Eigen::Index i = 0; i < rho.mat().rows(); ++i) {
        if (rho.mat()(i, i).real() > 4.0 / d + 1e-12) {
            throw std::domain_error("q1_mixedlike_bound: rho has an eigenvalue above 4/d");
        }
    }
    const AbcDecomposition abc = abc_decomposition(rho, sigma);
    const double lhs = abc.b_trace_norm > kDegenerateNormTol ? q1(abc) : std::numeric_limits<double>::infinity();
    const double dist = trace_norm(rho.mat() - sigma.mat());
    const double rhs = (d / 8.0) * (dist - 32.0 / (d * d)) / (1.0 + 4.0 / d);
    return {lhs, rhs, lhs >= rhs - 1e-9};
}

/// ||rho - sigma||_1 >= 1 - 4R/d for rank(sigma) = R and rho's spectrum in [0, 4/d].
inline double rank_distance_floor(std::size_t rank, std::size_t d) {
    return 1.0 - 4.0 * static_cast<double>(rank) / static_cast<double>(d);
}

/// Right-hand side of l >= n (nk||A|| / (nk||B|| + ||C||) - 1): extra original
/// copies needed to match n originals each expanded into k biomimetic copies.
/// Negative means none are needed.
inline double copies_lower_bound(std::size_t n, std::size_t k, const AbcDecomposition& abc) {
    if (n == 0 || k == 0) throw std::invalid_argument("copies_lower_bound: n and k must be positive");
    if (!(abc.b_trace_norm > kDegenerateNormTol)) throw DegenerateQuotient("copies_lower_bound: ||B||_1 vanishes");
    const double nk = static_cast<double>(n) * static_cast<double>(k);
    return static_cast<double>(n) *
           (nk * abc.a_trace_norm / (nk * abc.b_trace_norm + abc.c_trace_norm) - 1.0);
}

/// Costs by role. The threshold below bounds c_clone / c_source.
struct CostModelInputs {
    std::size_t n = 1;
    std::size_t k = 1;
    double c_source = 1.0;  // one extra original copy
    double c_clone = 0.0;   // one biomimetic copy
};

struct CostThreshold {
    double threshold;  // (1/(k-1)) (nk||A|| - nk||B|| - ||C||) / (nk||B|| + ||C||)
    double asymptote;  // (Q1 - 1) / (k - 1), the nk -> infinity form
};

inline CostThreshold cost_threshold(std::size_t n, std::size_t k, const AbcDecomposition& abc) {
    if (k < 2) throw std::invalid_argument("cost_threshold: k must be at least 2");
    if (n == 0) throw std::invalid_argument("cost_threshold: n must be positive");
    if (!(abc.b_trace_norm > kDegenerateNormTol)) throw DegenerateQuotient("cost_threshold: ||B||_1 vanishes");
    const double nk = static_cast<double>(n) * static_cast<double>(k);
    const double km1 = static_cast<double>(k - 1);
    const double denom = nk * abc.b_trace_norm + abc.c_trace_norm;
    const double threshold = (nk * abc.a_trace_norm - nk * abc.b_trace_norm - abc.c_trace_norm) / denom / km1;
    return {threshold, (q1(abc) - 1.0) / km1};
}

/// True when assisting with clones is no more expensive than buying originals:
/// l * c_source >= n (k - 1) * c_clone.
inline bool cloning_favorable(const CostModelInputs& in, const AbcDecomposition& abc) {
    if (in.c_source < 0.0 || in.c_clone < 0.0) throw std::invalid_argument("cloning_favorable: negative cost");
    if (in.k < 2) return false;
    return in.c_clone <= in.c_source * cost_threshold(in.n, in.k, abc).threshold;
}

struct PhaseOracleResult {
    PureState state;
    double ancilla_residual;  // norm of the amplitude left outside ancilla |0..0>
};

/// Statevector simulation of exp(-i rho t) for rho = diag(p) acting on psi,
/// through an m-qubit ancilla register:
///   O1:     |j>|a> -> |j>|a xor floor(p_j 2^m)>
///   phases: ancilla bit s (weight 2^-s) set -> exp(-i t 2^-s)
///   O1 again (it is an involution) to uncompute.
/// The result is sum_j exp(-i p~_j t) psi_j |j> with p~_j the m-bit truncation.
inline PhaseOracleResult phase_oracle_exponentiation(std::span<const double> p_values, double t, std::size_t m,
                                                     const PureState& psi,
                                                     std::size_t size_cap = std::size_t{1} << 24) {
    const std::size_t d = psi.dim();
    if (p_values.size() != d) throw DimensionError("phase_oracle_exponentiation: p_values length must match psi");
    if (m == 0 || m > 52) throw std::invalid_argument("phase_oracle_exponentiation: m must be in [1, 52]");
    for (double p : p_values) {
        if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("phase_oracle_exponentiation: p(j) must lie in [0, 1)");
    }
    const std::size_t levels = std::size_t{1} << m;
    if (d > size_cap / levels) throw SizeCapExceeded("phase_oracle_exponentiation: d * 2^m exceeds size cap");

    std::vector<std::size_t> codes(d);
    for (std::size_t j = 0; j < d; ++j) {
        codes[j] = std::min(levels - 1, static_cast<std::size_t>(std::floor(p_values[j] * static_cast<double>(levels))));
    }

    // Index j * 2^m + a.
    std::vector<Complex> amps(d * levels, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < d; ++j) amps[j * levels] = psi.amplitudes()(static_cast<Eigen::Index>(j));

    auto apply_o1 = [&] {
        std::vector<Complex> next(amps.size(), Complex{0.0, 0.0});
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t a = 0; a < levels; ++a) next[j * levels + (a ^ codes[j])] = amps[j * levels + a];
        }
        amps.swap(next);
    };

    apply_o1();
    std::vector<Complex> bit_phase(m);
    for (std::size_t s = 1; s <= m; ++s) bit_phase[s - 1] = std::exp(-kI * (t * std::ldexp(1.0, -static_cast<int>(s))));
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t a = 0; a < levels; ++a) {
            Complex phase{1.0, 0.0};
            for (std::size_t s = 1; s <= m; ++s) {
                if ((a >> (m - s)) & 1U) phase *= bit_phase[s - 1];
            }
            amps[j * levels + a] *= phase;
        }
    }
    apply_o1();

    ComplexVector out(static_cast<Eigen::Index>(d));
    double leftover = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        out(static_cast<Eigen::Index>(j)) = amps[j * levels];
        for (std::size_t a = 1; a < levels; ++a) leftover += std::norm(amps[j * levels + a]);
    }
    const double residual = std::sqrt(leftover);
    if (residual > 1e-12) throw std::runtime_error("phase_oracle_exponentiation: ancilla register did not uncompute");
    return {PureState::from_amplitudes(std::move(out)), residual};
}

/// sum_j exp(-i p_j t) psi_j |j>.
inline PureState exact_phase_evolution(std::span<const double> p_values, double t, const PureState& psi) {
    if (p_values.size() != psi.dim()) throw DimensionError("exact_phase_evolution: length mismatch");
    ComplexVector out = psi.amplitudes();
    for (std::size_t j = 0; j < p_values.size(); ++j) out(static_cast<Eigen::Index>(j)) *= std::exp(-kI * (p_values[j] * t));
    return PureState::from_amplitudes(std::move(out));
}

/// 1 - |<a|b>|^2.
inline double infidelity(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim()) throw DimensionError("infidelity: dimension mismatch");
    return 1.0 - std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace biolmr
