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

// Biomimetic cloning: copies that replicate the statistics of one preferred
// basis exactly, |psi_j>|0> -> |psi_j>|psi_j>.

#include "biolmr/matcore.hpp"
#include "biolmr/states.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace biolmr {

/// Default bound on the total dimension of any explicitly built tensor state.
inline constexpr std::size_t kDefaultSizeCap = std::size_t{1} << 12;

struct SizeCapExceeded : std::length_error {
    using std::length_error::length_error;
};

namespace detail {

inline std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap, const char* what) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (out > cap / base) {
            throw SizeCapExceeded(std::string(what) + ": dimension exceeds size cap " + std::to_string(cap));
        }
        out *= base;
    }
    if (out > cap) {
        throw SizeCapExceeded(std::string(what) + ": dimension exceeds size cap " + std::to_string(cap));
    }
    return out;
}

// Scales each column so its first non-negligible component is real positive.
inline void normalize_column_phases(ComplexMatrix& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            const double mag = std::abs(u(r, c));
            if (mag > 1e-12) {
                u.col(c) *= std::conj(u(r, c)) / mag;
                break;
            }
        }
    }
}

}  // namespace detail

/// Unitary whose column j is the preferred basis vector |psi_j>.
class CloningBasis {
public:
    CloningBasis(ComplexMatrix u_psi, std::string label) : u_(std::move(u_psi)), label_(std::move(label)) {
        detail::require_square(u_, "CloningBasis");
        if (!is_unitary(u_)) throw std::invalid_argument("CloningBasis: basis matrix is not unitary");
    }

    static CloningBasis computational(std::size_t d) { return {identity(d), "computational"}; }

    const ComplexMatrix& u_psi() const noexcept { return u_; }
    const std::string& label() const noexcept { return label_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(u_.rows()); }

    /// u^dagger m u: the matrix of m in this basis.
    ComplexMatrix to_basis(const ComplexMatrix& m) const { return u_.adjoint() * m * u_; }
    ComplexMatrix from_basis(const ComplexMatrix& m) const { return u_ * m * u_.adjoint(); }

private:
    ComplexMatrix u_;
    std::string label_;
};

/// Eigenbasis of a Hermitian matrix, columns in ascending eigenvalue order with
/// the first non-negligible component of each column real positive. A matrix
/// that is already diagonal gets the sorting permutation, so I/d maps to the
/// identity and degenerate diagonal matrices keep computational basis vectors.
inline CloningBasis eigenbasis_of(const ComplexMatrix& h, std::string label) {
    detail::require_square(h, "eigenbasis_of");
    const auto d = h.rows();
    const ComplexMatrix offdiag = h - ComplexMatrix(h.diagonal().asDiagonal());
    if (offdiag.cwiseAbs().maxCoeff() == 0.0) {
        if (hermiticity_defect(h) > kHermitianTol) {
            throw NotHermitianError("eigenbasis_of: input is not Hermitian");
        }
        std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return h(a, a).real() < h(b, b).real(); });
        ComplexMatrix u = ComplexMatrix::Zero(d, d);
        for (Eigen::Index c = 0; c < d; ++c) u(order[static_cast<std::size_t>(c)], c) = 1.0;
        return {std::move(u), std::move(label)};
    }
    ComplexMatrix u = eig_herm(h).vectors;
    detail::normalize_column_phases(u);
    return {std::move(u), std::move(label)};
}

inline CloningBasis rho_eigenbasis(const DensityMatrix& rho) {
    return eigenbasis_of(rho.mat(), "rho-eigenbasis");
}

/// rho^(k) = sum_ij rho~_ij (|psi_i><psi_j|)^{(x)k}, where rho~ is rho in the
/// cloning basis. k = 1 returns rho itself.
inline ComplexMatrix biomimetic_copies(const DensityMatrix& rho, const CloningBasis& basis, std::size_t k,
                                       std::size_t size_cap = kDefaultSizeCap) {
    if (k == 0) throw std::invalid_argument("biomimetic_copies: k must be at least 1");
    if (basis.dim() != rho.dim()) throw DimensionError("biomimetic_copies: basis dimension mismatch");
    if (k == 1) return rho.mat();

    const std::size_t d = rho.dim();
    const std::size_t total = detail::checked_power(d, k, size_cap, "biomimetic_copies");
    const ComplexMatrix rho_b = basis.to_basis(rho.mat());

    // |psi_i>^{(x)k} for each basis vector.
    std::vector<ComplexVector> replicas;
    replicas.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        ComplexVector col = basis.u_psi().col(static_cast<Eigen::Index>(i));
        ComplexVector acc = col;
        for (std::size_t r = 1; r < k; ++r) acc = kron(acc, col);
        replicas.push_back(std::move(acc));
    }

    const auto n = static_cast<Eigen::Index>(total);
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const Complex coef = rho_b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (coef == Complex{0.0, 0.0}) continue;
            out.noalias() += coef * (replicas[i] * replicas[j].adjoint());
        }
    }
    return out;
}

/// Permutation matrix of a CNOT between two qubits of an n-qubit register
/// (qubit 0 is the most significant bit).
inline ComplexMatrix cnot_gate(std::size_t n_qubits, std::size_t control, std::size_t target) {
    if (control >= n_qubits || target >= n_qubits || control == target) {
        throw std::invalid_argument("cnot_gate: invalid control/target qubits");
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t cbit = std::size_t{1} << (n_qubits - 1 - control);
    const std::size_t tbit = std::size_t{1} << (n_qubits - 1 - target);
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix g = ComplexMatrix::Zero(n, n);
    for (std::size_t x = 0; x < dim; ++x) {
        const std::size_t y = (x & cbit) ? (x ^ tbit) : x;
        g(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = 1.0;
    }
    return g;
}

/// CNOT ladder copying register 1 into registers 2..k qubit by qubit. The
/// gates commute; they are multiplied in ascending (register, qubit) order.
inline ComplexMatrix cnot_ladder(std::size_t q, std::size_t k) {
    const std::size_t n_qubits = q * k;
    ComplexMatrix ladder = identity(std::size_t{1} << n_qubits);
    for (std::size_t reg = 1; reg < k; ++reg) {
        for (std::size_t m = 0; m < q; ++m) {
            ladder = cnot_gate(n_qubits, m, reg * q + m) * ladder;
        }
    }
    return ladder;
}

/// Gate-level oracle on k registers of q qubits:
/// (U_psi^{(x)k}) * ladder * (U_psi^dagger (x) I). Acting on rho (x) |0..0><0..0|
/// it produces biomimetic_copies(rho, basis, k).
inline ComplexMatrix oracle_circuit(std::size_t q, std::size_t k, const CloningBasis& basis,
                                    std::size_t size_cap = kDefaultSizeCap) {
    if (q == 0 || k == 0) throw std::invalid_argument("oracle_circuit: q and k must be positive");
    if (basis.dim() != (std::size_t{1} << q)) throw DimensionError("oracle_circuit: basis is not a q-qubit unitary");
    const std::size_t total = detail::checked_power(std::size_t{1} << q, k, size_cap, "oracle_circuit");

    const ComplexMatrix& u = basis.u_psi();
    ComplexMatrix u_all = u;
    ComplexMatrix undo_first = u.adjoint();
    for (std::size_t r = 1; r < k; ++r) {
        u_all = kron(u_all, u);
        undo_first = kron(undo_first, identity(std::size_t{1} << q));
    }
    ComplexMatrix circuit = u_all * cnot_ladder(q, k) * undo_first;
    if (static_cast<std::size_t>(circuit.rows()) != total) throw std::logic_error("oracle_circuit: size bookkeeping");
    return circuit;
}

}  // namespace biolmr
