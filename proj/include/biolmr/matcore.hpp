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

// Dense complex linear algebra used by every other module: tensor products,
// register bookkeeping (partial traces, swaps), commutators, Hermitian
// eigendecomposition and the norms channel outputs are measured with.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace biolmr {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Maximum |h - h^dagger| entry tolerated before a matrix counts as non-Hermitian.
inline constexpr double kHermitianTol = 1e-10;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotHermitianError : std::domain_error {
    using std::domain_error::domain_error;
};

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
    }
}

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    require_square(a, what);
    require_square(b, what);
    if (a.rows() != b.rows()) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" +
                             std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
    }
}

inline std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

// Mixed-radix digits of a flat index, register 0 most significant.
inline void unflatten(std::size_t flat, std::span<const std::size_t> dims,
                      std::span<std::size_t> digits) {
    for (std::size_t r = dims.size(); r-- > 0;) {
        digits[r] = flat % dims[r];
        flat /= dims[r];
    }
}

inline std::size_t flatten(std::span<const std::size_t> digits, std::span<const std::size_t> dims) {
    std::size_t flat = 0;
    for (std::size_t r = 0; r < dims.size(); ++r) flat = flat * dims[r] + digits[r];
    return flat;
}

}  // namespace detail

inline ComplexMatrix identity(std::size_t d) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

inline ComplexMatrix diagonal(std::span<const Complex> entries) {
    const auto d = static_cast<Eigen::Index>(entries.size());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) = entries[static_cast<std::size_t>(i)];
    return m;
}

inline ComplexMatrix diagonal(std::initializer_list<Complex> entries) {
    return diagonal(std::span<const Complex>(entries.begin(), entries.size()));
}

inline ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

/// Largest entry of |m - m^dagger|.
inline double hermiticity_defect(const ComplexMatrix& m) {
    detail::require_square(m, "hermiticity_defect");
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
    return hermiticity_defect(m) <= tol;
}

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-10) {
    detail::require_square(u, "is_unitary");
    return (u.adjoint() * u - identity(static_cast<std::size_t>(u.rows()))).norm() <= tol;
}

/// Kronecker product; entry (i*db + p, j*db + q) is a(i,j) * b(p,q).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    ComplexMatrix out(ar * br, ac * bc);
    for (Eigen::Index i = 0; i < ar; ++i) {
        for (Eigen::Index j = 0; j < ac; ++j) {
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
        }
    }
    return out;
}

inline ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Reduced matrix on register `keep`; every other register is traced out.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> reg_dims,
                                   std::size_t keep) {
    detail::require_square(m, "partial_trace");
    if (reg_dims.empty() || keep >= reg_dims.size()) {
        throw DimensionError("partial_trace: kept register index out of range");
    }
    for (auto d : reg_dims) {
        if (d == 0) throw DimensionError("partial_trace: register dimension must be positive");
    }
    const std::size_t total = detail::product(reg_dims);
    if (total != static_cast<std::size_t>(m.rows())) {
        throw DimensionError("partial_trace: register dimensions do not factor the matrix");
    }

    const std::size_t dk = reg_dims[keep];
    // Split every index into (kept digit, environment index) once.
    std::size_t inner = 1;
    for (std::size_t r = keep + 1; r < reg_dims.size(); ++r) inner *= reg_dims[r];
    const std::size_t outer = total / (dk * inner);

    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t b = 0; b < dk; ++b) {
            Complex acc{0.0, 0.0};
            for (std::size_t o = 0; o < outer; ++o) {
                const std::size_t row0 = (o * dk + a) * inner;
                const std::size_t col0 = (o * dk + b) * inner;
                for (std::size_t in = 0; in < inner; ++in) {
                    acc += m(static_cast<Eigen::Index>(row0 + in), static_cast<Eigen::Index>(col0 + in));
                }
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    }
    return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::initializer_list<std::size_t> reg_dims,
                                   std::size_t keep) {
    return partial_trace(m, std::span<const std::size_t>(reg_dims.begin(), reg_dims.size()), keep);
}

/// Basis-state permutation exchanging registers i and j: perm[x] is the image of |x>.
inline std::vector<std::size_t> register_swap_permutation(std::span<const std::size_t> reg_dims,
                                                          std::size_t i, std::size_t j) {
    if (i >= reg_dims.size() || j >= reg_dims.size()) {
        throw DimensionError("swap_on_registers: register index out of range");
    }
    if (i == j) throw DimensionError("swap_on_registers: registers must differ");
    if (reg_dims[i] != reg_dims[j]) {
        throw DimensionError("swap_on_registers: registers have unequal dimensions");
    }
    const std::size_t total = detail::product(reg_dims);
    std::vector<std::size_t> perm(total);
    std::vector<std::size_t> digits(reg_dims.size());
    for (std::size_t x = 0; x < total; ++x) {
        detail::unflatten(x, reg_dims, digits);
        std::swap(digits[i], digits[j]);
        perm[x] = detail::flatten(digits, reg_dims);
    }
    return perm;
}

inline ComplexMatrix swap_on_registers(std::span<const std::size_t> reg_dims, std::size_t i,
                                       std::size_t j) {
    const auto perm = register_swap_permutation(reg_dims, i, j);
    const auto n = static_cast<Eigen::Index>(perm.size());
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    for (std::size_t x = 0; x < perm.size(); ++x) {
        s(static_cast<Eigen::Index>(perm[x]), static_cast<Eigen::Index>(x)) = 1.0;
    }
    return s;
}

inline ComplexMatrix swap_on_registers(std::initializer_list<std::size_t> reg_dims, std::size_t i,
                                       std::size_t j) {
    return swap_on_registers(std::span<const std::size_t>(reg_dims.begin(), reg_dims.size()), i, j);
}

inline ComplexMatrix hadamard_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_dim(a, b, "hadamard_product");
    return a.cwiseProduct(b);
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

inline ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_dim(a, b, "anticommutator");
    return a * b + b * a;
}

/// [rho, sigma]_k with [rho, sigma]_0 = sigma and [rho, sigma]_{k+1} = [rho, [rho, sigma]_k].
inline ComplexMatrix nested_commutator(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                                       unsigned k) {
    detail::require_same_dim(rho, sigma, "nested_commutator");
    ComplexMatrix acc = sigma;
    for (unsigned level = 0; level < k; ++level) acc = rho * acc - acc * rho;
    return acc;
}

struct HermitianEigen {
    RealVector values;     // ascending
    ComplexMatrix vectors; // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// decomposition; inputs further than kHermitianTol from Hermitian are rejected.
inline HermitianEigen eig_herm(const ComplexMatrix& h) {
    detail::require_square(h, "eig_herm");
    const double defect = hermiticity_defect(h);
    if (!(defect <= kHermitianTol)) {
        throw NotHermitianError("eig_herm: input is not Hermitian (defect " +
                                std::to_string(defect) + ")");
    }
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_herm: eigensolver failed to converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(-i h t) for Hermitian h.
inline ComplexMatrix herm_expm(const ComplexMatrix& h, double t) {
    const auto eig = eig_herm(h);
    ComplexVector phases(eig.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(-kI * (eig.values(i) * t));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// Sum of singular values. Hermitian inputs go through the eigensolver.
inline double trace_norm(const ComplexMatrix& a) {
    detail::require_square(a, "trace_norm");
    if (is_hermitian(a)) {
        return eig_herm(a).values.cwiseAbs().sum();
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues().sum();
}

inline double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

}  // namespace biolmr
