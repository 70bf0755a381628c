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

#include "biolmr/channels.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

namespace biolmr {
namespace {

using testing::max_abs_diff;

DensityMatrix plus_state() {
    ComplexMatrix m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return DensityMatrix::from_matrix(m);
}

// Two-register reference: tr_2[e^{-i dt S} (sigma (x) rho) e^{i dt S}].
ComplexMatrix swap_reference(const DensityMatrix& sigma, const DensityMatrix& rho, double dt) {
    const std::size_t d = rho.dim();
    const ComplexMatrix u = herm_expm(swap_on_registers({d, d}, 0, 1), dt);
    return partial_trace(u * kron(sigma.mat(), rho.mat()) * u.adjoint(), {d, d}, 0);
}

TEST(ApplyPartialSwap, MatchesDenseExponential) {
    Rng rng(1);
    const std::array<std::size_t, 3> dims{2, 3, 2};
    const ComplexMatrix x = testing::random_hermitian(12, rng);
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 2}, {0, 1}}) {
        if (dims[i] != dims[j]) continue;
        const ComplexMatrix u = herm_expm(swap_on_registers(dims, i, j), 0.37);
        EXPECT_LT(max_abs_diff(apply_partial_swap(x, dims, i, j, 0.37), u * x * u.adjoint()), 1e-13);
    }
}

TEST(LmrStep, ZeroTimeIsIdentity) {
    Rng rng(2);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    EXPECT_LT(max_abs_diff(lmr_step(sigma, rho, 0.0).mat(), sigma.mat()), 1e-15);
}

TEST(LmrStep, EqualStatesAreFixed) {
    Rng rng(3);
    const DensityMatrix s = random_hs_state(3, rng);
    EXPECT_LT(max_abs_diff(lmr_step(s, s, 0.8).mat(), s.mat()), 1e-14);
}

TEST(LmrStep, MatchesPartialSwapSimulation) {
    const DensityMatrix rho = DensityMatrix::from_matrix(diagonal({0.75, 0.25}));
    EXPECT_LT(max_abs_diff(lmr_step(plus_state(), rho, 0.1).mat(), swap_reference(plus_state(), rho, 0.1)), 1e-12);
}

TEST(LmrStep, RejectsDimensionMismatch) {
    EXPECT_THROW(lmr_step(maximally_mixed(2), maximally_mixed(3), 0.1), DimensionError);
}

TEST(LmrN, SingleStepReduces) {
    Rng rng(4);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    EXPECT_LT(max_abs_diff(lmr_n(sigma, rho, ProtocolParams(0.3, 1)).mat(), lmr_step(sigma, rho, 0.3).mat()), 1e-15);
}

TEST(LmrN, CommutingPairIsConvexMix) {
    const DensityMatrix rho = DensityMatrix::from_matrix(diagonal({0.9, 0.1}));
    const DensityMatrix sigma = DensityMatrix::from_matrix(diagonal({0.2, 0.8}));
    const ProtocolParams p(0.6, 5);
    const double w = std::pow(std::cos(p.dt()), 10);
    EXPECT_LT(max_abs_diff(lmr_n(sigma, rho, p).mat(), w * sigma.mat() + (1 - w) * rho.mat()), 1e-14);
}

TEST(LmrN, IteratedMatchesBinomialForm) {
    Rng rng(5);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    const ProtocolParams p(0.2, 4);
    EXPECT_LT(max_abs_diff(lmr_n(sigma, rho, p).mat(), lmr_n_closed(sigma, rho, p).mat()), 1e-12);
}

TEST(ProtocolParams, StepSizes) {
    const ProtocolParams p(0.2, 4, 8);
    EXPECT_EQ(p.dt(), 0.2 / 4.0);
    EXPECT_EQ(p.delta_t(), (0.2 / 4.0) / 8.0);
    EXPECT_THROW(ProtocolParams(0.2, 0), std::invalid_argument);
    EXPECT_THROW(ProtocolParams(0.2, 1, 0), std::invalid_argument);
    EXPECT_THROW(ProtocolParams(std::nan(""), 1), std::invalid_argument);
}

TEST(ExactTarget, ZeroTime) {
    Rng rng(6);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    EXPECT_LT(max_abs_diff(exact_target(sigma, rho, 0.0).mat(), sigma.mat()), 1e-14);
}

TEST(ExactTarget, CommutingPairUnchanged) {
    const DensityMatrix rho = DensityMatrix::from_matrix(diagonal({0.9, 0.1}));
    const DensityMatrix sigma = DensityMatrix::from_matrix(diagonal({0.2, 0.8}));
    EXPECT_LT(max_abs_diff(exact_target(sigma, rho, 1.7).mat(), sigma.mat()), 1e-14);
}

TEST(ExactTarget, PreservesSpectrum) {
    Rng rng(7);
    const DensityMatrix rho = random_hs_state(4, rng), sigma = random_hs_state(4, rng);
    EXPECT_LT((exact_target(sigma, rho, 2.0).spectrum() - sigma.spectrum()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BioChannelClosed, SingleCopyIsPlainLmrAndWarns) {
    Rng rng(8);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    const CloningBasis basis(random_unitary(3, rng), "random");
    ChannelDiagnostics diag;
    const DensityMatrix out = bio_channel_closed(sigma, rho, basis, 0.2, 1, &diag);
    EXPECT_LT(max_abs_diff(out.mat(), lmr_step(sigma, rho, 0.2).mat()), 1e-15);
    EXPECT_EQ(diag.warnings.size(), 1U);

    ChannelDiagnostics quiet;
    bio_channel_closed(sigma, rho, rho_eigenbasis(rho), 0.2, 1, &quiet);
    EXPECT_TRUE(quiet.warnings.empty());
}

TEST(BioChannelClosed, ZeroTimeIsIdentity) {
    Rng rng(9);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    const CloningBasis basis(random_unitary(3, rng), "random");
    for (std::size_t k = 1; k <= 4; ++k) {
        EXPECT_LT(max_abs_diff(bio_channel_closed(sigma, rho, basis, 0.0, k).mat(), sigma.mat()), 1e-14);
    }
}

TEST(BioChannelClosed, CommutingDiagonalIsConvexMix) {
    const DensityMatrix rho = DensityMatrix::from_matrix(diagonal({0.7, 0.2, 0.1}));
    const DensityMatrix sigma = DensityMatrix::from_matrix(diagonal({0.1, 0.3, 0.6}));
    const double dt = 0.15;
    for (std::size_t k = 2; k <= 5; ++k) {
        const double w = std::pow(std::cos(dt), 2.0 * static_cast<double>(k));
        const DensityMatrix out = bio_channel_closed(sigma, rho, rho_eigenbasis(rho), dt, k);
        EXPECT_LT(max_abs_diff(out.mat(), w * sigma.mat() + (1 - w) * rho.mat()), 1e-14);
    }
}

TEST(BioChannelBrute, SingleCopyIsTwoRegisterStep) {
    Rng rng(10);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    const CloningBasis basis(random_unitary(3, rng), "random");
    EXPECT_LT(max_abs_diff(bio_channel_brute(sigma, rho, basis, 0.3, 1).mat(), swap_reference(sigma, rho, 0.3)),
              1e-13);
}

TEST(BioChannelBrute, ZeroTimeIsIdentity) {
    Rng rng(11);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    const CloningBasis basis(random_unitary(2, rng), "random");
    EXPECT_LT(max_abs_diff(bio_channel_brute(sigma, rho, basis, 0.0, 3).mat(), sigma.mat()), 1e-14);
}

TEST(BioChannelBrute, MatchesClosedFormQubitThreeCopies) {
    Rng rng(12);
    for (int i = 0; i < 10; ++i) {
        const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
        const CloningBasis basis(random_unitary(2, rng), "random");
        EXPECT_LT(trace_norm(bio_channel_brute(sigma, rho, basis, 0.25, 3).mat() -
                             bio_channel_closed(sigma, rho, basis, 0.25, 3).mat()),
                  1e-10);
    }
}

TEST(BioChannelBrute, MatchesClosedFormAllSmallCases) {
    Rng rng(13);
    for (std::size_t d = 2; d <= 4; ++d) {
        for (std::size_t k = 1; k <= 4; ++k) {
            const DensityMatrix rho = random_hs_state(d, rng), sigma = random_hs_state(d, rng);
            const CloningBasis basis(random_unitary(d, rng), "random");
            EXPECT_LT(trace_norm(bio_channel_brute(sigma, rho, basis, 0.3, k).mat() -
                                 bio_channel_closed(sigma, rho, basis, 0.3, k).mat()),
                      1e-10)
                << "d=" << d << " k=" << k;
        }
    }
}

TEST(BioChannelBrute, SizeCapEnforced) {
    const DensityMatrix m = maximally_mixed(4);
    EXPECT_THROW(bio_channel_brute(m, m, CloningBasis::computational(4), 0.1, 6, 4096), SizeCapExceeded);
}

// With two clones the output still sees rho's off-diagonals (in the cloning
// basis), through a term 2 sin^2 cos^2 (rho_offdiag o sigma^T).
TEST(BioChannelClosed, TwoCopyOffDiagonalTerm) {
    Rng rng(14);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    const CloningBasis basis(random_unitary(3, rng), "random");
    const double dt = 0.4;
    const ComplexMatrix rho_b = basis.to_basis(rho.mat());
    const ComplexMatrix sigma_b = basis.to_basis(sigma.mat());
    BioCoefficients without = bio_coefficients(dt, 2);
    without.pair = 0.0;
    const ComplexMatrix paper_form = basis.from_basis(detail::bio_closed_in_basis(sigma_b, rho_b, without));
    const ComplexMatrix brute = bio_channel_brute(sigma, rho, basis, dt, 2).mat();
    const double s = std::sin(dt), c = std::cos(dt);
    const ComplexMatrix offdiag = rho_b - ComplexMatrix(rho_b.diagonal().asDiagonal());
    const ComplexMatrix term = basis.from_basis(2 * s * s * c * c * offdiag.cwiseProduct(sigma_b.transpose()));
    EXPECT_GT(frobenius_norm(term), 1e-3);
    EXPECT_LT(max_abs_diff(brute - paper_form, term), 1e-14);
}

TEST(BioChannelBrute, DependsOnlyOnDiagonalFromThreeCopies) {
    Rng rng(15);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    const CloningBasis basis(random_unitary(2, rng), "random");
    const DensityMatrix dephased =
        DensityMatrix::from_matrix(basis.from_basis(basis.to_basis(rho.mat()).diagonal().asDiagonal()));
    for (std::size_t k = 3; k <= 5; ++k) {
        EXPECT_LT(max_abs_diff(bio_channel_brute(sigma, rho, basis, 0.3, k).mat(),
                               bio_channel_brute(sigma, dephased, basis, 0.3, k).mat()),
                  1e-14);
    }
    EXPECT_GT(max_abs_diff(bio_channel_brute(sigma, rho, basis, 0.3, 2).mat(),
                           bio_channel_brute(sigma, dephased, basis, 0.3, 2).mat()),
              1e-4);
}

TEST(BioLimitStep, ZeroTimeIsIdentity) {
    Rng rng(16);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    EXPECT_LT(max_abs_diff(bio_limit_step(sigma, rho, 0.0).mat(), sigma.mat()), 1e-14);
}

TEST(BioLimitStep, CommutingDiagonalFixed) {
    const DensityMatrix rho = DensityMatrix::from_matrix(diagonal({0.7, 0.3}));
    const DensityMatrix sigma = DensityMatrix::from_matrix(diagonal({0.4, 0.6}));
    EXPECT_LT(max_abs_diff(bio_limit_step(sigma, rho, 0.5).mat(), sigma.mat()), 1e-15);
}

TEST(BioLimitStep, InverseKApproach) {
    Rng rng(17);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    const CloningBasis basis = rho_eigenbasis(rho);
    const double dt = 0.2;
    const ComplexMatrix limit = bio_limit_step(sigma, rho, dt).mat();
    std::vector<double> scaled;
    for (std::size_t k : {8, 16, 32, 64}) {
        const double gap =
            trace_norm(bio_channel_closed(sigma, rho, basis, dt / static_cast<double>(k), k).mat() - limit);
        scaled.push_back(gap * static_cast<double>(k));
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    EXPECT_GT(*lo, 0.0);
    EXPECT_LT(*hi / *lo - 1.0, 0.05);
}

TEST(BioProtocol, SingleCopyIsLmr) {
    Rng rng(18);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    const ProtocolParams p(0.4, 3, 1);
    EXPECT_EQ(bio_protocol(sigma, rho, p, rho_eigenbasis(rho)).mat(), lmr_n(sigma, rho, p).mat());
}

TEST(BioProtocol, ZeroTime) {
    Rng rng(19);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    EXPECT_LT(max_abs_diff(bio_protocol(sigma, rho, ProtocolParams(0.0, 2, 3), rho_eigenbasis(rho)).mat(),
                           sigma.mat()),
              1e-14);
}

TEST(BioProtocol, ClosedMatchesBrute) {
    Rng rng(20);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    const CloningBasis basis(random_unitary(2, rng), "random");
    const ProtocolParams p(0.5, 2, 2);
    EXPECT_LT(trace_norm(bio_protocol(sigma, rho, p, basis, ChannelPath::kClosed).mat() -
                         bio_protocol(sigma, rho, p, basis, ChannelPath::kBrute).mat()),
              1e-10);
}

TEST(BioProtocolLimit, SingleStep) {
    Rng rng(21);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    EXPECT_LT(max_abs_diff(bio_protocol_limit(sigma, rho, ProtocolParams(0.3, 1)).mat(),
                           bio_limit_step(sigma, rho, 0.3).mat()),
              1e-15);
}

TEST(BioProtocolLimit, CommutingDiagonalFixed) {
    const DensityMatrix rho = DensityMatrix::from_matrix(diagonal({0.7, 0.3}));
    const DensityMatrix sigma = DensityMatrix::from_matrix(diagonal({0.4, 0.6}));
    EXPECT_LT(max_abs_diff(bio_protocol_limit(sigma, rho, ProtocolParams(0.9, 4)).mat(), sigma.mat()), 1e-15);
}

TEST(BioProtocolLimit, LargeKAgrees) {
    Rng rng(22);
    const DensityMatrix rho = random_hs_state(4, rng), sigma = random_hs_state(4, rng);
    const ProtocolParams p(0.2, 4, 256);
    EXPECT_LT(trace_norm(bio_protocol(sigma, rho, p, rho_eigenbasis(rho)).mat() -
                         bio_protocol_limit(sigma, rho, p).mat()),
              1e-4);
}

TEST(ThetaExpectation, ZeroTime) {
    Rng rng(23);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    const ComplexMatrix theta = testing::random_hermitian(2, rng);
    EXPECT_NEAR(theta_expectation_under_cloning(sigma, rho, theta, 0.0, 3), (sigma.mat() * theta).trace().real(),
                1e-14);
}

TEST(ThetaExpectation, IdentityObservable) {
    Rng rng(24);
    const DensityMatrix rho = random_hs_state(3, rng), sigma = random_hs_state(3, rng);
    EXPECT_NEAR(theta_expectation_under_cloning(sigma, rho, identity(3), 0.3, 4), 1.0, 1e-14);
}

TEST(ThetaExpectation, DeviationShrinksAsOneOverK) {
    Rng rng(25);
    const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
    const ComplexMatrix theta = testing::random_hermitian(2, rng);
    const double big_dt = 0.2;
    const double base = (sigma.mat() * theta).trace().real();
    std::vector<double> cs;
    for (std::size_t k : {4, 8, 16}) {
        const double kd = static_cast<double>(k);
        const double v = theta_expectation_under_cloning(sigma, rho, theta, big_dt / kd, k);
        cs.push_back(std::abs(v - base) * kd / (big_dt * big_dt));
    }
    const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
    EXPECT_LT(*hi / *lo - 1.0, 0.02);
    EXPECT_NEAR(cs.back(), std::abs(((rho.mat() - sigma.mat()) * theta).trace().real()), 0.02 * cs.back());
}

}  // namespace
}  // namespace biolmr
