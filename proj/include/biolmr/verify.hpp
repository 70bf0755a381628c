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

// Property suite behind `bio-lmr verify`. Each check reports the worst
// residual it saw against a fixed tolerance.

#include "biolmr/analysis.hpp"
#include "biolmr/campaigns.hpp"
#include "biolmr/channels.hpp"
#include "biolmr/cloning.hpp"
#include "biolmr/config.hpp"
#include "biolmr/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace biolmr {

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

struct VerifyOptions {
    // Scales the closed form's `cross` weight by (1 + 1e-3) inside the oracle
    // equivalence check, which must then fail.
    bool inject_fault = false;
};

/// Closed-form step with optionally perturbed weights; k = 1 is left alone.
inline DensityMatrix verify_closed_step(const DensityMatrix& sigma, const DensityMatrix& rho, const CloningBasis& basis,
                                        double delta_t, std::size_t k, bool fault) {
    if (k == 1 || !fault) return bio_channel_closed(sigma, rho, basis, delta_t, k);
    BioCoefficients w = bio_coefficients(delta_t, k);
    w.cross *= 1.0 + 1e-3;
    const ComplexMatrix out =
        detail::bio_closed_in_basis(basis.to_basis(sigma.mat()), basis.to_basis(rho.mat()), w);
    return DensityMatrix::from_matrix(basis.from_basis(out), 1.0);
}

/// Worst trace-norm gap between closed form and tensor simulation over
/// (d, k) in {2,3,4} x {1,2,3,4}, `triples` random (rho, sigma, basis) each.
inline double oracle_equivalence_residual(std::uint64_t seed, std::size_t triples, bool fault = false) {
    double worst = 0.0;
    for (std::size_t d = 2; d <= 4; ++d) {
        for (std::size_t k = 1; k <= 4; ++k) {
            for (std::size_t i = 0; i < triples; ++i) {
                Rng rng(derive_seed(seed, d * 16 + k, i));
                const DensityMatrix rho = random_hs_state(d, rng);
                const DensityMatrix sigma = random_hs_state(d, rng);
                const CloningBasis basis(random_unitary(d, rng), "random");
                const double dt = rng.uniform(0.05, 0.5);
                const DensityMatrix closed = verify_closed_step(sigma, rho, basis, dt, k, fault);
                const DensityMatrix brute = bio_channel_brute(sigma, rho, basis, dt, k);
                worst = std::max(worst, trace_norm(closed.mat() - brute.mat()));
            }
        }
    }
    return worst;
}

/// Least-squares slope of log(mean infidelity) against m for random p and
/// t = 1. Truncating p to m bits should give slope -2 log 2.
inline double phase_scaling_slope(std::uint64_t seed, std::size_t d, std::size_t instances, std::size_t m_lo,
                                  std::size_t m_hi) {
    std::vector<double> xs, ys;
    for (std::size_t m = m_lo; m <= m_hi; ++m) {
        double sum = 0.0;
        for (std::size_t i = 0; i < instances; ++i) {
            Rng rng(derive_seed(seed, 1000 + d, i));
            std::vector<double> p(d);
            for (auto& v : p) v = rng.uniform();
            const PureState psi = random_pure_state(d, rng);
            const PhaseOracleResult r = phase_oracle_exponentiation(p, 1.0, m, psi);
            sum += infidelity(r.state, exact_phase_evolution(p, 1.0, psi));
        }
        xs.push_back(static_cast<double>(m));
        ys.push_back(std::log(sum / static_cast<double>(instances)));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline VerifyReport run_verify(const ExperimentConfig& cfg, const VerifyOptions& opts = {}) {
    const std::uint64_t seed = cfg.master_seed;
    VerifyReport report;
    auto add = [&](std::string name, double residual, double tol) {
        report.checks.push_back({std::move(name), residual, tol, residual <= tol});
    };

    add("oracle_equivalence", oracle_equivalence_residual(seed, 10, opts.inject_fault), 1e-10);

    {
        double worst = 0.0;
        for (std::size_t q = 1; q <= 2; ++q) {
            for (std::size_t k = 2; k <= 3; ++k) {
                Rng rng(derive_seed(seed, 100 + q, k));
                const std::size_t d = std::size_t{1} << q;
                const DensityMatrix rho = random_hs_state(d, rng);
                const CloningBasis basis(random_unitary(d, rng), "random");
                ComplexMatrix zero = ComplexMatrix::Zero(d, d);
                zero(0, 0) = 1.0;
                ComplexMatrix input = rho.mat();
                for (std::size_t r = 1; r < k; ++r) input = kron(input, zero);
                const ComplexMatrix u = oracle_circuit(q, k, basis);
                const ComplexMatrix out = u * input * u.adjoint();
                worst = std::max(worst, trace_norm(out - biomimetic_copies(rho, basis, k)));
            }
        }
        add("oracle_circuit_copies", worst, 1e-10);
    }

    {
        // Raw step outputs, so the defects are measured rather than rejected.
        double worst = 0.0;
        for (std::size_t d = 2; d <= 4; ++d) {
            for (std::size_t k = 1; k <= 5; ++k) {
                for (std::size_t i = 0; i < 10; ++i) {
                    Rng rng(derive_seed(seed, 200 + d * 16 + k, i));
                    const DensityMatrix rho = random_hs_state(d, rng);
                    const DensityMatrix sigma = random_pure_state(d, rng).projector();
                    const CloningBasis basis(random_unitary(d, rng), "random");
                    const double dt = rng.uniform(0.0, 1.5);
                    const ComplexMatrix out =
                        k == 1 ? detail::lmr_step_raw(sigma.mat(), rho.mat(), dt)
                               : basis.from_basis(detail::bio_closed_in_basis(
                                     basis.to_basis(sigma.mat()), basis.to_basis(rho.mat()), bio_coefficients(dt, k)));
                    const double herm = hermiticity_defect(out);
                    const double tr = std::abs(out.trace() - Complex{1.0, 0.0});
                    const double neg = std::max(0.0, -eig_herm(out).values(0));
                    worst = std::max({worst, herm, tr, neg});
                }
            }
        }
        add("channel_cptp", worst, 1e-9);
    }

    {
        double worst = 0.0;
        for (std::size_t n = 1; n <= 12; ++n) {
            Rng rng(derive_seed(seed, 300, n));
            const DensityMatrix rho = random_hs_state(4, rng);
            const DensityMatrix sigma = random_hs_state(4, rng);
            const ProtocolParams p(0.3, n);
            worst = std::max(worst, trace_norm(lmr_n(sigma, rho, p).mat() - lmr_n_closed(sigma, rho, p).mat()));
        }
        add("lmr_closed_vs_iterated", worst, 1e-10);
    }

    {
        double worst_split = 0.0;
        double worst_q2 = 0.0;
        for (std::size_t q = 1; q <= 3; ++q) {
            for (std::size_t i = 0; i < 500; ++i) {
                Rng rng(derive_seed(seed, 400 + q, i));
                const std::size_t d = std::size_t{1} << q;
                const DensityMatrix rho = random_hs_state(d, rng);
                const DensityMatrix sigma = random_hs_state(d, rng);
                const AbcDecomposition abc = abc_decomposition(rho, sigma);
                worst_split = std::max(worst_split, trace_norm(abc.a_mat - abc.b_mat - abc.c_mat));
                if (abc.b_frobenius > kDegenerateNormTol) worst_q2 = std::max(worst_q2, 2.0 - q2(abc));
            }
        }
        add("abc_split", worst_split, 1e-12);
        add("q2_lower_bound", std::max(0.0, worst_q2), 1e-9);
    }

    {
        double min_m = mkr_coefficient(0.0, 0.0);
        for (int a = 0; a <= 200; ++a) {
            for (int b = 0; a + b <= 200; ++b) min_m = std::min(min_m, mkr_coefficient(a * 0.005, b * 0.005));
        }
        add("mkr_nonnegative", std::max(0.0, -min_m), 1e-12);
    }

    {
        const StatePair pair = single_qubit_min_case(0.3, 0.0);
        const AbcDecomposition abc = abc_decomposition(pair.rho, pair.sigma);
        add("single_qubit_minimum", std::max(std::abs(q1(abc) - 2.0), std::abs(q2(abc) - 2.0)), 1e-9);
    }

    {
        double worst = 0.0;
        for (std::size_t q = 1; q <= 3; ++q) {
            const std::size_t d = std::size_t{1} << q;
            for (std::size_t i = 0; i < 200; ++i) {
                Rng rng(derive_seed(seed, 500 + q, i));
                const AbcDecomposition abc = abc_decomposition(maximally_mixed(d), random_hs_state(d, rng));
                if (abc.b_frobenius > kDegenerateNormTol) {
                    worst = std::max(worst, static_cast<double>(d) - q2(abc));
                }
            }
        }
        add("maximally_mixed_q2", std::max(0.0, worst), 1e-6);
    }

    {
        double worst = 0.0;
        for (double t : {0.1, 0.2, 0.5}) {
            for (std::size_t n = 1; n <= 16; ++n) {
                for (std::size_t i = 0; i < 10; ++i) {
                    Rng rng(derive_seed(seed, 600 + n, i));
                    const DensityMatrix rho = random_hs_state(2, rng);
                    const DensityMatrix sigma = random_pure_state(2, rng).projector();
                    worst = std::max(worst, eps_lmr_exact(rho, sigma, t, n) - 4.0 * t * t / static_cast<double>(n));
                }
            }
        }
        add("lmr_nonasymptotic_bound", std::max(0.0, worst), 1e-9);
    }

    {
        double worst = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            Rng rng(derive_seed(seed, 700, i));
            const std::size_t m = 6;
            std::vector<double> p(8);
            for (auto& v : p) v = std::floor(rng.uniform() * 64.0) / 64.0;
            const PureState psi = random_pure_state(8, rng);
            const PhaseOracleResult r = phase_oracle_exponentiation(p, 1.3, m, psi);
            worst = std::max({worst, std::abs(infidelity(r.state, exact_phase_evolution(p, 1.3, psi))),
                              r.ancilla_residual});
        }
        add("phase_oracle_exact_codes", worst, 1e-12);
    }

    {
        const double slope = phase_scaling_slope(seed, 16, 50, 4, 10);
        add("phase_oracle_scaling", std::abs(slope / (-2.0 * std::numbers::ln2) - 1.0), 0.10);
    }
    return report;
}

inline CampaignOutput to_output(const VerifyReport& r) {
    CampaignOutput out;
    out.rows.columns = {"check", "max_residual", "tolerance", "passed"};
    std::uint64_t failed = 0;
    for (const auto& c : r.checks) {
        out.rows.rows.push_back({c.name, c.max_residual, c.tolerance, c.passed});
        if (!c.passed) ++failed;
    }
    out.summary.columns = {"checks", "failed", "all_passed"};
    out.summary.rows.push_back({std::uint64_t{r.checks.size()}, failed, r.all_passed()});
    return out;
}

}  // namespace biolmr
