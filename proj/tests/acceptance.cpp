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

// Release gate: prints one PASS/FAIL line per criterion.
//   acceptance                 run all
//   acceptance --criterion N   run one (exit status reflects it)

#include "biolmr/analysis.hpp"
#include "biolmr/campaigns.hpp"
#include "biolmr/cli.hpp"
#include "biolmr/verify.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

namespace {

using namespace biolmr;

constexpr std::uint64_t kSeed = 20240607;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

Outcome oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const double worst = oracle_equivalence_residual(kSeed, 50);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst <= 1e-10 && secs <= 120.0,
            fmt("max trace-norm residual %.3g (tol 1e-10) over 600 triples in %.1f s (limit 120 s)", worst, secs)};
}

Outcome q2_bound() {
    double worst = 1e300;
    std::size_t violations = 0;
    for (std::size_t q = 1; q <= 3; ++q) {
        const std::size_t d = std::size_t{1} << q;
        for (std::size_t i = 0; i < 10000; ++i) {
            Rng rng(derive_seed(kSeed, q, i));
            const double v = q2(random_hs_state(d, rng), random_hs_state(d, rng));
            worst = std::min(worst, v);
            if (v < 2.0 - 1e-9) ++violations;
        }
    }
    const StatePair p = single_qubit_min_case(0.3, 0.0);
    const AbcDecomposition abc = abc_decomposition(p.rho, p.sigma);
    const double dev = std::max(std::abs(q1(abc) - 2.0), std::abs(q2(abc) - 2.0));
    return {violations == 0 && dev <= 1e-9,
            fmt("min Q2 %.6f over 30000 samples, %zu violations; single-qubit case |Q-2| = %.3g", worst, violations,
                dev)};
}

Outcome mkr_grid() {
    double min_m = 1e300, arg_k = -1, arg_r = -1;
    for (int a = 0; a <= 200; ++a) {
        for (int b = 0; a + b <= 200; ++b) {
            const double v = mkr_coefficient(a * 0.005, b * 0.005);
            if (v < min_m) {
                min_m = v;
                arg_k = a * 0.005;
                arg_r = b * 0.005;
            }
        }
    }
    const bool at_half = std::abs(arg_k - 0.5) <= 0.005 && std::abs(arg_r - 0.5) <= 0.005;
    return {min_m >= -1e-12 && std::abs(min_m) <= 1e-12 && at_half,
            fmt("min M_kr %.3g at (p_k, p_r) = (%.3f, %.3f)", min_m, arg_k, arg_r)};
}

Outcome maximally_mixed_scaling() {
    bool ok = true;
    std::string detail;
    for (std::size_t q = 1; q <= 3; ++q) {
        const std::size_t d = std::size_t{1} << q;
        double min1 = 1e300, min2 = 1e300;
        for (std::size_t i = 0; i < 1000; ++i) {
            Rng rng(derive_seed(kSeed + 4, q, i));
            const AbcDecomposition abc = abc_decomposition(maximally_mixed(d), random_hs_state(d, rng));
            if (!(abc.b_trace_norm > kDegenerateNormTol)) continue;
            min1 = std::min(min1, q1(abc));
            min2 = std::min(min2, q2(abc));
        }
        const double need = static_cast<double>(d) - 1e-6;
        ok = ok && min1 >= need && min2 >= need;
        detail += fmt("%sq=%zu: min Q1 %.4f, min Q2 %.4f (need %zu)", q == 1 ? "" : "; ", q, min1, min2, d);
    }
    return {ok, detail};
}

Outcome figure_trend() {
    ExperimentConfig cfg;  // t = 0.2, n = 4, 10000 samples, q = 1..4
    const SweepQResult r = run_sweep_q(cfg);
    std::vector<double> ds, means;
    bool increasing = true;
    std::string detail = "mean Q1:";
    for (const auto& s : r.summary) {
        if (!means.empty() && s.mean_q1 <= means.back()) increasing = false;
        ds.push_back(static_cast<double>(s.d));
        means.push_back(s.mean_q1);
        detail += fmt(" q=%zu %.3f", s.q, s.mean_q1);
    }
    const double corr = pearson(ds, means);
    detail += fmt("; strictly increasing: %s; corr(mean Q1, d) = %.4f (need >= 0.99)", increasing ? "yes" : "no", corr);

    // Informational: the same trend without the q=1 heavy tail.
    std::vector<double> d2(ds.begin() + 1, ds.end()), m2(means.begin() + 1, means.end());
    bool inc2 = std::is_sorted(m2.begin(), m2.end(), std::less_equal<>());
    std::printf("[INFO] 5 q=2..4 only: strictly increasing: %s; corr = %.4f\n", inc2 ? "yes" : "no",
                pearson(d2, m2));
    return {increasing && corr >= 0.99, detail};
}

Outcome k_sweep_shape() {
    ExperimentConfig cfg;
    cfg.q_range = {4};
    const SweepKResult r = run_sweep_k(cfg);
    bool ok = true;
    std::string detail;
    for (const auto& c : r.cases) {
        const double a = std::abs(c.rows.front().eps_bio_n_to_nk - c.rows.front().eps_lmr_n);
        const bool b = c.monotone && c.fit.max_rel_residual <= 0.10;
        const bool cc = c.rows.back().eps_lmr_nk < c.rows.back().eps_bio_n_to_nk;
        ok = ok && a <= 1e-12 && b && cc;
        detail += fmt("%s%s (Q1 %.2f): (a) |diff| %.2g, (b) monotone %s, C %.4g fit on k>=%zu max rel resid %.3f, "
                      "(c) lmr_nk %.3g < bio %.3g",
                      detail.empty() ? "" : "; ", c.label.c_str(), c.q1, a, c.monotone ? "yes" : "no", c.fit.c,
                      c.fit.k_min, c.fit.max_rel_residual, c.rows.back().eps_lmr_nk, c.rows.back().eps_bio_n_to_nk);
    }
    return {ok, detail};
}

Outcome lmr_bound() {
    double worst = -1e300;
    for (double t : {0.1, 0.2, 0.5}) {
        for (std::size_t i = 0; i < 100; ++i) {
            Rng rng(derive_seed(kSeed + 7, static_cast<std::uint64_t>(t * 1000), i));
            const DensityMatrix rho = random_hs_state(2, rng), sigma = random_hs_state(2, rng);
            for (std::size_t n = 1; n <= 16; ++n) {
                worst = std::max(worst, eps_lmr_exact(rho, sigma, t, n) - 4.0 * t * t / static_cast<double>(n));
            }
        }
    }
    return {worst <= 1e-9, fmt("max eps - 4t^2/n = %.3g over 4800 cases", worst)};
}

Outcome asymptotic_coefficients() {
    const double t = 0.2;
    const std::size_t n = 128;
    double worst_a = 0.0, worst_b = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        Rng rng(derive_seed(kSeed + 8, 2, i));
        const DensityMatrix rho = random_hs_state(4, rng), sigma = random_hs_state(4, rng);
        const AbcDecomposition abc = abc_decomposition(rho, sigma);
        const double scale = static_cast<double>(n) / (t * t);
        const double ra = scale * eps_lmr_exact(rho, sigma, t, n) / (abc.a_trace_norm / 2.0);
        const double rb = scale * eps_bio_limit_exact(rho, sigma, t, n) / (abc.b_trace_norm / 2.0);
        worst_a = std::max(worst_a, std::abs(ra - 1.0));
        worst_b = std::max(worst_b, std::abs(rb - 1.0));
    }
    return {worst_a <= 0.05 && worst_b <= 0.05,
            fmt("max relative deviation: LMR %.2e, BIO limit %.2e (tol 5%%)", worst_a, worst_b)};
}

Outcome mixedlike_bound() {
    std::size_t failures = 0, rank_failures = 0, checked = 0;
    double min_margin = 1e300;
    for (std::size_t d : {8, 16, 32}) {
        for (int rank_one = 0; rank_one <= 1; ++rank_one) {
            for (std::size_t i = 0; i < 1000; ++i) {
                Rng rng(derive_seed(kSeed + 9, d * 2 + static_cast<std::size_t>(rank_one), i));
                const DensityMatrix rho = bounded_spectrum_state(d, rng);
                const DensityMatrix sigma = rank_one ? random_pure_state(d, rng).projector() : random_hs_state(d, rng);
                const MixedlikeBound b = q1_mixedlike_bound(rho, sigma);
                ++checked;
                if (!b.holds) ++failures;
                min_margin = std::min(min_margin, b.lhs - b.rhs);
                if (rank_one && trace_norm(rho.mat() - sigma.mat()) < rank_distance_floor(1, d) - 1e-12) {
                    ++rank_failures;
                }
            }
        }
    }
    return {failures == 0 && rank_failures == 0,
            fmt("%zu draws: %zu bound failures (min lhs-rhs %.3f), %zu rank-inequality failures", checked, failures,
                min_margin, rank_failures)};
}

Outcome phase_oracle() {
    const double slope = phase_scaling_slope(kSeed, 64, 50, 4, 10);
    const double rel = std::abs(slope / (-2.0 * std::numbers::ln2) - 1.0);
    double exact = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        Rng rng(derive_seed(kSeed + 10, 0, i));
        const std::size_t m = 4 + i % 7;
        const double levels = std::ldexp(1.0, static_cast<int>(m));
        std::vector<double> p(16);
        for (auto& v : p) v = std::floor(rng.uniform() * levels) / levels;
        const PureState psi = random_pure_state(16, rng);
        const PhaseOracleResult r = phase_oracle_exponentiation(p, 1.0, m, psi);
        exact = std::max({exact, std::abs(infidelity(r.state, exact_phase_evolution(p, 1.0, psi))),
                          r.ancilla_residual});
    }
    return {rel <= 0.10 && exact <= 1e-12,
            fmt("log-slope %.4f vs %.4f (rel err %.3f, tol 0.10); exact-code residual %.2g", slope,
                -2.0 * std::numbers::ln2, rel, exact)};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "bio_lmr_acceptance_determinism";
    fs::create_directories(dir);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::vector<std::vector<std::string>> runs{
        {"sweep-q", "--samples", "500"},
        {"sweep-q", "--samples", "50", "--format", "json"},
        {"sweep-k", "--q", "3", "--samples", "100"},
        {"cost-model"},
        {"verify"},
    };
    std::size_t identical = 0;
    std::string bad;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::string texts[2];
        for (int rep = 0; rep < 2; ++rep) {
            auto args = runs[i];
            const fs::path out = dir / fmt("run%zu.out", i);
            args.insert(args.end(), {"--out", out.string(), "--threads", rep == 0 ? "1" : "3"});
            std::ostringstream so, se;
            if (run_cli(args, so, se) != kExitOk) bad += " " + runs[i][0] + "(exit)";
            texts[rep] = slurp(out);
        }
        if (!texts[0].empty() && texts[0] == texts[1]) ++identical;
        else bad += " " + runs[i][0];
    }
    fs::remove_all(dir);
    return {identical == runs.size() && bad.empty(),
            fmt("%zu/%zu campaign configurations byte-identical across re-runs (1 vs 3 threads)%s", identical,
                runs.size(), bad.empty() ? "" : (" mismatch:" + bad).c_str())};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence},
        {2, "Q2 >= 2 bound", q2_bound},
        {3, "M_kr nonnegativity", mkr_grid},
        {4, "maximally mixed scaling", maximally_mixed_scaling},
        {5, "mean Q1 trend in q", figure_trend},
        {6, "k-sweep shape", k_sweep_shape},
        {7, "non-asymptotic LMR bound", lmr_bound},
        {8, "asymptotic coefficients", asymptotic_coefficients},
        {9, "mixed-like Q1 bound", mixedlike_bound},
        {10, "phase oracle scaling", phase_oracle},
        {11, "determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
