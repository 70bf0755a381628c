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

// Seeded Monte Carlo campaigns and their CSV / JSON serialization.
//
// Every sample owns an Rng seeded with derive_seed(master_seed, q, index), so
// a row can be re-run alone and results do not depend on thread scheduling.
// Rows are always emitted in sample order.

#include "biolmr/analysis.hpp"
#include "biolmr/channels.hpp"
#include "biolmr/cloning.hpp"
#include "biolmr/config.hpp"
#include "biolmr/states.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace biolmr {

struct RunOptions {
    std::size_t threads = 1;
};

/// Runs fn(i) for i in [0, count); any exception is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = std::min(threads, count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < count && !failed; i = next++) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    failed = true;
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------------------
// Tabular output

using Cell = std::variant<std::uint64_t, double, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct CampaignOutput {
    Table rows;
    Table summary;
};

/// 17 significant digits: round-trips every double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

inline std::string format_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_double(v);
            else if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return std::to_string(v);
        },
        c);
}

inline void append_csv_table(std::string& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i > 0) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
}

/// Data rows, then a `# summary` line followed by the summary table.
inline std::string render_csv(const CampaignOutput& out) {
    std::string text;
    append_csv_table(text, out.rows);
    text += "# summary\n";
    append_csv_table(text, out.summary);
    return text;
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["campaign"] = std::string(to_string(cfg.campaign));
    j["t"] = cfg.t;
    j["n"] = cfg.n;
    j["q_range"] = cfg.q_range;
    j["k_range"] = cfg.k_range;
    j["samples"] = cfg.samples;
    j["master_seed"] = cfg.master_seed;
    j["sigma_law"] = std::string(to_string(cfg.sigma_law));
    j["size_cap"] = cfg.size_cap;
    j["output_path"] = cfg.output_path;
    j["format"] = std::string(to_string(cfg.format));
    return j;
}

inline nlohmann::ordered_json table_to_json(const Table& table) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(v)) obj[table.columns[i]] = v;
                        else obj[table.columns[i]] = nullptr;
                    } else {
                        obj[table.columns[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

/// {"config": {...}, "rows": [...], "summary": {"rows": [...]}}; non-finite
/// numbers become null.
inline std::string render_json(const ExperimentConfig& cfg, const CampaignOutput& out) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(cfg);
    j["rows"] = table_to_json(out.rows);
    j["summary"]["rows"] = table_to_json(out.summary);
    return j.dump(2) + "\n";
}

inline std::string render(const ExperimentConfig& cfg, const CampaignOutput& out) {
    return cfg.format == OutputFormat::kCsv ? render_csv(out) : render_json(cfg, out);
}

// ---------------------------------------------------------------------------
// Sampling

inline StatePair draw_pair(std::size_t d, std::uint64_t seed, SigmaLaw law) {
    Rng rng(seed);
    DensityMatrix rho = random_hs_state(d, rng);
    DensityMatrix sigma = law == SigmaLaw::kHs ? random_hs_state(d, rng) : random_pure_state(d, rng).projector();
    return {std::move(rho), std::move(sigma)};
}

inline constexpr std::array<const char*, 12> kSampleRecordColumns = {
    "q", "d", "sample_index", "seed", "t", "n", "q1", "q2",
    "eps_lmr_n", "eps_bio_limit", "trace_dist_rho_sigma", "status"};

struct SampleRecord {
    std::size_t q = 0;
    std::size_t d = 0;
    std::size_t sample_index = 0;
    std::uint64_t seed = 0;
    double t = 0.0;
    std::size_t n = 0;
    double q1 = std::numeric_limits<double>::quiet_NaN();
    double q2 = std::numeric_limits<double>::quiet_NaN();
    double eps_lmr_n = 0.0;
    double eps_bio_limit = 0.0;
    double trace_dist_rho_sigma = 0.0;
    std::string status = "ok";  // "ok" or "degenerate" (||B|| vanished, q1/q2 undefined)
};

inline SampleRecord evaluate_sample(std::size_t q, std::size_t index, const ExperimentConfig& cfg) {
    SampleRecord rec;
    rec.q = q;
    rec.d = std::size_t{1} << q;
    rec.sample_index = index;
    rec.seed = derive_seed(cfg.master_seed, q, index);
    rec.t = cfg.t;
    rec.n = cfg.n;
    const StatePair pair = draw_pair(rec.d, rec.seed, cfg.sigma_law);
    const AbcDecomposition abc = abc_decomposition(pair.rho, pair.sigma);
    if (abc.b_trace_norm > kDegenerateNormTol && abc.b_frobenius > kDegenerateNormTol) {
        rec.q1 = q1(abc);
        rec.q2 = q2(abc);
    } else {
        rec.status = "degenerate";
    }
    rec.eps_lmr_n = eps_lmr_exact(pair.rho, pair.sigma, cfg.t, cfg.n);
    rec.eps_bio_limit = eps_bio_limit_exact(pair.rho, pair.sigma, cfg.t, cfg.n);
    rec.trace_dist_rho_sigma = trace_norm(pair.rho.mat() - pair.sigma.mat());
    return rec;
}

struct QSummary {
    std::size_t q = 0;
    std::size_t d = 0;
    std::size_t samples = 0;
    std::size_t valid = 0;
    double mean_q1 = std::numeric_limits<double>::quiet_NaN();
    double min_q1 = std::numeric_limits<double>::quiet_NaN();
    double max_q1 = std::numeric_limits<double>::quiet_NaN();
    double mean_q2 = std::numeric_limits<double>::quiet_NaN();
    double min_q2 = std::numeric_limits<double>::quiet_NaN();
    double max_q2 = std::numeric_limits<double>::quiet_NaN();
};

/// Statistics over the non-degenerate rows, accumulated in row order.
inline QSummary summarize_q(std::size_t q, const std::vector<SampleRecord>& rows) {
    QSummary s;
    s.q = q;
    s.d = std::size_t{1} << q;
    double sum1 = 0.0, sum2 = 0.0;
    for (const auto& r : rows) {
        if (r.q != q) continue;
        ++s.samples;
        if (r.status != "ok") continue;
        if (s.valid == 0) {
            s.min_q1 = s.max_q1 = r.q1;
            s.min_q2 = s.max_q2 = r.q2;
        }
        ++s.valid;
        sum1 += r.q1;
        sum2 += r.q2;
        s.min_q1 = std::min(s.min_q1, r.q1);
        s.max_q1 = std::max(s.max_q1, r.q1);
        s.min_q2 = std::min(s.min_q2, r.q2);
        s.max_q2 = std::max(s.max_q2, r.q2);
    }
    if (s.valid > 0) {
        s.mean_q1 = sum1 / static_cast<double>(s.valid);
        s.mean_q2 = sum2 / static_cast<double>(s.valid);
    }
    return s;
}

struct SweepQResult {
    std::vector<SampleRecord> rows;
    std::vector<QSummary> summary;
};

inline SweepQResult run_sweep_q(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
    validate(cfg);
    SweepQResult out;
    out.rows.resize(cfg.q_range.size() * cfg.samples);
    parallel_for(out.rows.size(), opts.threads, [&](std::size_t flat) {
        const std::size_t q = cfg.q_range[flat / cfg.samples];
        out.rows[flat] = evaluate_sample(q, flat % cfg.samples, cfg);
    });
    for (auto q : cfg.q_range) out.summary.push_back(summarize_q(q, out.rows));
    return out;
}

inline CampaignOutput to_output(const SweepQResult& r) {
    CampaignOutput out;
    out.rows.columns.assign(kSampleRecordColumns.begin(), kSampleRecordColumns.end());
    for (const auto& s : r.rows) {
        out.rows.rows.push_back({std::uint64_t{s.q}, std::uint64_t{s.d}, std::uint64_t{s.sample_index}, s.seed, s.t,
                                 std::uint64_t{s.n}, s.q1, s.q2, s.eps_lmr_n, s.eps_bio_limit, s.trace_dist_rho_sigma,
                                 s.status});
    }
    out.summary.columns = {"q", "d", "samples", "valid", "mean_q1", "min_q1", "max_q1", "mean_q2", "min_q2", "max_q2"};
    for (const auto& s : r.summary) {
        out.summary.rows.push_back({std::uint64_t{s.q}, std::uint64_t{s.d}, std::uint64_t{s.samples},
                                    std::uint64_t{s.valid}, s.mean_q1, s.min_q1, s.max_q1, s.mean_q2, s.min_q2,
                                    s.max_q2});
    }
    return out;
}

// ---------------------------------------------------------------------------
// k sweep

struct InverseKFit {
    double c = std::numeric_limits<double>::quiet_NaN();
    std::size_t k_min = 0;
    double max_rel_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Fits gap(k) ~ C / k on the points with k >= k_min (log-space least
/// squares, so log C is the mean of log(k gap)) and reports the largest
/// relative deviation |k gap / C - 1| on those points.
inline InverseKFit fit_inverse_k(const std::vector<std::size_t>& ks, const std::vector<double>& gaps,
                                 std::size_t k_min) {
    InverseKFit fit;
    fit.k_min = k_min;
    double sum_log = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < k_min || !(gaps[i] > 0.0)) continue;
        sum_log += std::log(static_cast<double>(ks[i]) * gaps[i]);
        ++count;
    }
    if (count == 0) return fit;
    fit.c = std::exp(sum_log / static_cast<double>(count));
    fit.max_rel_residual = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < k_min || !(gaps[i] > 0.0)) continue;
        fit.max_rel_residual =
            std::max(fit.max_rel_residual, std::abs(static_cast<double>(ks[i]) * gaps[i] / fit.c - 1.0));
    }
    return fit;
}

struct SweepKRow {
    std::size_t k = 0;
    double eps_lmr_n = 0.0;        // n original copies, no cloning
    double eps_bio_1_to_nk = 0.0;  // 1 original copy expanded into n*k clones
    double eps_bio_n_to_nk = 0.0;  // n originals, k clones each
    double eps_lmr_nk = 0.0;       // n*k original copies
};

struct SweepKCase {
    std::string label;  // "min-q1" or "max-q1"
    std::size_t q = 0;
    std::size_t sample_index = 0;
    std::uint64_t seed = 0;
    double q1 = 0.0;
    double eps_bio_limit = 0.0;
    std::vector<SweepKRow> rows;
    bool monotone = false;  // eps_bio_n_to_nk non-increasing in k
    InverseKFit fit;        // |eps_bio_n_to_nk - eps_bio_limit| ~ C / k on the upper tail
};

struct SweepKResult {
    std::vector<SweepKCase> cases;
};

/// Tail window used for the C/k fit: the top 1/16 of the k range.
inline std::size_t inverse_k_fit_floor(const std::vector<std::size_t>& ks) {
    const std::size_t k_max = *std::max_element(ks.begin(), ks.end());
    return std::max<std::size_t>(1, k_max / 16);
}

inline SweepKCase evaluate_k_sweep(std::string label, std::size_t q, std::size_t index, const ExperimentConfig& cfg,
                                   double q1_value) {
    SweepKCase c;
    c.label = std::move(label);
    c.q = q;
    c.sample_index = index;
    c.seed = derive_seed(cfg.master_seed, q, index);
    c.q1 = q1_value;
    const StatePair pair = draw_pair(std::size_t{1} << q, c.seed, cfg.sigma_law);
    const DensityMatrix& rho = pair.rho;
    const DensityMatrix& sigma = pair.sigma;
    const DensityMatrix target = exact_target(sigma, rho, cfg.t);
    const CloningBasis basis = rho_eigenbasis(rho);
    auto err = [&](const DensityMatrix& out) { return trace_norm(out.mat() - target.mat()); };

    c.eps_bio_limit = err(bio_protocol_limit(sigma, rho, ProtocolParams(cfg.t, cfg.n)));
    const double eps_lmr_n = err(lmr_n(sigma, rho, ProtocolParams(cfg.t, cfg.n)));

    std::vector<std::size_t> ks = cfg.k_range;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    std::vector<double> gaps;
    for (auto k : ks) {
        SweepKRow row;
        row.k = k;
        row.eps_lmr_n = eps_lmr_n;
        row.eps_bio_1_to_nk = err(bio_protocol(sigma, rho, ProtocolParams(cfg.t, 1, cfg.n * k), basis));
        row.eps_bio_n_to_nk = err(bio_protocol(sigma, rho, ProtocolParams(cfg.t, cfg.n, k), basis));
        row.eps_lmr_nk = err(lmr_n(sigma, rho, ProtocolParams(cfg.t, cfg.n * k)));
        gaps.push_back(std::abs(row.eps_bio_n_to_nk - c.eps_bio_limit));
        c.rows.push_back(row);
    }
    c.monotone = true;
    for (std::size_t i = 1; i < c.rows.size(); ++i) {
        if (c.rows[i].eps_bio_n_to_nk > c.rows[i - 1].eps_bio_n_to_nk) c.monotone = false;
    }
    c.fit = fit_inverse_k(ks, gaps, inverse_k_fit_floor(ks));
    return c;
}

/// Pre-scans `samples` pairs at the first q in q_range and sweeps k for the
/// samples with the smallest and largest Q1.
inline SweepKResult run_sweep_k(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
    validate(cfg);
    const std::size_t q = cfg.q_range.front();
    std::vector<double> scan(cfg.samples, std::numeric_limits<double>::quiet_NaN());
    parallel_for(cfg.samples, opts.threads, [&](std::size_t i) {
        const StatePair pair = draw_pair(std::size_t{1} << q, derive_seed(cfg.master_seed, q, i), cfg.sigma_law);
        const AbcDecomposition abc = abc_decomposition(pair.rho, pair.sigma);
        if (abc.b_trace_norm > kDegenerateNormTol) scan[i] = q1(abc);
    });
    std::size_t lo = cfg.samples, hi = cfg.samples;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        if (std::isnan(scan[i])) continue;
        if (lo == cfg.samples || scan[i] < scan[lo]) lo = i;
        if (hi == cfg.samples || scan[i] > scan[hi]) hi = i;
    }
    if (lo == cfg.samples) throw std::runtime_error("run_sweep_k: every pre-scan sample was degenerate");

    SweepKResult out;
    out.cases.resize(2);
    const std::array<std::size_t, 2> picks{lo, hi};
    parallel_for(2, opts.threads, [&](std::size_t i) {
        out.cases[i] = evaluate_k_sweep(i == 0 ? "min-q1" : "max-q1", q, picks[i], cfg, scan[picks[i]]);
    });
    return out;
}

inline CampaignOutput to_output(const SweepKResult& r) {
    CampaignOutput out;
    out.rows.columns = {"case", "q", "sample_index", "seed", "k", "eps_lmr_n", "eps_bio_1_to_nk", "eps_bio_n_to_nk",
                        "eps_lmr_nk", "eps_bio_limit"};
    out.summary.columns = {"case", "q", "sample_index", "seed", "q1", "eps_bio_limit", "monotone", "fit_c",
                           "fit_k_min", "fit_max_rel_residual"};
    for (const auto& c : r.cases) {
        for (const auto& row : c.rows) {
            out.rows.rows.push_back({c.label, std::uint64_t{c.q}, std::uint64_t{c.sample_index}, c.seed,
                                     std::uint64_t{row.k}, row.eps_lmr_n, row.eps_bio_1_to_nk, row.eps_bio_n_to_nk,
                                     row.eps_lmr_nk, c.eps_bio_limit});
        }
        out.summary.rows.push_back({c.label, std::uint64_t{c.q}, std::uint64_t{c.sample_index}, c.seed, c.q1,
                                    c.eps_bio_limit, c.monotone, c.fit.c, std::uint64_t{c.fit.k_min},
                                    c.fit.max_rel_residual});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cost model

/// Clone-to-source cost ratios scanned by the cost-model campaign: 10^-3 .. 10^1
/// in thirds of a decade.
inline std::vector<double> cost_ratio_grid() {
    std::vector<double> grid;
    for (int e = -9; e <= 3; ++e) grid.push_back(std::pow(10.0, static_cast<double>(e) / 3.0));
    return grid;
}

struct CostModelRow {
    std::size_t k = 0;
    double threshold = 0.0;
    double asymptote = 0.0;
    double copies_lower_bound = 0.0;
    double cost_ratio = 0.0;  // c_clone / c_source
    bool favorable = false;
};

struct CostModelResult {
    std::size_t q = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    AbcDecomposition abc;
    double q1 = 0.0;
    std::vector<CostModelRow> rows;
};

/// Threshold surface over k (k >= 2 from k_range) and the cost-ratio grid for
/// sample 0 at the first q in q_range.
inline CostModelResult run_cost_model(const ExperimentConfig& cfg) {
    validate(cfg);
    CostModelResult out;
    out.q = cfg.q_range.front();
    out.n = cfg.n;
    out.seed = derive_seed(cfg.master_seed, out.q, 0);
    const StatePair pair = draw_pair(std::size_t{1} << out.q, out.seed, cfg.sigma_law);
    out.abc = abc_decomposition(pair.rho, pair.sigma);
    out.q1 = q1(out.abc);

    std::vector<std::size_t> ks = cfg.k_range;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (auto k : ks) {
        if (k < 2) continue;
        const CostThreshold th = cost_threshold(cfg.n, k, out.abc);
        const double l = copies_lower_bound(cfg.n, k, out.abc);
        for (double ratio : cost_ratio_grid()) {
            out.rows.push_back({k, th.threshold, th.asymptote, l, ratio,
                                cloning_favorable(CostModelInputs{cfg.n, k, 1.0, ratio}, out.abc)});
        }
    }
    return out;
}

inline CampaignOutput to_output(const CostModelResult& r) {
    CampaignOutput out;
    out.rows.columns = {"k", "n", "threshold", "asymptote", "copies_lower_bound", "cost_ratio", "favorable"};
    for (const auto& row : r.rows) {
        out.rows.rows.push_back({std::uint64_t{row.k}, std::uint64_t{r.n}, row.threshold, row.asymptote,
                                 row.copies_lower_bound, row.cost_ratio, row.favorable});
    }
    out.summary.columns = {"q", "seed", "n", "q1", "a_trace_norm", "b_trace_norm", "c_trace_norm", "copies_limit"};
    out.summary.rows.push_back({std::uint64_t{r.q}, r.seed, std::uint64_t{r.n}, r.q1, r.abc.a_trace_norm,
                                r.abc.b_trace_norm, r.abc.c_trace_norm,
                                static_cast<double>(r.n) * (r.q1 - 1.0)});
    return out;
}

}  // namespace biolmr
