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

// `bio-lmr <campaign> [options]`. Settings are layered: built-in defaults,
// then --config, then individual flags.

#include "biolmr/campaigns.hpp"
#include "biolmr/config.hpp"
#include "biolmr/verify.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace biolmr {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitVerify = 2, kExitIo = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        out.flush();
        if (!out) throw IoError("failed writing to standard output");
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << text;
    file.close();
    if (!file) throw IoError("failed writing '" + path + "'");
}

/// `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cloning-assisted density matrix exponentiation experiments", "bio-lmr"};
    std::string campaign;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<double> t;
    std::optional<std::size_t> n;
    std::string q_list, k_list, out_path, format;
    std::size_t threads = 1;
    bool inject_fault = false;

    app.add_option("campaign", campaign, "sweep-q | sweep-k | verify | cost-model")->required();
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--samples", samples, "samples per q");
    app.add_option("--t", t, "total evolution time");
    app.add_option("--n", n, "original copies");
    app.add_option("--q", q_list, "qubit counts, e.g. 1..4 or 2,3");
    app.add_option("--k-range", k_list, "clone counts, e.g. 1,2,4,8");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "csv | json");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--inject-fault", inject_fault, "verify: perturb a closed-form coefficient");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "bio-lmr: " << e.what() << "\n";
        return kExitConfig;
    }

    ExperimentConfig cfg;
    try {
        cfg.campaign = parse_campaign(campaign);
        if (!config_path.empty()) {
            load_config_file(cfg, config_path);
            cfg.campaign = parse_campaign(campaign);  // the positional argument wins
        }
        if (seed) cfg.master_seed = *seed;
        if (samples) cfg.samples = *samples;
        if (t) cfg.t = *t;
        if (n) cfg.n = *n;
        if (!q_list.empty()) cfg.q_range = parse_index_list(q_list, "--q");
        if (!k_list.empty()) cfg.k_range = parse_index_list(k_list, "--k-range");
        if (!out_path.empty()) cfg.output_path = out_path;
        if (!format.empty()) cfg.format = parse_format(format);
        validate(cfg);
    } catch (const ConfigError& e) {
        err << "bio-lmr: " << e.what() << "\n";
        return kExitConfig;
    }

    const RunOptions opts{threads};
    try {
        int code = kExitOk;
        CampaignOutput result;
        switch (cfg.campaign) {
            case Campaign::kSweepQ: result = to_output(run_sweep_q(cfg, opts)); break;
            case Campaign::kSweepK: result = to_output(run_sweep_k(cfg, opts)); break;
            case Campaign::kCostModel: result = to_output(run_cost_model(cfg)); break;
            case Campaign::kVerify: {
                const VerifyReport report = run_verify(cfg, VerifyOptions{inject_fault});
                if (!report.all_passed()) code = kExitVerify;
                result = to_output(report);
                break;
            }
        }
        write_text(cfg.output_path, render(cfg, result), out);
        return code;
    } catch (const IoError& e) {
        err << "bio-lmr: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "bio-lmr: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SizeCapExceeded& e) {
        err << "bio-lmr: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace biolmr
