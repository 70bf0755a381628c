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

// Experiment configuration: flat `key = value` text, `#` starts a comment.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace biolmr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Campaign { kSweepQ, kSweepK, kVerify, kCostModel };
enum class SigmaLaw { kHs, kPure };
enum class OutputFormat { kCsv, kJson };

inline std::string_view to_string(Campaign c) {
    switch (c) {
        case Campaign::kSweepQ: return "sweep-q";
        case Campaign::kSweepK: return "sweep-k";
        case Campaign::kVerify: return "verify";
        case Campaign::kCostModel: return "cost-model";
    }
    return "?";
}

inline std::string_view to_string(SigmaLaw s) { return s == SigmaLaw::kHs ? "hs" : "pure"; }
inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::kCsv ? "csv" : "json"; }

inline Campaign parse_campaign(std::string_view s) {
    if (s == "sweep-q") return Campaign::kSweepQ;
    if (s == "sweep-k") return Campaign::kSweepK;
    if (s == "verify") return Campaign::kVerify;
    if (s == "cost-model") return Campaign::kCostModel;
    throw ConfigError("unknown campaign '" + std::string(s) + "'");
}

inline SigmaLaw parse_sigma_law(std::string_view s) {
    if (s == "hs") return SigmaLaw::kHs;
    if (s == "pure") return SigmaLaw::kPure;
    throw ConfigError("sigma_law must be 'hs' or 'pure', got '" + std::string(s) + "'");
}

inline OutputFormat parse_format(std::string_view s) {
    if (s == "csv") return OutputFormat::kCsv;
    if (s == "json") return OutputFormat::kJson;
    throw ConfigError("format must be 'csv' or 'json', got '" + std::string(s) + "'");
}

struct ExperimentConfig {
    Campaign campaign = Campaign::kSweepQ;
    double t = 0.2;
    std::size_t n = 4;
    std::vector<std::size_t> q_range{1, 2, 3, 4};
    std::vector<std::size_t> k_range{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    std::size_t samples = 10000;
    std::uint64_t master_seed = 20240607;
    SigmaLaw sigma_law = SigmaLaw::kHs;
    std::size_t size_cap = std::size_t{1} << 12;
    std::string output_path;  // empty: stdout
    OutputFormat format = OutputFormat::kCsv;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view s, std::string_view key) {
    s = trim(s);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("invalid value '" + std::string(s) + "' for " + std::string(key));
    }
    return value;
}

}  // namespace detail

inline double parse_real(std::string_view s, std::string_view key) {
    const double v = detail::parse_number<double>(s, key);
    if (!std::isfinite(v)) throw ConfigError("non-finite value for " + std::string(key));
    return v;
}

/// "1..4", "1,2,8" or a mix such as "1..3,8".
inline std::vector<std::size_t> parse_index_list(std::string_view s, std::string_view key) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    s = detail::trim(s);
    if (s.empty()) throw ConfigError(std::string(key) + " must not be empty");
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto item = detail::trim(s.substr(start, comma == std::string_view::npos ? s.size() - start : comma - start));
        if (item.empty()) throw ConfigError("empty entry in " + std::string(key));
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(detail::parse_number<std::size_t>(item, key));
        } else {
            const auto lo = detail::parse_number<std::size_t>(item.substr(0, dots), key);
            const auto hi = detail::parse_number<std::size_t>(item.substr(dots + 2), key);
            if (hi < lo) throw ConfigError("descending range in " + std::string(key));
            for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string format_index_list(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

/// Applies one `key = value` assignment.
inline void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    value = detail::trim(value);
    if (key == "campaign") cfg.campaign = parse_campaign(value);
    else if (key == "t") cfg.t = parse_real(value, key);
    else if (key == "n") cfg.n = detail::parse_number<std::size_t>(value, key);
    else if (key == "q_range") cfg.q_range = parse_index_list(value, key);
    else if (key == "k_range") cfg.k_range = parse_index_list(value, key);
    else if (key == "samples") cfg.samples = detail::parse_number<std::size_t>(value, key);
    else if (key == "master_seed") cfg.master_seed = detail::parse_number<std::uint64_t>(value, key);
    else if (key == "sigma_law") cfg.sigma_law = parse_sigma_law(value);
    else if (key == "size_cap") cfg.size_cap = detail::parse_number<std::size_t>(value, key);
    else if (key == "output_path") cfg.output_path = std::string(value);
    else if (key == "format") cfg.format = parse_format(value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.n == 0) throw ConfigError("n must be at least 1");
    if (cfg.samples == 0) throw ConfigError("samples must be at least 1");
    if (cfg.q_range.empty()) throw ConfigError("q_range must not be empty");
    for (auto q : cfg.q_range) {
        if (q < 1 || q > 6) throw ConfigError("q values must lie in 1..6");
    }
    if (cfg.k_range.empty()) throw ConfigError("k_range must not be empty");
    for (auto k : cfg.k_range) {
        if (k < 1) throw ConfigError("k values must be positive");
    }
    if (cfg.size_cap < 2) throw ConfigError("size_cap must be at least 2");
}

inline void parse_config_text(ExperimentConfig& cfg, std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
            }
            try {
                set_config_value(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
            } catch (const ConfigError& e) {
                throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    parse_config_text(cfg, buf.str());
}

}  // namespace biolmr
