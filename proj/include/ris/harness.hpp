// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ris/badvamp.hpp"
#include "ris/channel_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ris {

enum class ExperimentKind { nmse_snr, nmse_kappa, rate_snr, rate_tr, rate_l };

std::string_view experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);

struct ExperimentConfig {
    ChannelDims dims{32, 32, 32};
    int streams = 2;

    std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<double> kappa_grid{40.0, 120.0, 240.0};
    std::vector<int> T_r_grid{100, 150, 200, 250, 300};
    std::vector<int> L_grid{16, 32, 64};
    std::vector<double> ap_spacing_grid{0.5, 4.0}; ///< swept by nmse-snr

    double fixed_snr_db = 10.0; ///< SNR for nmse-kappa, rate-tr and rate-l
    double nmse_kappa = 100.0;  ///< kappa(H) for nmse-snr
    double rate_kappa = 160.0;  ///< kappa(H) for rate-snr and rate-tr
    double rate_l_kappa = 100.0;

    int T_d = 32;
    int T_r = 250;
    double sparsity = 0.1;
    double pilot_power = 1.0;  ///< transmit energy per channel use

    int trials = 100;
    std::uint64_t base_seed = 1;

    ChannelSetSpec channels;
    BadvampConfig badvamp;
    int niht_max_iter = 500;
    double tau_rel = 0.1;
    int grid_points = 64; ///< perfect-CSI refinement for L <= 16
    int grid_passes = 2;

    void validate(ExperimentKind kind) const;

    static ExperimentConfig desk();
    static ExperimentConfig paper_scale();
};

/// One point of an experiment sweep, fully resolved.
struct SweepPoint {
    ExperimentKind kind = ExperimentKind::nmse_snr;
    std::string sweep_name;
    double sweep_value = 0.0;
    int sweep_index = 0;
    std::string series; ///< extra qualifier, e.g. "d=0.5"

    ChannelDims dims;
    double snr_db = 10.0;
    double kappa = 100.0;
    double ap_spacing = 0.5;
    int T_r = 250;
    bool compute_rates = false;
};

struct TrialRecord {
    ExperimentKind kind = ExperimentKind::nmse_snr;
    double sweep_value = 0.0;
    int trial_index = 0;
    std::uint64_t seed = 0;
    double nmse_H_db = 0.0;
    double nmse_G_db = 0.0;
    double nmse_Z_db = 0.0;
    bool permutation_exact = false;
    double rate_proposed = 0.0;
    double rate_perfect = 0.0;
    double rate_random = 0.0;
    double rate_no_lis = 0.0;
    double runtime_ms = 0.0;
    bool diverged = false;
    std::string failure; ///< non-empty when the trial threw
};

struct ResultRow {
    std::string experiment;
    std::string sweep_name;
    double sweep_value = 0.0;
    std::string scheme;
    std::string metric;
    double mean = 0.0;
    double stderr_ = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<TrialRecord> records;
    int failed_trials = 0;
};

inline constexpr std::string_view kCsvHeader = "experiment,sweep_name,sweep_value,scheme,metric,mean,stderr,trials,seed";

std::uint64_t trial_seed(std::uint64_t base_seed, ExperimentKind kind, int sweep_index, int trial_index);

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config, ExperimentKind kind);

TrialRecord run_trial(const ExperimentConfig& config, const SweepPoint& point, int trial_index);

/// Runs every sweep point with `workers` threads; output is independent of the worker count.
ResultTable run_experiment(const ExperimentConfig& config, ExperimentKind kind, int workers = 1);

std::string format_csv(const ResultTable& table);

/// Writes <out>/<experiment>.csv and <out>/<experiment>.json.
void write_outputs(const std::filesystem::path& out_dir, const ExperimentConfig& config, ExperimentKind kind,
                   const ResultTable& table);

// Configuration file (JSON). Unknown keys are rejected.
ExperimentConfig config_from_json_text(const std::string& text, const ExperimentConfig& base);
ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base);
std::string config_to_json_text(const ExperimentConfig& config);

} // namespace ris
