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

// Monte-Carlo driver for the two-stage RIS channel estimation pipeline.

#include "ris/harness.hpp"
#include "ris/validate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <thread>

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int workers = 0;
    bool paper_scale = false;
};

int run_validate()
{
    int failed = 0;
    for (const ris::CheckResult& c : ris::run_numerical_checks()) {
        std::printf("%-48s %s  (worst %.3g, tol %.3g)\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.value,
                    c.tolerance);
        failed += c.passed ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}

int run_sim(ris::ExperimentKind kind, const Options& opt)
{
    ris::ExperimentConfig cfg = opt.paper_scale ? ris::ExperimentConfig::paper_scale() : ris::ExperimentConfig::desk();
    if (!opt.config_path.empty()) {
        cfg = ris::load_config(opt.config_path, cfg);
    }
    if (opt.seed) {
        cfg.base_seed = *opt.seed;
    }
    if (opt.trials) {
        cfg.trials = *opt.trials;
    }
    const int workers =
        opt.workers > 0 ? opt.workers : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

    const auto t0 = std::chrono::steady_clock::now();
    const ris::ResultTable table = ris::run_experiment(cfg, kind, workers);
    ris::write_outputs(opt.out_dir, cfg, kind, table);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cerr << ris::experiment_name(kind) << ": " << table.records.size() << " trials in " << secs << " s";
    if (table.failed_trials > 0) {
        std::cerr << " (" << table.failed_trials << " failed)";
    }
    std::cerr << ", wrote " << opt.out_dir << "/" << ris::experiment_name(kind) << ".csv\n";
    return table.failed_trials == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RIS-assisted MIMO channel estimation experiments"};
    app.require_subcommand(1);
    Options opt;

    const std::vector<ris::ExperimentKind> kinds{ris::ExperimentKind::nmse_snr, ris::ExperimentKind::nmse_kappa,
                                                 ris::ExperimentKind::rate_snr, ris::ExperimentKind::rate_tr,
                                                 ris::ExperimentKind::rate_l};
    const char* descriptions[] = {"NMSE of H and G versus SNR for two AP spacings", "NMSE versus condition number of H",
                                  "achievable rate versus SNR", "achievable rate versus training length T_r",
                                  "achievable rate versus number of LIS elements"};
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        CLI::App* sub = app.add_subcommand(std::string(ris::experiment_name(kinds[i])), descriptions[i]);
        sub->add_option("--config", opt.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", opt.seed, "base seed");
        sub->add_option("--trials", opt.trials, "trials per sweep point")->check(CLI::PositiveNumber);
        sub->add_option("--workers", opt.workers, "worker threads (default: hardware concurrency)")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--paper-scale", opt.paper_scale, "use the full-size parameter profile");
        subs.push_back(sub);
    }
    CLI::App* validate = app.add_subcommand("validate", "run the numerical self-check suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            return run_validate();
        }
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) {
                return run_sim(kinds[i], opt);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
