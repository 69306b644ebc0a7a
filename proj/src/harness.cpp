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

#include "ris/harness.hpp"

#include "ris/ambiguity.hpp"
#include "ris/completion.hpp"
#include "ris/direct_estimation.hpp"
#include "ris/phase.hpp"
#include "ris/training.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#ifndef RIS_VERSION
#define RIS_VERSION "unknown"
#endif

namespace ris {

std::string_view experiment_name(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::nmse_snr: return "nmse-snr";
    case ExperimentKind::nmse_kappa: return "nmse-kappa";
    case ExperimentKind::rate_snr: return "rate-snr";
    case ExperimentKind::rate_tr: return "rate-tr";
    case ExperimentKind::rate_l: return "rate-l";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name)
{
    for (auto k : {ExperimentKind::nmse_snr, ExperimentKind::nmse_kappa, ExperimentKind::rate_snr,
                   ExperimentKind::rate_tr, ExperimentKind::rate_l}) {
        if (experiment_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

ExperimentConfig ExperimentConfig::desk()
{
    // In the noisy regime the restart test almost always fires and extra
    // runs buy well under 1 dB, so the desk profile runs BAdVAMP once.
    ExperimentConfig c;
    c.badvamp.restarts = 1;
    return c;
}

ExperimentConfig ExperimentConfig::paper_scale()
{
    ExperimentConfig c;
    c.dims = {64, 64, 64};
    c.T_d = 64;
    c.T_r = 500;
    c.kappa_grid = {40.0, 80.0, 120.0, 160.0, 200.0, 240.0};
    c.T_r_grid = {100, 200, 300, 400, 500, 600, 700, 800};
    c.L_grid = {64, 100, 144, 196, 256};
    return c;
}

void ExperimentConfig::validate(ExperimentKind kind) const
{
    if (dims.M < 1 || dims.N < 1 || dims.L < 1 || streams < 1 || streams > std::min(dims.M, dims.N)) {
        throw std::invalid_argument("config: invalid dimensions or stream count");
    }
    if (trials < 1) {
        throw std::invalid_argument("config: trials must be >= 1");
    }
    if (T_d < dims.N || T_r < dims.N) {
        throw std::invalid_argument("config: training lengths must be at least N");
    }
    if (!(sparsity > 0.0 && sparsity <= 1.0) || !(pilot_power > 0.0) || !(tau_rel > 0.0 && tau_rel < 1.0)) {
        throw std::invalid_argument("config: sparsity, pilot_power or tau_rel out of range");
    }
    if (niht_max_iter < 0 || grid_points < 1 || grid_passes < 1) {
        throw std::invalid_argument("config: invalid solver limits");
    }
    badvamp.validate();
    auto need = [](bool empty, const char* what) {
        if (empty) {
            throw std::invalid_argument(std::string("config: empty grid ") + what);
        }
    };
    switch (kind) {
    case ExperimentKind::nmse_snr:
        need(snr_grid_db.empty(), "snr_grid_db");
        need(ap_spacing_grid.empty(), "ap_spacing_grid");
        break;
    case ExperimentKind::nmse_kappa: need(kappa_grid.empty(), "kappa_grid"); break;
    case ExperimentKind::rate_snr: need(snr_grid_db.empty(), "snr_grid_db"); break;
    case ExperimentKind::rate_tr:
        need(T_r_grid.empty(), "T_r_grid");
        for (int t : T_r_grid) {
            if (t < dims.N) {
                throw std::invalid_argument("config: T_r_grid entries must be at least N");
            }
        }
        break;
    case ExperimentKind::rate_l:
        need(L_grid.empty(), "L_grid");
        for (int l : L_grid) {
            if (l < 1) {
                throw std::invalid_argument("config: L_grid entries must be positive");
            }
        }
        break;
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, ExperimentKind kind, int sweep_index, int trial_index)
{
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
    h = splitmix64(h ^ static_cast<std::uint64_t>(sweep_index));
    return splitmix64(h ^ static_cast<std::uint64_t>(trial_index));
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& c, ExperimentKind kind)
{
    c.validate(kind);
    std::vector<SweepPoint> pts;
    auto base = [&](std::string name, double value) {
        SweepPoint p;
        p.kind = kind;
        p.sweep_name = std::move(name);
        p.sweep_value = value;
        p.sweep_index = static_cast<int>(pts.size());
        p.dims = c.dims;
        p.snr_db = c.fixed_snr_db;
        p.ap_spacing = c.channels.ap_spacing;
        p.T_r = c.T_r;
        return p;
    };
    switch (kind) {
    case ExperimentKind::nmse_snr:
        for (double d : c.ap_spacing_grid) {
            for (double snr : c.snr_grid_db) {
                SweepPoint p = base("snr_db", snr);
                p.snr_db = snr;
                p.kappa = c.nmse_kappa;
                p.ap_spacing = d;
                char buf[32];
                std::snprintf(buf, sizeof buf, "d%g", d);
                p.series = buf;
                pts.push_back(p);
            }
        }
        break;
    case ExperimentKind::nmse_kappa:
        for (double k : c.kappa_grid) {
            SweepPoint p = base("kappa", k);
            p.kappa = k;
            pts.push_back(p);
        }
        break;
    case ExperimentKind::rate_snr:
        for (double snr : c.snr_grid_db) {
            SweepPoint p = base("snr_db", snr);
            p.snr_db = snr;
            p.kappa = c.rate_kappa;
            p.compute_rates = true;
            pts.push_back(p);
        }
        break;
    case ExperimentKind::rate_tr:
        for (int t : c.T_r_grid) {
            SweepPoint p = base("T_r", t);
            p.T_r = t;
            p.kappa = c.rate_kappa;
            p.compute_rates = true;
            pts.push_back(p);
        }
        break;
    case ExperimentKind::rate_l:
        for (int l : c.L_grid) {
            SweepPoint p = base("L", l);
            p.dims.L = l;
            p.kappa = c.rate_l_kappa;
            p.compute_rates = true;
            pts.push_back(p);
        }
        break;
    }
    return pts;
}

namespace {

double lis_rate(const CMat& G_dl, const CMat& H_dl, const CMat& Z_dl, const PhaseConfig& phi,
                const CMat& estimated_composite, int streams, double snr)
{
    const EigenmodeLink link = eigenmode(estimated_composite, streams);
    return achievable_rate(composite_channel(G_dl, phi, H_dl, Z_dl), link.W, link.V, snr);
}

} // namespace

TrialRecord run_trial(const ExperimentConfig& config, const SweepPoint& point, int trial_index)
{
    const auto t0 = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.kind = point.kind;
    rec.sweep_value = point.sweep_value;
    rec.trial_index = trial_index;
    rec.seed = trial_seed(config.base_seed, point.kind, point.sweep_index, trial_index);
    Rng rng(rec.seed);

    const int M = point.dims.M;
    const int N = point.dims.N;
    const int L = point.dims.L;
    const double noise_var = std::pow(10.0, -point.snr_db / 10.0);

    ChannelSetSpec spec = config.channels;
    spec.H.target_condition = point.kappa;
    spec.ap_spacing = point.ap_spacing;
    const ChannelTriple ch = gen_channel_set(rng, point.dims, spec);

    // Stage 1: direct channel with the LIS switched off.
    const TrainingMatrix X_a = dft_training(N, config.T_d, config.pilot_power * config.T_d);
    const Stage1Observation obs = simulate_stage1(rng, ch.direct_uplink(), X_a.X, noise_var);
    const CMat Z_up_hat = rmmse_estimate(obs.Y_a, X_a.X, noise_var);
    rec.nmse_Z_db = nmse_db(ch.direct_uplink(), Z_up_hat);

    // Stage 2: cascaded channel with a sparse ON/OFF schedule.
    const double error_var = stage2_error_variance(noise_var, M, config.pilot_power * config.T_d);
    const TrainingMatrix X_b = random_training(rng, N, point.T_r, config.pilot_power * point.T_r);
    const PhaseSchedule S = sparse_schedule(rng, L, point.T_r, config.sparsity);
    const CMat GX = ch.G * X_b.X;
    const CMat D_true = S.as_complex().cwiseProduct(GX);
    const CMat Y = simulate_stage2(rng, ch.H, ch.G, S.S, X_b.X, noise_var, error_var);

    // Per-column ON variance: empirical second moment of G X_b.
    std::vector<BgPrior> priors(static_cast<std::size_t>(point.T_r));
    for (int t = 0; t < point.T_r; ++t) {
        priors[static_cast<std::size_t>(t)] = {static_cast<double>(S.active_per_column) / L, {0.0, 0.0},
                                               std::max(GX.col(t).squaredNorm() / L, 1e-300)};
    }
    BadvampConfig bcfg = config.badvamp;
    bcfg.noise_var = noise_var + error_var;
    const BadvampResult est = badvamp(Y, L, priors, bcfg, rng);
    rec.diverged = est.diverged;

    const PermutationMap oracle = oracle_permutation(est.D_hat, D_true);
    rec.nmse_H_db = nmse_ambiguity_aware(ch.H, est.H_hat, oracle);

    const PermutationMap perm = recover_permutation(S.S, state_matrix(est.D_hat, config.tau_rel));
    rec.permutation_exact = perm.perm == oracle.perm;
    const PermutedChannels fixed = apply_permutation(est.H_hat, est.D_hat, perm);

    CompletionProblem prob;
    prob.D_check = fixed.D;
    prob.mask = S.S;
    prob.X_b = X_b.X;
    prob.rank = std::min({spec.G.target_rank.value_or(spec.G.num_paths), L, N});
    prob.max_iter = config.niht_max_iter;
    const CMat G_hat = niht(prob).G;
    rec.nmse_G_db =
        nmse_ambiguity_aware(ch.G.transpose(), G_hat.transpose(), oracle_permutation(fixed.D, D_true));

    if (point.compute_rates) {
        const double snr = std::pow(10.0, point.snr_db / 10.0);
        const int Ns = config.streams;
        const CMat G_dl = ch.G.transpose();
        const CMat H_dl = ch.H.transpose();
        const CMat& Z_dl = ch.Z;
        const CMat Gh_dl = G_hat.transpose();
        const CMat Hh_dl = fixed.H.transpose();
        const CMat Zh_dl = Z_up_hat.transpose();

        const PhaseConfig phi = optimal_phases(Gh_dl, Hh_dl, Zh_dl);
        rec.rate_proposed =
            lis_rate(G_dl, H_dl, Z_dl, phi, composite_channel(Gh_dl, phi, Hh_dl, Zh_dl), Ns, snr);

        PhaseConfig phi_true = optimal_phases(G_dl, H_dl, Z_dl);
        if (L <= kGridSearchMaxElements) {
            phi_true = grid_search_phases(G_dl, H_dl, Z_dl, config.grid_points, config.grid_passes, phi_true);
        }
        rec.rate_perfect =
            lis_rate(G_dl, H_dl, Z_dl, phi_true, composite_channel(G_dl, phi_true, H_dl, Z_dl), Ns, snr);

        const PhaseConfig phi_rand = PhaseConfig::random(L, rng);
        rec.rate_random =
            lis_rate(G_dl, H_dl, Z_dl, phi_rand, composite_channel(Gh_dl, phi_rand, Hh_dl, Zh_dl), Ns, snr);

        rec.rate_no_lis = lis_rate(G_dl, H_dl, Z_dl, PhaseConfig::off(L), Zh_dl, Ns, snr);
    }

    rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

namespace {

struct Accumulator {
    std::vector<double> values;

    void add(double v) { values.push_back(v); }

    std::pair<double, double> mean_stderr() const
    {
        const double n = static_cast<double>(values.size());
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        const double mean = sum / n;
        if (values.size() < 2) {
            return {mean, 0.0};
        }
        double ss = 0.0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        return {mean, std::sqrt(ss / (n - 1.0) / n)};
    }
};

ResultRow make_row(const ExperimentConfig& c, const SweepPoint& p, const std::string& scheme, const std::string& metric,
                   const Accumulator& acc, bool db_of_linear)
{
    ResultRow row;
    row.experiment = std::string(experiment_name(p.kind));
    row.sweep_name = p.sweep_name;
    row.sweep_value = p.sweep_value;
    row.scheme = scheme;
    row.metric = metric;
    row.trials = static_cast<int>(acc.values.size());
    row.seed = c.base_seed;
    if (acc.values.empty()) {
        row.mean = std::nan("");
        row.stderr_ = std::nan("");
        return row;
    }
    auto [mean, se] = acc.mean_stderr();
    if (db_of_linear) {
        // values hold linear NMSE; report dB with a first-order stderr.
        row.mean = 10.0 * std::log10(mean);
        row.stderr_ = mean > 0.0 ? 10.0 / std::log(10.0) * se / mean : 0.0;
    } else {
        row.mean = mean;
        row.stderr_ = se;
    }
    return row;
}

void aggregate_point(const ExperimentConfig& c, const SweepPoint& p, const std::vector<TrialRecord>& recs,
                     std::vector<ResultRow>& rows)
{
    Accumulator nH, nG, nZ, perm, runtime, rp, rperf, rrand, rno;
    for (const TrialRecord& r : recs) {
        if (!r.failure.empty()) {
            continue;
        }
        nH.add(std::pow(10.0, r.nmse_H_db / 10.0));
        nG.add(std::pow(10.0, r.nmse_G_db / 10.0));
        nZ.add(std::pow(10.0, r.nmse_Z_db / 10.0));
        perm.add(r.permutation_exact ? 1.0 : 0.0);
        runtime.add(r.runtime_ms);
        rp.add(r.rate_proposed);
        rperf.add(r.rate_perfect);
        rrand.add(r.rate_random);
        rno.add(r.rate_no_lis);
    }
    const std::string est = p.series.empty() ? "proposed" : "proposed_" + p.series;
    rows.push_back(make_row(c, p, est, "nmse_H_db", nH, true));
    rows.push_back(make_row(c, p, est, "nmse_G_db", nG, true));
    rows.push_back(make_row(c, p, est, "nmse_Z_db", nZ, true));
    rows.push_back(make_row(c, p, est, "permutation_exact", perm, false));
    if (p.compute_rates) {
        rows.push_back(make_row(c, p, "proposed", "rate_bps_hz", rp, false));
        rows.push_back(make_row(c, p, "perfect_csi", "rate_bps_hz", rperf, false));
        rows.push_back(make_row(c, p, "random", "rate_bps_hz", rrand, false));
        rows.push_back(make_row(c, p, "no_lis", "rate_bps_hz", rno, false));
    }
}

} // namespace

ResultTable run_experiment(const ExperimentConfig& config, ExperimentKind kind, int workers)
{
    const std::vector<SweepPoint> pts = sweep_points(config, kind);
    const std::size_t per_point = static_cast<std::size_t>(config.trials);
    const std::size_t total = pts.size() * per_point;

    ResultTable table;
    table.records.resize(total);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            const SweepPoint& p = pts[i / per_point];
            const int trial = static_cast<int>(i % per_point);
            try {
                table.records[i] = run_trial(config, p, trial);
            } catch (const std::exception& e) {
                TrialRecord r;
                r.kind = kind;
                r.sweep_value = p.sweep_value;
                r.trial_index = trial;
                r.seed = trial_seed(config.base_seed, kind, p.sweep_index, trial);
                r.failure = e.what();
                table.records[i] = r;
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(total)));
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    for (std::size_t k = 0; k < pts.size(); ++k) {
        std::vector<TrialRecord> recs(table.records.begin() + static_cast<std::ptrdiff_t>(k * per_point),
                                      table.records.begin() + static_cast<std::ptrdiff_t>((k + 1) * per_point));
        for (const TrialRecord& r : recs) {
            table.failed_trials += r.failure.empty() ? 0 : 1;
        }
        aggregate_point(config, pts[k], recs, table.rows);
    }
    return table;
}

std::string format_csv(const ResultTable& table)
{
    std::string out(kCsvHeader);
    out += '\n';
    char buf[512];
    for (const ResultRow& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%s,%s,%.10g,%.10g,%d,%llu\n", r.experiment.c_str(),
                      r.sweep_name.c_str(), r.sweep_value, r.scheme.c_str(), r.metric.c_str(), r.mean, r.stderr_,
                      r.trials, static_cast<unsigned long long>(r.seed));
        out += buf;
    }
    return out;
}

void write_outputs(const std::filesystem::path& out_dir, const ExperimentConfig& config, ExperimentKind kind,
                   const ResultTable& table)
{
    std::filesystem::create_directories(out_dir);
    const std::string name(experiment_name(kind));
    {
        std::ofstream csv(out_dir / (name + ".csv"), std::ios::binary);
        csv << format_csv(table);
        if (!csv) {
            throw std::runtime_error("cannot write " + (out_dir / (name + ".csv")).string());
        }
    }
    nlohmann::ordered_json meta;
    meta["experiment"] = name;
    meta["version"] = RIS_VERSION;
    meta["config"] = nlohmann::ordered_json::parse(config_to_json_text(config));
    meta["perfect_csi_phases"] = "closed form on true channels; coordinate grid refinement when L <= 16";
    meta["failed_trials"] = table.failed_trials;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const TrialRecord& r : table.records) {
        if (!r.failure.empty()) {
            failures.push_back({{"sweep_value", r.sweep_value}, {"trial", r.trial_index}, {"error", r.failure}});
        }
    }
    meta["failures"] = failures;
    int diverged = 0;
    for (const TrialRecord& r : table.records) {
        diverged += r.diverged ? 1 : 0;
    }
    meta["diverged_trials"] = diverged;
    std::ofstream js(out_dir / (name + ".json"), std::ios::binary);
    js << meta.dump(2) << '\n';
    if (!js) {
        throw std::runtime_error("cannot write " + (out_dir / (name + ".json")).string());
    }
}

} // namespace ris
