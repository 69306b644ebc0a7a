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

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

namespace ris {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) {
        throw std::invalid_argument("config: " + where + " must be an object");
    }
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            known = known || item.key() == a;
        }
        if (!known) {
            throw std::invalid_argument("config: unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out)
{
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

void read_optional(const json& obj, const char* key, std::optional<double>& out)
{
    if (obj.contains(key)) {
        out = obj.at(key).is_null() ? std::nullopt : std::optional<double>(obj.at(key).get<double>());
    }
}

void read_optional(const json& obj, const char* key, std::optional<int>& out)
{
    if (obj.contains(key)) {
        out = obj.at(key).is_null() ? std::nullopt : std::optional<int>(obj.at(key).get<int>());
    }
}

void read_channel(const json& obj, const std::string& where, GeometricChannelSpec& spec)
{
    check_keys(obj, where, {"num_paths", "angle_spread_deg", "target_condition", "target_rank"});
    read(obj, "num_paths", spec.num_paths);
    read(obj, "angle_spread_deg", spec.angle_spread_deg);
    read_optional(obj, "target_condition", spec.target_condition);
    read_optional(obj, "target_rank", spec.target_rank);
}

json channel_json(const GeometricChannelSpec& s)
{
    json j;
    j["num_paths"] = s.num_paths;
    j["angle_spread_deg"] = s.angle_spread_deg;
    j["target_condition"] = s.target_condition ? json(*s.target_condition) : json(nullptr);
    j["target_rank"] = s.target_rank ? json(*s.target_rank) : json(nullptr);
    return j;
}

void apply_json(const json& root, ExperimentConfig& c)
{
    check_keys(root, "",
               {"dims", "streams", "snr_grid_db", "kappa_grid", "T_r_grid", "L_grid", "ap_spacing_grid",
                "fixed_snr_db", "nmse_kappa", "rate_kappa", "rate_l_kappa", "T_d", "T_r", "sparsity",
                "pilot_power", "trials", "base_seed", "channels", "badvamp", "niht_max_iter", "tau_rel",
                "grid_points", "grid_passes"});
    if (root.contains("dims")) {
        const json& d = root.at("dims");
        check_keys(d, "dims", {"M", "N", "L"});
        read(d, "M", c.dims.M);
        read(d, "N", c.dims.N);
        read(d, "L", c.dims.L);
    }
    read(root, "streams", c.streams);
    read(root, "snr_grid_db", c.snr_grid_db);
    read(root, "kappa_grid", c.kappa_grid);
    read(root, "T_r_grid", c.T_r_grid);
    read(root, "L_grid", c.L_grid);
    read(root, "ap_spacing_grid", c.ap_spacing_grid);
    read(root, "fixed_snr_db", c.fixed_snr_db);
    read(root, "nmse_kappa", c.nmse_kappa);
    read(root, "rate_kappa", c.rate_kappa);
    read(root, "rate_l_kappa", c.rate_l_kappa);
    read(root, "T_d", c.T_d);
    read(root, "T_r", c.T_r);
    read(root, "sparsity", c.sparsity);
    read(root, "pilot_power", c.pilot_power);
    read(root, "trials", c.trials);
    read(root, "base_seed", c.base_seed);
    read(root, "niht_max_iter", c.niht_max_iter);
    read(root, "tau_rel", c.tau_rel);
    read(root, "grid_points", c.grid_points);
    read(root, "grid_passes", c.grid_passes);
    if (root.contains("channels")) {
        const json& ch = root.at("channels");
        check_keys(ch, "channels", {"Z", "H", "G", "ap_spacing", "user_spacing", "lis_spacing"});
        if (ch.contains("Z")) {
            read_channel(ch.at("Z"), "channels.Z", c.channels.Z);
        }
        if (ch.contains("H")) {
            read_channel(ch.at("H"), "channels.H", c.channels.H);
        }
        if (ch.contains("G")) {
            read_channel(ch.at("G"), "channels.G", c.channels.G);
        }
        read(ch, "ap_spacing", c.channels.ap_spacing);
        read(ch, "user_spacing", c.channels.user_spacing);
        read(ch, "lis_spacing", c.channels.lis_spacing);
    }
    if (root.contains("badvamp")) {
        const json& b = root.at("badvamp");
        check_keys(b, "badvamp",
                   {"max_iters", "inner_em_iters", "inner_lmmse_iters", "restarts", "init_r_var", "init_gamma",
                    "gamma_floor", "damping", "adapt_gamma1", "initial_snr", "anneal_hold", "anneal_growth", "whiten",
                    "subspace_margin", "restart_residual"});
        BadvampConfig& v = c.badvamp;
        read(b, "max_iters", v.max_iters);
        read(b, "inner_em_iters", v.inner_em_iters);
        read(b, "inner_lmmse_iters", v.inner_lmmse_iters);
        read(b, "restarts", v.restarts);
        read(b, "init_r_var", v.init_r_var);
        read(b, "init_gamma", v.init_gamma);
        read(b, "gamma_floor", v.gamma_floor);
        read(b, "damping", v.damping);
        read(b, "adapt_gamma1", v.adapt_gamma1);
        read(b, "initial_snr", v.initial_snr);
        read(b, "anneal_hold", v.anneal_hold);
        read(b, "anneal_growth", v.anneal_growth);
        read(b, "whiten", v.whiten);
        read(b, "subspace_margin", v.subspace_margin);
        read(b, "restart_residual", v.restart_residual);
    }
}

} // namespace

ExperimentConfig config_from_json_text(const std::string& text, const ExperimentConfig& base)
{
    ExperimentConfig c = base;
    try {
        apply_json(json::parse(text), c);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str(), base);
}

std::string config_to_json_text(const ExperimentConfig& c)
{
    json j;
    j["dims"] = {{"M", c.dims.M}, {"N", c.dims.N}, {"L", c.dims.L}};
    j["streams"] = c.streams;
    j["snr_grid_db"] = c.snr_grid_db;
    j["kappa_grid"] = c.kappa_grid;
    j["T_r_grid"] = c.T_r_grid;
    j["L_grid"] = c.L_grid;
    j["ap_spacing_grid"] = c.ap_spacing_grid;
    j["fixed_snr_db"] = c.fixed_snr_db;
    j["nmse_kappa"] = c.nmse_kappa;
    j["rate_kappa"] = c.rate_kappa;
    j["rate_l_kappa"] = c.rate_l_kappa;
    j["T_d"] = c.T_d;
    j["T_r"] = c.T_r;
    j["sparsity"] = c.sparsity;
    j["pilot_power"] = c.pilot_power;
    j["trials"] = c.trials;
    j["base_seed"] = c.base_seed;
    j["channels"] = {{"Z", channel_json(c.channels.Z)},
                     {"H", channel_json(c.channels.H)},
                     {"G", channel_json(c.channels.G)},
                     {"ap_spacing", c.channels.ap_spacing},
                     {"user_spacing", c.channels.user_spacing},
                     {"lis_spacing", c.channels.lis_spacing}};
    const BadvampConfig& b = c.badvamp;
    j["badvamp"] = {{"max_iters", b.max_iters},
                    {"inner_em_iters", b.inner_em_iters},
                    {"inner_lmmse_iters", b.inner_lmmse_iters},
                    {"restarts", b.restarts},
                    {"init_r_var", b.init_r_var},
                    {"init_gamma", b.init_gamma},
                    {"gamma_floor", b.gamma_floor},
                    {"damping", b.damping},
                    {"adapt_gamma1", b.adapt_gamma1},
                    {"initial_snr", b.initial_snr},
                    {"anneal_hold", b.anneal_hold},
                    {"anneal_growth", b.anneal_growth},
                    {"whiten", b.whiten},
                    {"subspace_margin", b.subspace_margin},
                    {"restart_residual", b.restart_residual}};
    j["niht_max_iter"] = c.niht_max_iter;
    j["tau_rel"] = c.tau_rel;
    j["grid_points"] = c.grid_points;
    j["grid_passes"] = c.grid_passes;
    return j.dump(2);
}

} // namespace ris
