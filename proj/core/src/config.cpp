/*
 * Copyright (c) 2026 v2isim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "v2isim/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "v2isim/errors.hpp"

namespace v2isim {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (!std::isfinite(v) || v != std::floor(v)) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    return static_cast<long long>(v);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        items.push_back(trim(item));
    }
    return items;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const std::string& item : split_list(value)) {
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw ConfigError(key + ": expected a non-empty list");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const std::string& item : split_list(value)) {
        out.push_back(static_cast<int>(parse_int(key, item)));
    }
    if (out.empty()) {
        throw ConfigError(key + ": expected a non-empty list");
    }
    return out;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto& ch = cfg.channel;
    if (key == "ofdm.num_subcarriers") {
        cfg.ofdm.num_subcarriers = static_cast<int>(parse_int(key, value));
    } else if (key == "ofdm.cp_len") {
        cfg.ofdm.cp_len = static_cast<int>(parse_int(key, value));
    } else if (key == "ofdm.bits_per_symbol") {
        cfg.ofdm.bits_per_symbol = static_cast<int>(parse_int(key, value));
    } else if (key == "channel.pathloss_constant") {
        ch.large_scale.pathloss_constant = parse_double(key, value);
    } else if (key == "channel.pathloss_exponent") {
        ch.large_scale.pathloss_exponent = parse_double(key, value);
    } else if (key == "channel.shadow_sigma_db") {
        ch.large_scale.shadow_sigma_db = parse_double(key, value);
    } else if (key == "channel.fast_fading_mean") {
        ch.large_scale.fast_fading_mean = parse_double(key, value);
    } else if (key == "channel.tap_delays") {
        ch.profile.tap_delays = parse_int_list(key, value);
    } else if (key == "channel.tap_powers") {
        ch.profile.tap_powers = parse_double_list(key, value);
    } else if (key == "channel.tap_doppler_hz") {
        ch.profile.tap_doppler_hz = parse_double_list(key, value);
    } else if (key == "channel.carrier_freq_hz") {
        ch.profile.carrier_freq_hz = parse_double(key, value);
    } else if (key == "channel.sample_period_s") {
        ch.profile.sample_period_s = parse_double(key, value);
    } else if (key == "channel.initial_distance_m") {
        ch.trajectory.initial_distance_m = parse_double(key, value);
    } else if (key == "channel.speed_mps") {
        ch.trajectory.speed_mps = parse_double(key, value);
    } else if (key == "channel.bs_offset_m") {
        ch.trajectory.bs_offset_m = parse_double(key, value);
    } else if (key == "channel.step_samples") {
        ch.trajectory.step_samples = parse_int(key, value);
    } else if (key == "mlp.hidden_units") {
        cfg.mlp.hidden_units = static_cast<int>(parse_int(key, value));
    } else if (key == "mlp.learning_rate") {
        cfg.mlp.learning_rate = parse_double(key, value);
    } else if (key == "mlp.epochs") {
        cfg.mlp.epochs = static_cast<int>(parse_int(key, value));
    } else if (key == "mlp.init_scale") {
        cfg.mlp.init_scale = parse_double(key, value);
    } else if (key == "mlp.seed") {
        const long long v = parse_int(key, value);
        if (v < 0) {
            throw ConfigError(key + ": seed must be >= 0");
        }
        cfg.mlp.seed = static_cast<std::uint64_t>(v);
    } else if (key == "experiment.snr_db") {
        cfg.experiment.snr_grid_db = parse_double_list(key, value);
    } else if (key == "experiment.dataset_snr_db") {
        cfg.experiment.dataset_snr_db = parse_double(key, value);
    } else if (key == "experiment.frames") {
        cfg.experiment.frames = static_cast<int>(parse_int(key, value));
    } else if (key == "experiment.bits_per_point") {
        cfg.experiment.bits_per_point = parse_int(key, value);
    } else if (key == "experiment.estimators") {
        cfg.experiment.estimators.clear();
        for (const std::string& item : split_list(value)) {
            const auto e = harness::parse_estimator(item);
            if (!e) {
                throw ConfigError(key + ": unknown estimator '" + item + "'");
            }
            cfg.experiment.estimators.push_back(*e);
        }
    } else if (key == "experiment.predict_ahead") {
        cfg.experiment.predict_ahead = static_cast<int>(parse_int(key, value));
    } else if (key == "experiment.histogram_bins") {
        cfg.experiment.histogram_bins = static_cast<int>(parse_int(key, value));
    } else {
        throw ConfigError("unknown key " + key);
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.channel.profile.tap_delays = {0, 2, 5};
    cfg.channel.profile.tap_powers = {0.6, 0.3, 0.1};
    cfg.channel.profile.tap_doppler_hz = {0.0, 0.0, 0.0};
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg = default_config();
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::set<std::string> seen;
    int line_no = 0;
    static const std::set<std::string> known_sections{"ofdm", "channel", "mlp", "experiment"};
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known_sections.count(section)) {
                throw ConfigError("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) {
            throw ConfigError("duplicate key " + key);
        }
        apply_key(cfg, key, value);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void validate(const RunConfig& cfg) {
    if (!is_power_of_two(cfg.ofdm.num_subcarriers)) {
        throw ConfigError("ofdm.num_subcarriers: must be a positive power of two");
    }
    if (cfg.ofdm.cp_len < 0 || cfg.ofdm.cp_len >= cfg.ofdm.num_subcarriers) {
        throw ConfigError("ofdm.cp_len: must satisfy 0 <= cp_len < num_subcarriers");
    }
    if (cfg.ofdm.bits_per_symbol != 2) {
        throw ConfigError("ofdm.bits_per_symbol: only 2 (4-QAM) is supported");
    }

    const auto& ls = cfg.channel.large_scale;
    if (ls.pathloss_exponent <= 0.0) {
        throw ConfigError("channel.pathloss_exponent: must be > 0");
    }
    if (ls.shadow_sigma_db < 0.0) {
        throw ConfigError("channel.shadow_sigma_db: must be >= 0");
    }
    if (ls.fast_fading_mean <= 0.0) {
        throw ConfigError("channel.fast_fading_mean: must be > 0");
    }

    const auto& prof = cfg.channel.profile;
    const std::size_t taps = prof.tap_delays.size();
    if (taps == 0) {
        throw ConfigError("channel.tap_delays: needs at least one tap");
    }
    if (prof.tap_powers.size() != taps) {
        throw ConfigError("channel.tap_powers: length must match channel.tap_delays");
    }
    if (prof.tap_doppler_hz.size() != taps) {
        throw ConfigError("channel.tap_doppler_hz: length must match channel.tap_delays");
    }
    if (prof.tap_delays.front() != 0) {
        throw ConfigError("channel.tap_delays: first delay must be 0");
    }
    double power_sum = 0.0;
    for (std::size_t l = 0; l < taps; ++l) {
        if (prof.tap_delays[l] < 0) {
            throw ConfigError("channel.tap_delays: delays must be non-negative");
        }
        if (l > 0 && prof.tap_delays[l] <= prof.tap_delays[l - 1]) {
            throw ConfigError("channel.tap_delays: delays must be strictly increasing");
        }
        if (prof.tap_powers[l] < 0.0) {
            throw ConfigError("channel.tap_powers: powers must be non-negative");
        }
        power_sum += prof.tap_powers[l];
    }
    if (std::abs(power_sum - 1.0) > 1e-12) {
        throw ConfigError("channel.tap_powers: must sum to 1");
    }
    if (prof.tap_delays.back() >= cfg.ofdm.cp_len && cfg.ofdm.cp_len > 0) {
        throw ConfigError("channel.tap_delays: max delay must be < ofdm.cp_len");
    }
    if (cfg.ofdm.cp_len == 0 && prof.tap_delays.back() > 0) {
        throw ConfigError("channel.tap_delays: multipath requires a cyclic prefix");
    }
    if (prof.carrier_freq_hz <= 0.0) {
        throw ConfigError("channel.carrier_freq_hz: must be > 0");
    }
    if (prof.sample_period_s <= 0.0) {
        throw ConfigError("channel.sample_period_s: must be > 0");
    }

    const auto& traj = cfg.channel.trajectory;
    if (traj.initial_distance_m <= 0.0) {
        throw ConfigError("channel.initial_distance_m: must be > 0");
    }
    if (traj.bs_offset_m < 0.0) {
        throw ConfigError("channel.bs_offset_m: must be >= 0");
    }
    if (traj.initial_distance_m < traj.bs_offset_m) {
        throw ConfigError("channel.initial_distance_m: must be >= channel.bs_offset_m");
    }
    if (traj.speed_mps < 0.0) {
        throw ConfigError("channel.speed_mps: must be >= 0");
    }
    if (traj.step_samples <= 0) {
        throw ConfigError("channel.step_samples: must be > 0");
    }

    if (cfg.mlp.hidden_units < 1) {
        throw ConfigError("mlp.hidden_units: must be >= 1");
    }
    if (cfg.mlp.learning_rate <= 0.0 || cfg.mlp.learning_rate >= 1.0) {
        throw ConfigError("mlp.learning_rate: must lie in (0, 1)");
    }
    if (cfg.mlp.epochs < 0) {
        throw ConfigError("mlp.epochs: must be >= 0");
    }
    if (cfg.mlp.init_scale < 0.0) {
        throw ConfigError("mlp.init_scale: must be >= 0");
    }

    const auto& exp = cfg.experiment;
    if (exp.snr_grid_db.empty()) {
        throw ConfigError("experiment.snr_db: must be a non-empty list");
    }
    if (exp.frames < 10) {
        throw ConfigError("experiment.frames: must be >= 10");
    }
    if (exp.bits_per_point < 2LL * cfg.ofdm.num_subcarriers) {
        throw ConfigError("experiment.bits_per_point: must cover at least one frame");
    }
    if (exp.estimators.empty()) {
        throw ConfigError("experiment.estimators: must be a non-empty list");
    }
    if (exp.predict_ahead != 0 && exp.predict_ahead != 1) {
        throw ConfigError("experiment.predict_ahead: must be 0 or 1");
    }
    if (exp.histogram_bins < 2) {
        throw ConfigError("experiment.histogram_bins: must be >= 2");
    }
}

}  // namespace v2isim
