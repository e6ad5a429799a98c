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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2isim/channel.hpp"
#include "v2isim/harness.hpp"
#include "v2isim/mlp.hpp"
#include "v2isim/types.hpp"

namespace v2isim {

struct MlpSettings {
    int hidden_units = 10;
    double learning_rate = 0.001;
    int epochs = 20;
    double init_scale = 0.5;
    std::uint64_t seed = 1;  ///< master seed for the whole run

    mlp::TrainConfig train_config() const {
        return mlp::TrainConfig{learning_rate, epochs, seed, init_scale};
    }
};

struct ExperimentConfig {
    std::vector<double> snr_grid_db{0, 5, 10, 15, 20};
    double dataset_snr_db = 10.0;
    int frames = 200;
    long long bits_per_point = 1'000'000;
    std::vector<harness::Estimator> estimators{
        harness::Estimator::perfect, harness::Estimator::ls, harness::Estimator::mmse,
        harness::Estimator::mlp, harness::Estimator::outdated_ls};
    int predict_ahead = 0;
    int histogram_bins = 20;
};

/// Everything one run needs, mirroring the four config-file sections.
struct RunConfig {
    OfdmConfig ofdm;
    channel::ChannelModel channel;
    MlpSettings mlp;
    ExperimentConfig experiment;
};

RunConfig default_config();

/// Parses INI-style text: [section] headers, key = value lines, comments with
/// '#' or ';'. Unknown sections/keys and invariant violations raise
/// ConfigError naming the offending key.
RunConfig parse_config_text(const std::string& text);

RunConfig load_config(const std::string& path);

/// Re-validates every module-level invariant; names keys like "ofdm.cp_len".
void validate(const RunConfig& cfg);

}  // namespace v2isim
