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
#include <optional>
#include <string>
#include <vector>

#include "v2isim/config.hpp"
#include "v2isim/harness.hpp"

namespace v2isim::cli {

/// Exit codes shared by the command layer and the binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

/// Builds the dataset from the config and writes it: provenance header
/// comments, a "in_re,in_im,t_re,t_im,split" header line, then one row per
/// sample in trajectory order.
void cmd_dataset(const RunConfig& cfg, const std::string& out_path);

struct LoadedDataset {
    std::vector<mlp::TrainingSample> samples;
    std::vector<harness::Split> splits;
    harness::DatasetProvenance provenance;

    std::vector<mlp::TrainingSample> gather(harness::Split s) const;
};

LoadedDataset read_dataset_file(const std::string& path);

/// Trains on the dataset file, persists the best-validation model and writes
/// the per-epoch curve (mse_epoch.csv schema). Throws NumericalError when
/// training diverges.
void cmd_train(const RunConfig& cfg, const std::string& dataset_path, const std::string& model_path,
               const std::string& epochs_csv_path);

/// Runs the configured BER sweep and writes ber.csv into out_dir. When a
/// model path is given, also evaluates the model on the rebuilt dataset and
/// writes hist.csv, regression.csv and regression_stats.csv.
void cmd_sweep(const RunConfig& cfg, const std::optional<std::string>& model_path,
               const std::string& out_dir);

struct GradcheckReport {
    double max_relative_error = 0.0;
    int cases = 0;
    bool pass = false;
};

/// Compares analytic and finite-difference gradients over random
/// (network, sample) pairs. corrupt perturbs the analytic gradient and must
/// make the check fail (negative control).
GradcheckReport cmd_gradcheck(std::uint64_t seed, int cases, double h, bool corrupt);

inline constexpr double kGradcheckTolerance = 1e-6;

}  // namespace v2isim::cli
