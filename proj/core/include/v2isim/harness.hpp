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

#include "v2isim/channel.hpp"
#include "v2isim/estimators.hpp"
#include "v2isim/mlp.hpp"
#include "v2isim/types.hpp"

namespace v2isim::harness {

enum class Split : std::uint8_t { train, validation, test };
const char* split_name(Split s);
Split parse_split(const std::string& name);

struct DatasetProvenance {
    std::uint64_t seed = 0;
    double snr_db = 0.0;
    int n_frames = 0;
    int predict_ahead = 0;
};

/// Per-subcarrier (observation, truth) pairs harvested from one trajectory,
/// with a seed-shuffled 70/15/15 split.
struct Dataset {
    std::vector<mlp::TrainingSample> samples;
    std::vector<Split> sample_split;            ///< parallel to samples
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
    std::vector<std::size_t> test_indices;
    std::vector<ComplexVector> step_cfrs;       ///< effective truth per trajectory step
    DatasetProvenance provenance;

    std::vector<mlp::TrainingSample> gather(Split s) const;
};

/// Transmits one pilot frame per trajectory step at the given SNR and forms
/// per-subcarrier samples: input = the raw LS observation Y(k)/X(k), target =
/// the true effective H(k) at the same step (predict_ahead = 0) or the next
/// step (predict_ahead = 1).
Dataset build_dataset(const channel::ChannelModel& model, const OfdmConfig& cfg, double snr_db,
                      int n_frames, int predict_ahead, std::uint64_t seed);

/// sum ||est - truth||^2 / sum ||truth||^2 over the paired sequences.
double nmse(const std::vector<ComplexVector>& estimates, const std::vector<ComplexVector>& truths);

struct BerCount {
    long long error_bits = 0;
    long long total_bits = 0;
    double rate() const { return total_bits == 0 ? 0.0 : double(error_bits) / double(total_bits); }
};

BerCount ber(const std::vector<std::uint8_t>& tx_bits, const std::vector<std::uint8_t>& rx_bits);

enum class Estimator { perfect, ls, mmse, mlp, outdated_ls };
std::string estimator_name(Estimator e);
std::optional<Estimator> parse_estimator(const std::string& name);

struct SweepSpec {
    std::vector<double> snr_grid_db;
    long long bits_per_point = 1'000'000;
    std::vector<Estimator> estimators;
    int predict_ahead = 0;       ///< 1 = the MLP predicts the next step's channel
    std::uint64_t seed = 1;
    long long start_step = 0;    ///< trajectory step at which the sweep begins
};

struct SweepRow {
    double snr_db = 0.0;
    Estimator estimator = Estimator::ls;
    std::string metric;       ///< "ber" or "nmse"
    double value = 0.0;
    long long trial_count = 0;
    long long error_count = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    const SweepRow* find(double snr_db, Estimator e, const std::string& metric) const;
};

/// Monte Carlo BER/NMSE sweep along the model's trajectory. Each step sends a
/// pilot frame and a data frame through the same channel state with fresh
/// noise; all estimators see identical received frames. `model` is required
/// when the estimator list contains mlp, `covariance` when it contains mmse.
/// MLP and outdated-LS consume the previous step's pilot when predict_ahead
/// is 1 (outdated-LS always does), so their first step is skipped.
SweepResult ber_sweep(const channel::ChannelModel& model, const OfdmConfig& cfg, const SweepSpec& spec,
                      const mlp::TrainedModel* trained, const est::ChannelCovariance* covariance);

struct EpochRow {
    int epoch = 0;
    double snr_db = 0.0;
    Split split = Split::train;
    double nmse = 0.0;
    bool is_best = false;
};

/// Reshapes training records into one row per (epoch, split), flagging the
/// validation-minimum epoch.
std::vector<EpochRow> mse_vs_epoch(const std::vector<mlp::EpochRecord>& records, double snr_db);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    long long count = 0;
    Split split = Split::train;
};

/// Histogram of errors (target - output) with bin_count uniform bins spanning
/// the pooled [min, max]; per-split counts over shared edges. A degenerate
/// range collapses to a single bin.
std::vector<HistogramBin> error_histogram(const std::vector<double>& outputs,
                                          const std::vector<double>& targets,
                                          const std::vector<Split>& splits, int bin_count);

struct RegressionStats {
    double slope = 0.0;
    double intercept = 0.0;
    double r = 0.0;
};

/// Ordinary least-squares fit of outputs against targets plus Pearson R.
RegressionStats regression_stats(const std::vector<double>& outputs, const std::vector<double>& targets);

}  // namespace v2isim::harness
