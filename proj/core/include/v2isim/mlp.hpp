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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace v2isim::mlp {

/// Fully connected 2 -> n_h -> 2 network with sigmoid hidden units, a linear
/// output layer and no bias terms anywhere. Weights are row-major:
/// w1[i * n_h + j] connects input i to hidden j, w2[j * n_o + k] connects
/// hidden j to output k.
struct MlpNetwork {
    int n_in = 2;
    int n_h = 0;
    int n_o = 2;
    std::vector<double> w1;
    std::vector<double> w2;

    double& weight1(int i, int j) { return w1[static_cast<std::size_t>(i) * n_h + j]; }
    double weight1(int i, int j) const { return w1[static_cast<std::size_t>(i) * n_h + j]; }
    double& weight2(int j, int k) { return w2[static_cast<std::size_t>(j) * n_o + k]; }
    double weight2(int j, int k) const { return w2[static_cast<std::size_t>(j) * n_o + k]; }
};

/// One supervised pair: (re, im) of the observed subcarrier and (re, im) of
/// the true channel response it should map to.
struct TrainingSample {
    std::array<double, 2> input{};
    std::array<double, 2> target{};
};

struct TrainConfig {
    double learning_rate = 0.05;  ///< eta in (0, 1)
    int epochs = 20;
    std::uint64_t seed = 1;
    double init_scale = 0.5;      ///< weights start uniform in [-init_scale, init_scale]
};

double sigmoid(double z);

/// Weights i.i.d. uniform in [-init_scale, +init_scale], deterministic per seed.
MlpNetwork init_network(int n_h, std::uint64_t seed, double init_scale);

struct Activations {
    std::array<double, 2> output{};
    std::vector<double> hidden;  ///< sigmoid outputs, kept for backprop reuse
};

Activations forward(const MlpNetwork& net, const std::array<double, 2>& input);

/// eps = 1/2 sum_k (t_k - o_k)^2.
double mse_cost(const std::array<double, 2>& output, const std::array<double, 2>& target);

/// d eps / d w for every weight, same layout as the network's weight vectors.
struct Gradients {
    std::vector<double> w1;
    std::vector<double> w2;
};

Gradients gradient(const MlpNetwork& net, const TrainingSample& sample);

/// One stochastic gradient step on eps:
///   w2[j,k] += eta (t_k - o_k) hidden_j
///   w1[i,j] += eta [sum_k w2[j,k](t_k - o_k)] hidden_j (1 - hidden_j) input_i
/// Throws NumericalError on a non-finite gradient.
void backward(MlpNetwork& net, const TrainingSample& sample, double learning_rate);

/// Central finite differences (eps(w+h) - eps(w-h)) / 2h for every weight,
/// via forward passes only; the independent oracle for backward().
Gradients numerical_gradient(const MlpNetwork& net, const TrainingSample& sample, double h);

/// Max over weights of |analytic - numerical| / max(|analytic| + |numerical|, floor).
/// corrupt_bias, when nonzero, is added to one analytic gradient entry; it
/// exists as a negative control for the gradient check.
double max_relative_gradient_error(const MlpNetwork& net, const TrainingSample& sample, double h,
                                   double corrupt_bias = 0.0);

struct EpochRecord {
    int epoch = 0;  ///< 1-based
    double train_mse = 0.0;
    double train_nmse = 0.0;
    double val_mse = 0.0;
    double val_nmse = 0.0;
    bool is_best = false;
};

struct TrainResult {
    MlpNetwork best;        ///< weights at the minimum-validation-MSE epoch
    MlpNetwork final_net;   ///< weights after the last completed epoch
    int best_epoch = 0;     ///< 1-based, 0 when no epochs ran
    bool diverged = false;  ///< true when training aborted on non-finite cost
    std::vector<EpochRecord> records;
};

/// Per-epoch SGD over the training samples in a seed-determined shuffled
/// order. Metrics are evaluated in the samples' own domain. On divergence the
/// last finite state is kept and diverged is set.
TrainResult train(const MlpNetwork& initial, std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> val_set, const TrainConfig& cfg);

/// Per-feature affine map x -> (x - mean) / stddev.
struct FeatureScaler {
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 2> stddev{1.0, 1.0};

    std::array<double, 2> apply(const std::array<double, 2>& x) const;
    std::array<double, 2> invert(const std::array<double, 2>& x) const;
};

FeatureScaler fit_scaler(std::span<const std::array<double, 2>> rows);

/// A trained network together with the feature standardization fitted on its
/// training split. predict() works in the raw (unstandardized) domain.
struct TrainedModel {
    MlpNetwork net;
    FeatureScaler input_scale;
    FeatureScaler target_scale;

    std::array<double, 2> predict(const std::array<double, 2>& raw_input) const;
};

/// Standardizes inputs and targets with training-split statistics, trains,
/// and keeps the best-validation weights. Epoch records report NMSE/MSE in
/// the raw domain so curves are comparable across configurations.
struct FitResult {
    TrainedModel model;
    int best_epoch = 0;
    bool diverged = false;
    std::vector<EpochRecord> records;
};

FitResult fit_model(std::span<const TrainingSample> train_set, std::span<const TrainingSample> val_set,
                    int n_h, const TrainConfig& cfg);

/// Plain-text persistence: header "mlpv1 n_in n_h n_o", then W1 rows, then W2
/// rows, one row per line, 17 significant digits. Two trailing lines carry
/// the fitted input/target standardization (identity when absent).
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace v2isim::mlp
