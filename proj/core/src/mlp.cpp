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

#include "v2isim/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "v2isim/csv.hpp"
#include "v2isim/errors.hpp"
#include "v2isim/rng.hpp"

namespace v2isim::mlp {

namespace {

constexpr std::uint64_t kSaltEpochOrder = 0x45504f4348ULL;

bool finite(const MlpNetwork& net) {
    auto ok = [](double w) { return std::isfinite(w); };
    return std::all_of(net.w1.begin(), net.w1.end(), ok) && std::all_of(net.w2.begin(), net.w2.end(), ok);
}

struct SplitMetrics {
    double mse = 0.0;
    double nmse = 0.0;
};

SplitMetrics evaluate(const MlpNetwork& net, std::span<const TrainingSample> samples) {
    SplitMetrics m;
    if (samples.empty()) {
        return m;
    }
    double cost_sum = 0.0;
    double err_sq = 0.0;
    double target_sq = 0.0;
    for (const TrainingSample& s : samples) {
        const Activations act = forward(net, s.input);
        cost_sum += mse_cost(act.output, s.target);
        for (int k = 0; k < 2; ++k) {
            const double e = s.target[k] - act.output[k];
            err_sq += e * e;
            target_sq += s.target[k] * s.target[k];
        }
    }
    m.mse = cost_sum / static_cast<double>(samples.size());
    m.nmse = target_sq > 0.0 ? err_sq / target_sq : 0.0;
    return m;
}

}  // namespace

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

MlpNetwork init_network(int n_h, std::uint64_t seed, double init_scale) {
    if (n_h < 1) {
        throw InvalidInputError("hidden layer needs at least one unit, got " + std::to_string(n_h));
    }
    if (init_scale < 0.0) {
        throw InvalidInputError("init_scale must be >= 0");
    }
    MlpNetwork net;
    net.n_h = n_h;
    net.w1.resize(static_cast<std::size_t>(net.n_in) * n_h);
    net.w2.resize(static_cast<std::size_t>(n_h) * net.n_o);
    Rng rng(seed);
    for (double& w : net.w1) {
        w = rng.uniform(-init_scale, init_scale);
    }
    for (double& w : net.w2) {
        w = rng.uniform(-init_scale, init_scale);
    }
    return net;
}

Activations forward(const MlpNetwork& net, const std::array<double, 2>& input) {
    Activations act;
    act.hidden.resize(static_cast<std::size_t>(net.n_h));
    for (int j = 0; j < net.n_h; ++j) {
        double in_j = 0.0;
        for (int i = 0; i < net.n_in; ++i) {
            in_j += input[static_cast<std::size_t>(i)] * net.weight1(i, j);
        }
        act.hidden[static_cast<std::size_t>(j)] = sigmoid(in_j);
    }
    for (int k = 0; k < net.n_o; ++k) {
        double out_k = 0.0;
        for (int j = 0; j < net.n_h; ++j) {
            out_k += act.hidden[static_cast<std::size_t>(j)] * net.weight2(j, k);
        }
        act.output[static_cast<std::size_t>(k)] = out_k;  // linear output layer
    }
    return act;
}

double mse_cost(const std::array<double, 2>& output, const std::array<double, 2>& target) {
    double acc = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double d = target[k] - output[k];
        acc += d * d;
    }
    return 0.5 * acc;
}

Gradients gradient(const MlpNetwork& net, const TrainingSample& sample) {
    const Activations act = forward(net, sample.input);
    Gradients g;
    g.w1.resize(net.w1.size());
    g.w2.resize(net.w2.size());
    std::array<double, 2> err{};  // t_k - o_k
    for (int k = 0; k < net.n_o; ++k) {
        err[static_cast<std::size_t>(k)] = sample.target[static_cast<std::size_t>(k)] -
                                           act.output[static_cast<std::size_t>(k)];
    }
    for (int j = 0; j < net.n_h; ++j) {
        const double h_j = act.hidden[static_cast<std::size_t>(j)];
        for (int k = 0; k < net.n_o; ++k) {
            g.w2[static_cast<std::size_t>(j) * net.n_o + k] = -err[static_cast<std::size_t>(k)] * h_j;
        }
        double back = 0.0;  // sum_k w2[j,k] (t_k - o_k)
        for (int k = 0; k < net.n_o; ++k) {
            back += net.weight2(j, k) * err[static_cast<std::size_t>(k)];
        }
        const double sig_deriv = h_j * (1.0 - h_j);
        for (int i = 0; i < net.n_in; ++i) {
            g.w1[static_cast<std::size_t>(i) * net.n_h + j] =
                -back * sig_deriv * sample.input[static_cast<std::size_t>(i)];
        }
    }
    return g;
}

void backward(MlpNetwork& net, const TrainingSample& sample, double learning_rate) {
    const Gradients g = gradient(net, sample);
    for (double v : g.w1) {
        if (!std::isfinite(v)) {
            throw NumericalError("divergence: non-finite input-layer gradient");
        }
    }
    for (double v : g.w2) {
        if (!std::isfinite(v)) {
            throw NumericalError("divergence: non-finite output-layer gradient");
        }
    }
    for (std::size_t i = 0; i < net.w1.size(); ++i) {
        net.w1[i] -= learning_rate * g.w1[i];
    }
    for (std::size_t i = 0; i < net.w2.size(); ++i) {
        net.w2[i] -= learning_rate * g.w2[i];
    }
}

Gradients numerical_gradient(const MlpNetwork& net, const TrainingSample& sample, double h) {
    if (h <= 0.0) {
        throw InvalidInputError("perturbation h must be > 0");
    }
    MlpNetwork probe = net;
    auto central_difference = [&](double& w) {
        const double saved = w;
        w = saved + h;
        const double plus = mse_cost(forward(probe, sample.input).output, sample.target);
        w = saved - h;
        const double minus = mse_cost(forward(probe, sample.input).output, sample.target);
        w = saved;
        return (plus - minus) / (2.0 * h);
    };
    Gradients g;
    g.w1.resize(net.w1.size());
    g.w2.resize(net.w2.size());
    for (std::size_t i = 0; i < probe.w1.size(); ++i) {
        g.w1[i] = central_difference(probe.w1[i]);
    }
    for (std::size_t i = 0; i < probe.w2.size(); ++i) {
        g.w2[i] = central_difference(probe.w2[i]);
    }
    return g;
}

double max_relative_gradient_error(const MlpNetwork& net, const TrainingSample& sample, double h,
                                   double corrupt_bias) {
    Gradients analytic = gradient(net, sample);
    const Gradients numeric = numerical_gradient(net, sample, h);
    if (corrupt_bias != 0.0 && !analytic.w1.empty()) {
        analytic.w1.front() += corrupt_bias;
    }
    // Relative error with an absolute floor: near-zero gradients would
    // otherwise amplify finite-difference roundoff.
    constexpr double kFloor = 1e-3;
    double worst = 0.0;
    auto compare = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double denom = std::max(std::abs(a[i]) + std::abs(b[i]), kFloor);
            worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
        }
    };
    compare(analytic.w1, numeric.w1);
    compare(analytic.w2, numeric.w2);
    return worst;
}

TrainResult train(const MlpNetwork& initial, std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> val_set, const TrainConfig& cfg) {
    if (cfg.epochs < 0) {
        throw InvalidInputError("epochs must be >= 0");
    }
    if (cfg.epochs > 0 && (cfg.learning_rate <= 0.0 || cfg.learning_rate >= 1.0)) {
        throw InvalidInputError("learning_rate must lie in (0, 1)");
    }
    if (cfg.epochs > 0 && train_set.empty()) {
        throw InvalidInputError("training split is empty");
    }

    TrainResult result;
    result.final_net = initial;
    result.best = initial;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double best_val = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const MlpNetwork before_epoch = result.final_net;
        Rng shuffle_rng(derive_seed(cfg.seed, {kSaltEpochOrder, static_cast<std::uint64_t>(epoch)}));
        shuffle_rng.shuffle(order);
        bool aborted = false;
        try {
            for (std::size_t idx : order) {
                backward(result.final_net, train_set[idx], cfg.learning_rate);
            }
        } catch (const NumericalError&) {
            aborted = true;
        }
        if (aborted || !finite(result.final_net)) {
            result.final_net = before_epoch;  // keep the last finite state
            result.diverged = true;
            break;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        const SplitMetrics train_m = evaluate(result.final_net, train_set);
        const SplitMetrics val_m = evaluate(result.final_net, val_set);
        rec.train_mse = train_m.mse;
        rec.train_nmse = train_m.nmse;
        rec.val_mse = val_m.mse;
        rec.val_nmse = val_m.nmse;
        if (!std::isfinite(rec.train_mse) || !std::isfinite(rec.val_mse)) {
            result.final_net = before_epoch;
            result.diverged = true;
            break;
        }
        const double tracked = val_set.empty() ? rec.train_mse : rec.val_mse;
        if (tracked < best_val) {
            best_val = tracked;
            result.best = result.final_net;
            result.best_epoch = epoch;
        }
        result.records.push_back(rec);
    }
    for (EpochRecord& rec : result.records) {
        rec.is_best = (rec.epoch == result.best_epoch);
    }
    if (result.best_epoch == 0) {
        result.best = result.final_net;
    }
    return result;
}

std::array<double, 2> FeatureScaler::apply(const std::array<double, 2>& x) const {
    return {(x[0] - mean[0]) / stddev[0], (x[1] - mean[1]) / stddev[1]};
}

std::array<double, 2> FeatureScaler::invert(const std::array<double, 2>& x) const {
    return {x[0] * stddev[0] + mean[0], x[1] * stddev[1] + mean[1]};
}

FeatureScaler fit_scaler(std::span<const std::array<double, 2>> rows) {
    FeatureScaler s;
    if (rows.empty()) {
        return s;
    }
    for (int f = 0; f < 2; ++f) {
        double acc = 0.0;
        for (const auto& r : rows) {
            acc += r[static_cast<std::size_t>(f)];
        }
        const double mean = acc / static_cast<double>(rows.size());
        double var = 0.0;
        for (const auto& r : rows) {
            const double d = r[static_cast<std::size_t>(f)] - mean;
            var += d * d;
        }
        var /= static_cast<double>(rows.size());
        s.mean[static_cast<std::size_t>(f)] = mean;
        const double sd = std::sqrt(var);
        s.stddev[static_cast<std::size_t>(f)] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

std::array<double, 2> TrainedModel::predict(const std::array<double, 2>& raw_input) const {
    return target_scale.invert(forward(net, input_scale.apply(raw_input)).output);
}

FitResult fit_model(std::span<const TrainingSample> train_set, std::span<const TrainingSample> val_set,
                    int n_h, const TrainConfig& cfg) {
    if (train_set.empty()) {
        throw InvalidInputError("training split is empty");
    }
    std::vector<std::array<double, 2>> train_inputs(train_set.size());
    std::vector<std::array<double, 2>> train_targets(train_set.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        train_inputs[i] = train_set[i].input;
        train_targets[i] = train_set[i].target;
    }

    FitResult result;
    result.model.input_scale = fit_scaler(train_inputs);
    result.model.target_scale = fit_scaler(train_targets);
    const FeatureScaler& in_s = result.model.input_scale;
    const FeatureScaler& t_s = result.model.target_scale;

    auto standardize = [&](std::span<const TrainingSample> raw) {
        std::vector<TrainingSample> out(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i].input = in_s.apply(raw[i].input);
            out[i].target = t_s.apply(raw[i].target);
        }
        return out;
    };
    const std::vector<TrainingSample> std_train = standardize(train_set);
    const std::vector<TrainingSample> std_val = standardize(val_set);

    // Raw-domain metrics per split so epoch curves compare across configs.
    auto raw_metrics = [&](const MlpNetwork& net, std::span<const TrainingSample> raw_split,
                           std::span<const TrainingSample> std_split) {
        SplitMetrics m;
        if (raw_split.empty()) {
            return m;
        }
        double cost_sum = 0.0;
        double err_sq = 0.0;
        double target_sq = 0.0;
        for (std::size_t i = 0; i < raw_split.size(); ++i) {
            const auto out = t_s.invert(forward(net, std_split[i].input).output);
            cost_sum += mse_cost(out, raw_split[i].target);
            for (int k = 0; k < 2; ++k) {
                const double e = raw_split[i].target[static_cast<std::size_t>(k)] -
                                 out[static_cast<std::size_t>(k)];
                err_sq += e * e;
                target_sq += raw_split[i].target[static_cast<std::size_t>(k)] *
                             raw_split[i].target[static_cast<std::size_t>(k)];
            }
        }
        m.mse = cost_sum / static_cast<double>(raw_split.size());
        m.nmse = target_sq > 0.0 ? err_sq / target_sq : 0.0;
        return m;
    };

    MlpNetwork net = init_network(n_h, cfg.seed, cfg.init_scale);
    MlpNetwork best = net;
    std::vector<std::size_t> order(std_train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double best_val = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const MlpNetwork before_epoch = net;
        Rng shuffle_rng(derive_seed(cfg.seed, {kSaltEpochOrder, static_cast<std::uint64_t>(epoch)}));
        shuffle_rng.shuffle(order);
        bool aborted = false;
        try {
            for (std::size_t idx : order) {
                backward(net, std_train[idx], cfg.learning_rate);
            }
        } catch (const NumericalError&) {
            aborted = true;
        }
        if (aborted || !finite(net)) {
            net = before_epoch;
            result.diverged = true;
            break;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        const SplitMetrics train_m = raw_metrics(net, train_set, std_train);
        const SplitMetrics val_m = raw_metrics(net, val_set, std_val);
        rec.train_mse = train_m.mse;
        rec.train_nmse = train_m.nmse;
        rec.val_mse = val_m.mse;
        rec.val_nmse = val_m.nmse;
        if (!std::isfinite(rec.train_mse) || !std::isfinite(rec.val_mse)) {
            net = before_epoch;
            result.diverged = true;
            break;
        }
        const double tracked = val_set.empty() ? rec.train_mse : rec.val_mse;
        if (tracked < best_val) {
            best_val = tracked;
            best = net;
            result.best_epoch = epoch;
        }
        result.records.push_back(rec);
    }
    for (EpochRecord& rec : result.records) {
        rec.is_best = (rec.epoch == result.best_epoch);
    }
    result.model.net = result.best_epoch > 0 ? best : net;
    return result;
}

void save_model(const TrainedModel& model, const std::string& path) {
    const MlpNetwork& net = model.net;
    std::ostringstream out;
    out << "mlpv1 " << net.n_in << ' ' << net.n_h << ' ' << net.n_o << '\n';
    for (int i = 0; i < net.n_in; ++i) {
        for (int j = 0; j < net.n_h; ++j) {
            out << (j ? " " : "") << csv::fmt17(net.weight1(i, j));
        }
        out << '\n';
    }
    for (int j = 0; j < net.n_h; ++j) {
        for (int k = 0; k < net.n_o; ++k) {
            out << (k ? " " : "") << csv::fmt17(net.weight2(j, k));
        }
        out << '\n';
    }
    auto scaler_line = [](const char* tag, const FeatureScaler& s) {
        std::string line = tag;
        for (double v : {s.mean[0], s.mean[1], s.stddev[0], s.stddev[1]}) {
            line += ' ';
            line += csv::fmt17(v);
        }
        return line + '\n';
    };
    out << scaler_line("input_scale", model.input_scale);
    out << scaler_line("target_scale", model.target_scale);
    csv::write_file(path, out.str());
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open model file: " + path);
    }
    std::string magic;
    int n_in = 0;
    int n_h = 0;
    int n_o = 0;
    if (!(in >> magic >> n_in >> n_h >> n_o) || magic != "mlpv1") {
        throw IoError("unsupported model header in " + path);
    }
    if (n_in != 2 || n_o != 2 || n_h < 1) {
        throw IoError("unsupported model dimensions in " + path);
    }
    TrainedModel model;
    model.net.n_h = n_h;
    model.net.w1.resize(static_cast<std::size_t>(n_in) * n_h);
    model.net.w2.resize(static_cast<std::size_t>(n_h) * n_o);
    for (double& w : model.net.w1) {
        if (!(in >> w)) {
            throw IoError("truncated model weights in " + path);
        }
    }
    for (double& w : model.net.w2) {
        if (!(in >> w)) {
            throw IoError("truncated model weights in " + path);
        }
    }
    std::string tag;
    while (in >> tag) {
        FeatureScaler* target = nullptr;
        if (tag == "input_scale") {
            target = &model.input_scale;
        } else if (tag == "target_scale") {
            target = &model.target_scale;
        } else {
            throw IoError("unknown model section '" + tag + "' in " + path);
        }
        if (!(in >> target->mean[0] >> target->mean[1] >> target->stddev[0] >> target->stddev[1])) {
            throw IoError("truncated scaler line in " + path);
        }
    }
    return model;
}

}  // namespace v2isim::mlp
