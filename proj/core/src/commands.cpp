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

#include "v2isim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>

#include "v2isim/csv.hpp"
#include "v2isim/errors.hpp"
#include "v2isim/estimators.hpp"
#include "v2isim/rng.hpp"

namespace v2isim::cli {

namespace {

constexpr std::uint64_t kSaltGradcheck = 0x47434845ULL;

void ensure_parent_dir(const std::string& path) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
        if (ec) {
            throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
        }
    }
}

}  // namespace

void cmd_dataset(const RunConfig& cfg, const std::string& out_path) {
    const harness::Dataset ds =
        harness::build_dataset(cfg.channel, cfg.ofdm, cfg.experiment.dataset_snr_db,
                               cfg.experiment.frames, cfg.experiment.predict_ahead, cfg.mlp.seed);
    std::ostringstream out;
    out << "# v2isim dataset\n";
    out << "# seed=" << ds.provenance.seed << '\n';
    out << "# snr_db=" << csv::fmt(ds.provenance.snr_db) << '\n';
    out << "# frames=" << ds.provenance.n_frames << '\n';
    out << "# predict_ahead=" << ds.provenance.predict_ahead << '\n';
    out << "# num_subcarriers=" << cfg.ofdm.num_subcarriers << '\n';
    out << "in_re,in_im,t_re,t_im,split\n";
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const mlp::TrainingSample& s = ds.samples[i];
        out << csv::fmt17(s.input[0]) << ',' << csv::fmt17(s.input[1]) << ','
            << csv::fmt17(s.target[0]) << ',' << csv::fmt17(s.target[1]) << ','
            << harness::split_name(ds.sample_split[i]) << '\n';
    }
    ensure_parent_dir(out_path);
    csv::write_file(out_path, out.str());
}

std::vector<mlp::TrainingSample> LoadedDataset::gather(harness::Split s) const {
    std::vector<mlp::TrainingSample> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (splits[i] == s) {
            out.push_back(samples[i]);
        }
    }
    return out;
}

LoadedDataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset file: " + path);
    }
    LoadedDataset ds;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                const std::string key = line.substr(2, eq - 2);
                const std::string value = line.substr(eq + 1);
                if (key == "seed") {
                    ds.provenance.seed = std::strtoull(value.c_str(), nullptr, 10);
                } else if (key == "snr_db") {
                    ds.provenance.snr_db = std::strtod(value.c_str(), nullptr);
                } else if (key == "frames") {
                    ds.provenance.n_frames = std::atoi(value.c_str());
                } else if (key == "predict_ahead") {
                    ds.provenance.predict_ahead = std::atoi(value.c_str());
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != "in_re,in_im,t_re,t_im,split") {
                throw IoError("unexpected dataset header in " + path);
            }
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        mlp::TrainingSample s;
        double* slots[4] = {&s.input[0], &s.input[1], &s.target[0], &s.target[1]};
        for (double* slot : slots) {
            if (!std::getline(ss, field, ',')) {
                throw IoError("truncated dataset row in " + path);
            }
            *slot = std::strtod(field.c_str(), nullptr);
        }
        if (!std::getline(ss, field, ',')) {
            throw IoError("dataset row missing split label in " + path);
        }
        ds.samples.push_back(s);
        ds.splits.push_back(harness::parse_split(field));
    }
    if (ds.samples.empty()) {
        throw IoError("dataset file has no samples: " + path);
    }
    return ds;
}

void cmd_train(const RunConfig& cfg, const std::string& dataset_path, const std::string& model_path,
               const std::string& epochs_csv_path) {
    const LoadedDataset ds = read_dataset_file(dataset_path);
    const std::vector<mlp::TrainingSample> train_set = ds.gather(harness::Split::train);
    const std::vector<mlp::TrainingSample> val_set = ds.gather(harness::Split::validation);

    const mlp::FitResult fit = mlp::fit_model(train_set, val_set, cfg.mlp.hidden_units,
                                              cfg.mlp.train_config());
    if (fit.diverged) {
        throw NumericalError("training diverged after epoch " +
                             std::to_string(fit.records.size()) + "; try a smaller learning rate");
    }
    ensure_parent_dir(model_path);
    mlp::save_model(fit.model, model_path);

    const std::vector<harness::EpochRow> rows = harness::mse_vs_epoch(fit.records, ds.provenance.snr_db);
    std::ostringstream out;
    out << "epoch,snr_db,split,nmse,is_best\n";
    for (const harness::EpochRow& row : rows) {
        out << row.epoch << ',' << csv::fmt(row.snr_db) << ',' << harness::split_name(row.split) << ','
            << csv::fmt(row.nmse) << ',' << (row.is_best ? 1 : 0) << '\n';
    }
    ensure_parent_dir(epochs_csv_path);
    csv::write_file(epochs_csv_path, out.str());
}

void cmd_sweep(const RunConfig& cfg, const std::optional<std::string>& model_path,
               const std::string& out_dir) {
    const bool wants_mlp = std::find(cfg.experiment.estimators.begin(), cfg.experiment.estimators.end(),
                                     harness::Estimator::mlp) != cfg.experiment.estimators.end();
    const bool wants_mmse = std::find(cfg.experiment.estimators.begin(), cfg.experiment.estimators.end(),
                                      harness::Estimator::mmse) != cfg.experiment.estimators.end();
    if (wants_mlp && !model_path) {
        throw ConfigError("missing model: experiment.estimators includes mlp but no model was given");
    }

    std::optional<mlp::TrainedModel> model;
    if (model_path) {
        model = mlp::load_model(*model_path);
    }

    // The dataset is a pure function of (config, seed); rebuild it for the
    // covariance estimate and the model evaluation artifacts.
    const harness::Dataset ds =
        harness::build_dataset(cfg.channel, cfg.ofdm, cfg.experiment.dataset_snr_db,
                               cfg.experiment.frames, cfg.experiment.predict_ahead, cfg.mlp.seed);

    std::optional<est::ChannelCovariance> covariance;
    if (wants_mmse) {
        std::vector<ComplexVector> gs;
        gs.reserve(ds.step_cfrs.size());
        for (const ComplexVector& h : ds.step_cfrs) {
            gs.push_back(est::time_domain_channel(h));
        }
        covariance = est::sample_covariance(gs);
    }

    harness::SweepSpec spec;
    spec.snr_grid_db = cfg.experiment.snr_grid_db;
    spec.bits_per_point = cfg.experiment.bits_per_point;
    spec.estimators = cfg.experiment.estimators;
    spec.predict_ahead = cfg.experiment.predict_ahead;
    spec.seed = cfg.mlp.seed;
    spec.start_step = cfg.experiment.frames;  // sweep the trajectory's continuation

    const harness::SweepResult result =
        harness::ber_sweep(cfg.channel, cfg.ofdm, spec, model ? &*model : nullptr,
                           covariance ? &*covariance : nullptr);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + out_dir + ": " + ec.message());
    }
    const std::filesystem::path out(out_dir);

    std::ostringstream ber_csv;
    ber_csv << "snr_db,estimator,ber,total_bits,error_bits\n";
    for (const harness::SweepRow& row : result.rows) {
        if (row.metric != "ber") {
            continue;
        }
        ber_csv << csv::fmt(row.snr_db) << ',' << harness::estimator_name(row.estimator) << ','
                << csv::fmt(row.value) << ',' << row.trial_count << ',' << row.error_count << '\n';
    }
    csv::write_file((out / "ber.csv").string(), ber_csv.str());

    if (!model) {
        return;
    }

    // Model diagnostics on the rebuilt dataset: pooled real/imag components.
    std::vector<double> outputs;
    std::vector<double> targets;
    std::vector<harness::Split> splits;
    outputs.reserve(ds.samples.size() * 2);
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const auto predicted = model->predict(ds.samples[i].input);
        for (int k = 0; k < 2; ++k) {
            outputs.push_back(predicted[static_cast<std::size_t>(k)]);
            targets.push_back(ds.samples[i].target[static_cast<std::size_t>(k)]);
            splits.push_back(ds.sample_split[i]);
        }
    }

    const std::vector<harness::HistogramBin> bins =
        harness::error_histogram(outputs, targets, splits, cfg.experiment.histogram_bins);
    std::ostringstream hist_csv;
    hist_csv << "bin_lo,bin_hi,count,split\n";
    for (const harness::HistogramBin& bin : bins) {
        hist_csv << csv::fmt(bin.lo) << ',' << csv::fmt(bin.hi) << ',' << bin.count << ','
                 << harness::split_name(bin.split) << '\n';
    }
    csv::write_file((out / "hist.csv").string(), hist_csv.str());

    std::vector<std::tuple<double, double, harness::Split>> scatter;
    scatter.reserve(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        scatter.emplace_back(targets[i], outputs[i], splits[i]);
    }
    std::sort(scatter.begin(), scatter.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return static_cast<int>(std::get<2>(a)) < static_cast<int>(std::get<2>(b));
    });
    std::ostringstream reg_csv;
    reg_csv << "target,output,split\n";
    for (const auto& [t, o, s] : scatter) {
        reg_csv << csv::fmt(t) << ',' << csv::fmt(o) << ',' << harness::split_name(s) << '\n';
    }
    csv::write_file((out / "regression.csv").string(), reg_csv.str());

    std::vector<std::pair<std::string, harness::Split>> split_order = {
        {"test", harness::Split::test},
        {"train", harness::Split::train},
        {"validation", harness::Split::validation},
    };
    std::ostringstream stats_csv;
    stats_csv << "split,slope,intercept,r\n";
    for (const auto& [name, split] : split_order) {
        std::vector<double> o;
        std::vector<double> t;
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            if (splits[i] == split) {
                o.push_back(outputs[i]);
                t.push_back(targets[i]);
            }
        }
        const harness::RegressionStats stats = harness::regression_stats(o, t);
        stats_csv << name << ',' << csv::fmt(stats.slope) << ',' << csv::fmt(stats.intercept) << ','
                  << csv::fmt(stats.r) << '\n';
    }
    csv::write_file((out / "regression_stats.csv").string(), stats_csv.str());
}

GradcheckReport cmd_gradcheck(std::uint64_t seed, int cases, double h, bool corrupt) {
    if (cases < 1) {
        throw InvalidInputError("gradcheck needs at least one case");
    }
    if (h <= 0.0) {
        throw InvalidInputError("perturbation h must be > 0");
    }
    GradcheckReport report;
    report.cases = cases;
    for (int c = 0; c < cases; ++c) {
        Rng rng(derive_seed(seed, {kSaltGradcheck, static_cast<std::uint64_t>(c)}));
        const int n_h = 1 + static_cast<int>(rng.below(16));
        const mlp::MlpNetwork net = mlp::init_network(n_h, rng.next_u64(), 0.5);
        mlp::TrainingSample sample;
        for (int k = 0; k < 2; ++k) {
            sample.input[static_cast<std::size_t>(k)] = rng.uniform(-2.0, 2.0);
            sample.target[static_cast<std::size_t>(k)] = rng.uniform(-2.0, 2.0);
        }
        const double err =
            mlp::max_relative_gradient_error(net, sample, h, corrupt ? 0.05 : 0.0);
        report.max_relative_error = std::max(report.max_relative_error, err);
    }
    report.pass = report.max_relative_error < kGradcheckTolerance;
    return report;
}

}  // namespace v2isim::cli
