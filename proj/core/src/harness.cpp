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

#include "v2isim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "v2isim/errors.hpp"
#include "v2isim/ofdm.hpp"
#include "v2isim/rng.hpp"

namespace v2isim::harness {

namespace {

// Substream salts under the master seed. The dataset and the sweep share the
// trajectory and pilot streams on purpose: they must see the same channel.
constexpr std::uint64_t kSaltTrajectory = 0x01;
constexpr std::uint64_t kSaltPilot = 0x02;
constexpr std::uint64_t kSaltDatasetNoise = 0x03;
constexpr std::uint64_t kSaltSplit = 0x04;
constexpr std::uint64_t kSaltSweep = 0x05;

std::vector<std::uint8_t> random_bits(long long count, Rng& rng) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(count));
    std::uint64_t word = 0;
    int avail = 0;
    for (std::uint8_t& b : bits) {
        if (avail == 0) {
            word = rng.next_u64();
            avail = 64;
        }
        b = static_cast<std::uint8_t>(word & 1);
        word >>= 1;
        --avail;
    }
    return bits;
}

}  // namespace

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "?";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "validation") return Split::validation;
    if (name == "test") return Split::test;
    throw InvalidInputError("unknown split name: " + name);
}

std::vector<mlp::TrainingSample> Dataset::gather(Split s) const {
    std::vector<mlp::TrainingSample> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (sample_split[i] == s) {
            out.push_back(samples[i]);
        }
    }
    return out;
}

Dataset build_dataset(const channel::ChannelModel& model, const OfdmConfig& cfg, double snr_db,
                      int n_frames, int predict_ahead, std::uint64_t seed) {
    validate(cfg);
    if (n_frames < 10) {
        throw InvalidInputError("n_frames must be >= 10, got " + std::to_string(n_frames));
    }
    if (predict_ahead < 0 || predict_ahead >= n_frames) {
        throw InvalidInputError("predict_ahead must lie in [0, n_frames)");
    }

    Rng traj_rng(derive_seed(seed, {kSaltTrajectory}));
    channel::TrajectoryRealizer realizer(model, cfg.num_subcarriers, traj_rng);
    const ComplexVector pilot = ofdm::generate_pilot(cfg, derive_seed(seed, {kSaltPilot}));
    const ComplexVector pilot_time = ofdm::modulate(pilot, cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.num_subcarriers);

    std::vector<ComplexVector> observations(static_cast<std::size_t>(n_frames));
    Dataset ds;
    ds.step_cfrs.resize(static_cast<std::size_t>(n_frames));
    for (int s = 0; s < n_frames; ++s) {
        const channel::ChannelRealization r = realizer.at_step(s);
        Rng noise_rng(derive_seed(seed, {kSaltDatasetNoise, static_cast<std::uint64_t>(s)}));
        const ComplexVector y_time = channel::apply_channel(pilot_time, r, cfg, snr_db, noise_rng);
        const ComplexVector y = ofdm::demodulate(y_time, cfg);
        ComplexVector obs(n);
        for (std::size_t k = 0; k < n; ++k) {
            obs[k] = y[k] / pilot[k];
        }
        observations[static_cast<std::size_t>(s)] = std::move(obs);
        ds.step_cfrs[static_cast<std::size_t>(s)] = channel::effective_cfr(r);
    }

    for (int s = 0; s + predict_ahead < n_frames; ++s) {
        const ComplexVector& in = observations[static_cast<std::size_t>(s)];
        const ComplexVector& tgt = ds.step_cfrs[static_cast<std::size_t>(s + predict_ahead)];
        for (std::size_t k = 0; k < n; ++k) {
            mlp::TrainingSample sample;
            sample.input = {in[k].real(), in[k].imag()};
            sample.target = {tgt[k].real(), tgt[k].imag()};
            ds.samples.push_back(sample);
        }
    }

    const std::size_t m = ds.samples.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng(derive_seed(seed, {kSaltSplit}));
    split_rng.shuffle(order);
    const std::size_t n_train = static_cast<std::size_t>(std::llround(0.70 * static_cast<double>(m)));
    const std::size_t n_val = static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(m)));
    ds.sample_split.assign(m, Split::test);
    for (std::size_t i = 0; i < m; ++i) {
        const Split s = i < n_train              ? Split::train
                        : i < n_train + n_val    ? Split::validation
                                                 : Split::test;
        ds.sample_split[order[i]] = s;
    }
    for (std::size_t i = 0; i < m; ++i) {
        switch (ds.sample_split[i]) {
            case Split::train: ds.train_indices.push_back(i); break;
            case Split::validation: ds.validation_indices.push_back(i); break;
            case Split::test: ds.test_indices.push_back(i); break;
        }
    }
    ds.provenance = DatasetProvenance{seed, snr_db, n_frames, predict_ahead};
    return ds;
}

double nmse(const std::vector<ComplexVector>& estimates, const std::vector<ComplexVector>& truths) {
    if (estimates.size() != truths.size() || estimates.empty()) {
        throw InvalidInputError("nmse needs non-empty sequences of equal length");
    }
    double err_sq = 0.0;
    double truth_sq = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (estimates[i].size() != truths[i].size()) {
            throw InvalidInputError("nmse vector shapes differ at index " + std::to_string(i));
        }
        for (std::size_t k = 0; k < estimates[i].size(); ++k) {
            err_sq += std::norm(estimates[i][k] - truths[i][k]);
            truth_sq += std::norm(truths[i][k]);
        }
    }
    if (truth_sq <= 0.0) {
        throw InvalidInputError("undefined metric: zero-power truth");
    }
    return err_sq / truth_sq;
}

BerCount ber(const std::vector<std::uint8_t>& tx_bits, const std::vector<std::uint8_t>& rx_bits) {
    if (tx_bits.size() != rx_bits.size() || tx_bits.empty()) {
        throw InvalidInputError("ber needs non-empty bit streams of equal length");
    }
    BerCount c;
    c.total_bits = static_cast<long long>(tx_bits.size());
    for (std::size_t i = 0; i < tx_bits.size(); ++i) {
        c.error_bits += (tx_bits[i] & 1) != (rx_bits[i] & 1);
    }
    return c;
}

std::string estimator_name(Estimator e) {
    switch (e) {
        case Estimator::perfect: return "perfect";
        case Estimator::ls: return "ls";
        case Estimator::mmse: return "mmse";
        case Estimator::mlp: return "mlp";
        case Estimator::outdated_ls: return "outdated_ls";
    }
    return "?";
}

std::optional<Estimator> parse_estimator(const std::string& name) {
    if (name == "perfect") return Estimator::perfect;
    if (name == "ls") return Estimator::ls;
    if (name == "mmse") return Estimator::mmse;
    if (name == "mlp") return Estimator::mlp;
    if (name == "outdated_ls") return Estimator::outdated_ls;
    return std::nullopt;
}

const SweepRow* SweepResult::find(double snr_db, Estimator e, const std::string& metric) const {
    for (const SweepRow& row : rows) {
        if (row.snr_db == snr_db && row.estimator == e && row.metric == metric) {
            return &row;
        }
    }
    return nullptr;
}

SweepResult ber_sweep(const channel::ChannelModel& model, const OfdmConfig& cfg, const SweepSpec& spec,
                      const mlp::TrainedModel* trained, const est::ChannelCovariance* covariance) {
    validate(cfg);
    if (spec.snr_grid_db.empty()) {
        throw InvalidInputError("snr grid is empty");
    }
    if (spec.bits_per_point < 2LL * cfg.num_subcarriers) {
        throw InvalidInputError("bits_per_point must cover at least one frame");
    }
    if (spec.estimators.empty()) {
        throw InvalidInputError("estimator list is empty");
    }
    const bool wants_mlp =
        std::find(spec.estimators.begin(), spec.estimators.end(), Estimator::mlp) != spec.estimators.end();
    const bool wants_mmse =
        std::find(spec.estimators.begin(), spec.estimators.end(), Estimator::mmse) != spec.estimators.end();
    if (wants_mlp && trained == nullptr) {
        throw InvalidInputError("missing model: mlp estimator requested without a trained network");
    }
    if (wants_mmse && covariance == nullptr) {
        throw InvalidInputError("mmse estimator requested without a channel covariance");
    }

    Rng traj_rng(derive_seed(spec.seed, {kSaltTrajectory}));
    channel::TrajectoryRealizer realizer(model, cfg.num_subcarriers, traj_rng);
    const ComplexVector pilot = ofdm::generate_pilot(cfg, derive_seed(spec.seed, {kSaltPilot}));
    const ComplexVector pilot_time = ofdm::modulate(pilot, cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.num_subcarriers);
    const long long bits_per_frame = 2LL * cfg.num_subcarriers;
    const long long steps = (spec.bits_per_point + bits_per_frame - 1) / bits_per_frame;

    std::optional<est::MmseEstimator> mmse;
    if (wants_mmse) {
        mmse.emplace(*covariance, pilot);
    }

    struct Accumulator {
        BerCount bits;
        double err_sq = 0.0;
        double truth_sq = 0.0;
        long long frames = 0;
    };

    SweepResult result;
    for (std::size_t snr_idx = 0; snr_idx < spec.snr_grid_db.size(); ++snr_idx) {
        const double snr_db = spec.snr_grid_db[snr_idx];
        std::vector<Accumulator> acc(spec.estimators.size());
        // The MMSE weights use the operating point's nominal noise level, as
        // a receiver that knows its noise floor would.
        double nominal_sigma2 = 0.0;
        std::optional<ComplexVector> prev_obs;

        for (long long i = 0; i < steps; ++i) {
            const long long step = spec.start_step + i;
            const channel::ChannelRealization r = realizer.at_step(step);
            const ComplexVector h_eff = channel::effective_cfr(r);

            Rng rng_pilot(derive_seed(spec.seed, {kSaltSweep, snr_idx, static_cast<std::uint64_t>(i), 0}));
            Rng rng_bits(derive_seed(spec.seed, {kSaltSweep, snr_idx, static_cast<std::uint64_t>(i), 1}));
            Rng rng_data(derive_seed(spec.seed, {kSaltSweep, snr_idx, static_cast<std::uint64_t>(i), 2}));

            const ComplexVector clean_pilot = channel::convolve(pilot_time, r, cfg);
            const double sigma2 = channel::noise_variance_for(clean_pilot, snr_db);
            if (i == 0) {
                nominal_sigma2 = sigma2;
            }
            const ComplexVector y_pilot = ofdm::demodulate(channel::awgn(clean_pilot, snr_db, rng_pilot), cfg);
            ComplexVector obs(n);
            for (std::size_t k = 0; k < n; ++k) {
                obs[k] = y_pilot[k] / pilot[k];
            }

            const std::vector<std::uint8_t> tx_bits = random_bits(bits_per_frame, rng_bits);
            const ComplexVector x_data = ofdm::qam_map(tx_bits, cfg.bits_per_symbol);
            const ComplexVector clean_data = channel::convolve(ofdm::modulate(x_data, cfg), r, cfg);
            const ComplexVector y_data = ofdm::demodulate(channel::awgn(clean_data, snr_db, rng_data), cfg);

            for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
                ComplexVector h_hat;
                switch (spec.estimators[e]) {
                    case Estimator::perfect:
                        h_hat = h_eff;
                        break;
                    case Estimator::ls:
                        h_hat = est::ls_estimate(est::PilotObservation{pilot, y_pilot, sigma2});
                        break;
                    case Estimator::mmse:
                        h_hat = mmse->estimate(y_pilot, nominal_sigma2);
                        break;
                    case Estimator::outdated_ls:
                        if (!prev_obs) {
                            continue;  // no previous pilot yet
                        }
                        h_hat = *prev_obs;
                        break;
                    case Estimator::mlp: {
                        const ComplexVector* source = &obs;
                        if (spec.predict_ahead > 0) {
                            if (!prev_obs) {
                                continue;
                            }
                            source = &*prev_obs;
                        }
                        h_hat.resize(n);
                        for (std::size_t k = 0; k < n; ++k) {
                            const auto out = trained->predict({(*source)[k].real(), (*source)[k].imag()});
                            h_hat[k] = Complex(out[0], out[1]);
                        }
                        break;
                    }
                }
                const est::EqualizedFrame eq = est::equalize(y_data, h_hat);
                const std::vector<std::uint8_t> rx_bits = ofdm::qam_demap(eq.symbols);
                const BerCount c = ber(tx_bits, rx_bits);
                acc[e].bits.error_bits += c.error_bits;
                acc[e].bits.total_bits += c.total_bits;
                for (std::size_t k = 0; k < n; ++k) {
                    acc[e].err_sq += std::norm(h_hat[k] - h_eff[k]);
                    acc[e].truth_sq += std::norm(h_eff[k]);
                }
                acc[e].frames += 1;
            }
            prev_obs = std::move(obs);
        }

        for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
            SweepRow ber_row;
            ber_row.snr_db = snr_db;
            ber_row.estimator = spec.estimators[e];
            ber_row.metric = "ber";
            ber_row.value = acc[e].bits.rate();
            ber_row.trial_count = acc[e].bits.total_bits;
            ber_row.error_count = acc[e].bits.error_bits;
            result.rows.push_back(ber_row);

            SweepRow nmse_row;
            nmse_row.snr_db = snr_db;
            nmse_row.estimator = spec.estimators[e];
            nmse_row.metric = "nmse";
            nmse_row.value = acc[e].truth_sq > 0.0 ? acc[e].err_sq / acc[e].truth_sq : 0.0;
            nmse_row.trial_count = acc[e].frames;
            nmse_row.error_count = 0;
            result.rows.push_back(nmse_row);
        }
    }

    std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        const std::string an = estimator_name(a.estimator);
        const std::string bn = estimator_name(b.estimator);
        if (an != bn) return an < bn;
        return a.metric < b.metric;
    });
    return result;
}

std::vector<EpochRow> mse_vs_epoch(const std::vector<mlp::EpochRecord>& records, double snr_db) {
    std::vector<EpochRow> rows;
    rows.reserve(records.size() * 2);
    for (const mlp::EpochRecord& rec : records) {
        rows.push_back(EpochRow{rec.epoch, snr_db, Split::train, rec.train_nmse, rec.is_best});
        rows.push_back(EpochRow{rec.epoch, snr_db, Split::validation, rec.val_nmse, rec.is_best});
    }
    return rows;
}

std::vector<HistogramBin> error_histogram(const std::vector<double>& outputs,
                                          const std::vector<double>& targets,
                                          const std::vector<Split>& splits, int bin_count) {
    if (outputs.size() != targets.size() || outputs.size() != splits.size()) {
        throw InvalidInputError("error_histogram needs parallel outputs/targets/splits");
    }
    if (bin_count < 2) {
        throw InvalidInputError("bin_count must be >= 2");
    }
    if (outputs.empty()) {
        return {};
    }
    std::vector<double> errors(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        errors[i] = targets[i] - outputs[i];
    }
    const auto [lo_it, hi_it] = std::minmax_element(errors.begin(), errors.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    std::vector<Split> present;
    for (Split s : {Split::train, Split::validation, Split::test}) {
        if (std::find(splits.begin(), splits.end(), s) != splits.end()) {
            present.push_back(s);
        }
    }

    const bool degenerate = !(hi > lo);
    const int bins = degenerate ? 1 : bin_count;
    const double width = degenerate ? 0.0 : (hi - lo) / bins;

    std::vector<std::vector<long long>> counts(static_cast<std::size_t>(bins),
                                               std::vector<long long>(present.size(), 0));
    for (std::size_t i = 0; i < errors.size(); ++i) {
        int b = 0;
        if (!degenerate) {
            b = std::min(bins - 1, static_cast<int>((errors[i] - lo) / width));
            b = std::max(0, b);
        }
        const auto split_pos =
            std::find(present.begin(), present.end(), splits[i]) - present.begin();
        counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(split_pos)] += 1;
    }

    std::vector<HistogramBin> rows;
    for (int b = 0; b < bins; ++b) {
        for (std::size_t s = 0; s < present.size(); ++s) {
            HistogramBin bin;
            bin.lo = degenerate ? lo : lo + b * width;
            bin.hi = degenerate ? hi : (b + 1 == bins ? hi : lo + (b + 1) * width);
            bin.count = counts[static_cast<std::size_t>(b)][s];
            bin.split = present[s];
            rows.push_back(bin);
        }
    }
    return rows;
}

RegressionStats regression_stats(const std::vector<double>& outputs, const std::vector<double>& targets) {
    if (outputs.size() != targets.size() || outputs.size() < 2) {
        throw InvalidInputError("regression needs >= 2 paired points");
    }
    const double inv_n = 1.0 / static_cast<double>(outputs.size());
    double mean_t = 0.0;
    double mean_o = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        mean_t += targets[i];
        mean_o += outputs[i];
    }
    mean_t *= inv_n;
    mean_o *= inv_n;
    double var_t = 0.0;
    double var_o = 0.0;
    double cov = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const double dt = targets[i] - mean_t;
        const double dout = outputs[i] - mean_o;
        var_t += dt * dt;
        var_o += dout * dout;
        cov += dt * dout;
    }
    if (var_t <= 0.0) {
        throw InvalidInputError("undefined fit: constant targets");
    }
    RegressionStats stats;
    stats.slope = cov / var_t;
    stats.intercept = mean_o - stats.slope * mean_t;
    stats.r = var_o > 0.0 ? cov / std::sqrt(var_t * var_o) : 0.0;
    return stats;
}

}  // namespace v2isim::harness
