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

#include "v2isim/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "v2isim/errors.hpp"

namespace v2isim::channel {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPowerSumTolerance = 1e-12;
}  // namespace

void validate(const LargeScaleParams& params) {
    if (params.pathloss_exponent <= 0.0) {
        throw InvalidInputError("pathloss_exponent must be > 0");
    }
    if (params.shadow_sigma_db < 0.0) {
        throw InvalidInputError("shadow_sigma_db must be >= 0");
    }
    if (params.fast_fading_mean <= 0.0) {
        throw InvalidInputError("fast_fading_mean must be > 0");
    }
}

void validate(const MultipathProfile& profile) {
    const std::size_t taps = profile.num_taps();
    if (taps == 0) {
        throw InvalidInputError("profile needs at least one tap");
    }
    if (profile.tap_powers.size() != taps || profile.tap_doppler_hz.size() != taps) {
        throw InvalidInputError("tap_delays, tap_powers and tap_doppler_hz must have equal length");
    }
    if (profile.tap_delays.front() != 0) {
        throw InvalidInputError("first tap delay must be 0");
    }
    double power_sum = 0.0;
    for (std::size_t l = 0; l < taps; ++l) {
        if (profile.tap_delays[l] < 0) {
            throw InvalidInputError("tap delays must be non-negative");
        }
        if (l > 0 && profile.tap_delays[l] <= profile.tap_delays[l - 1]) {
            throw InvalidInputError("tap delays must be strictly increasing");
        }
        if (profile.tap_powers[l] < 0.0) {
            throw InvalidInputError("tap powers must be non-negative");
        }
        power_sum += profile.tap_powers[l];
    }
    if (std::abs(power_sum - 1.0) > kPowerSumTolerance) {
        throw InvalidInputError("tap powers must sum to 1, got " + std::to_string(power_sum));
    }
    if (profile.carrier_freq_hz <= 0.0 || profile.sample_period_s <= 0.0) {
        throw InvalidInputError("carrier_freq_hz and sample_period_s must be > 0");
    }
}

void validate(const Trajectory& traj) {
    if (traj.initial_distance_m <= 0.0) {
        throw InvalidInputError("initial_distance_m must be > 0");
    }
    if (traj.bs_offset_m < 0.0) {
        throw InvalidInputError("bs_offset_m must be >= 0");
    }
    if (traj.initial_distance_m < traj.bs_offset_m) {
        throw InvalidInputError("initial_distance_m must be >= bs_offset_m");
    }
    if (traj.speed_mps < 0.0) {
        throw InvalidInputError("speed_mps must be >= 0");
    }
    if (traj.step_samples <= 0) {
        throw InvalidInputError("step_samples must be > 0");
    }
}

ComplexVector effective_cfr(const ChannelRealization& r) {
    const double amp = std::sqrt(r.large_scale_gain);
    ComplexVector h = r.cfr;
    for (Complex& v : h) {
        v *= amp;
    }
    return h;
}

double path_gain(const LargeScaleParams& params, double distance_m) {
    if (distance_m <= 0.0) {
        throw InvalidInputError("invalid geometry: distance must be > 0, got " +
                                std::to_string(distance_m));
    }
    return params.pathloss_constant * std::pow(distance_m, -params.pathloss_exponent);
}

double large_scale_gain(const LargeScaleParams& params, double distance_m, Rng& rng) {
    const double deterministic = path_gain(params, distance_m);
    const double fast = rng.exponential(params.fast_fading_mean);
    const double shadow = std::pow(10.0, params.shadow_sigma_db * rng.normal() / 10.0);
    return fast * shadow * deterministic;
}

double tap_phase(const MultipathProfile& profile, double static_phase, std::size_t l, long n) {
    if (l >= profile.num_taps()) {
        throw InvalidInputError("tap index out of range");
    }
    const double tau_s = profile.tap_delays[l] * profile.sample_period_s;
    const double delay_term = -kTwoPi * profile.carrier_freq_hz * tau_s;
    const double doppler_term =
        kTwoPi * profile.tap_doppler_hz[l] * static_cast<double>(n) * profile.sample_period_s;
    return static_phase + delay_term + doppler_term;
}

ComplexVector cir_to_cfr(const std::vector<Complex>& tap_gains, const std::vector<int>& tap_delays,
                         int num_subcarriers) {
    if (tap_gains.size() != tap_delays.size()) {
        throw InvalidInputError("tap_gains and tap_delays must have equal length");
    }
    for (int d : tap_delays) {
        if (d < 0 || d >= num_subcarriers) {
            throw InvalidInputError("invalid profile: tap delay " + std::to_string(d) +
                                    " outside [0, N)");
        }
    }
    ComplexVector h(static_cast<std::size_t>(num_subcarriers), Complex(0.0, 0.0));
    for (int k = 0; k < num_subcarriers; ++k) {
        Complex acc(0.0, 0.0);
        for (std::size_t l = 0; l < tap_gains.size(); ++l) {
            const double ang = -kTwoPi * static_cast<double>(k) *
                               static_cast<double>(tap_delays[l]) / static_cast<double>(num_subcarriers);
            acc += tap_gains[l] * Complex(std::cos(ang), std::sin(ang));
        }
        h[static_cast<std::size_t>(k)] = acc;
    }
    return h;
}

namespace {

std::vector<Complex> evolve_taps(const MultipathProfile& profile, const std::vector<double>& static_phases,
                                 long n) {
    std::vector<Complex> gains(profile.num_taps());
    for (std::size_t l = 0; l < gains.size(); ++l) {
        const double amp = std::sqrt(profile.tap_powers[l]);
        gains[l] = std::polar(amp, tap_phase(profile, static_phases[l], l, n));
    }
    return gains;
}

std::vector<double> draw_static_phases(const MultipathProfile& profile, Rng& rng) {
    std::vector<double> phases(profile.num_taps());
    for (double& p : phases) {
        p = rng.uniform(0.0, kTwoPi);
    }
    return phases;
}

}  // namespace

ChannelRealization generate_cir(const MultipathProfile& profile, long n, Rng& rng, int num_subcarriers) {
    validate(profile);
    ChannelRealization r;
    r.tap_delays = profile.tap_delays;
    r.tap_gains = evolve_taps(profile, draw_static_phases(profile, rng), n);
    r.cfr = cir_to_cfr(r.tap_gains, r.tap_delays, num_subcarriers);
    r.large_scale_gain = 1.0;
    r.position_index = n;
    return r;
}

ComplexVector convolve(const ComplexVector& frame_time, const ChannelRealization& r, const OfdmConfig& cfg) {
    int max_delay = 0;
    for (int d : r.tap_delays) {
        max_delay = std::max(max_delay, d);
    }
    if (max_delay > cfg.cp_len) {
        throw InvalidInputError("ISI violation: max tap delay " + std::to_string(max_delay) +
                                " exceeds cp_len " + std::to_string(cfg.cp_len));
    }
    const double amp = std::sqrt(r.large_scale_gain);
    ComplexVector out(frame_time.size(), Complex(0.0, 0.0));
    for (std::size_t l = 0; l < r.tap_gains.size(); ++l) {
        const Complex g = amp * r.tap_gains[l];
        const std::size_t d = static_cast<std::size_t>(r.tap_delays[l]);
        for (std::size_t i = d; i < out.size(); ++i) {
            out[i] += g * frame_time[i - d];
        }
    }
    return out;
}

double noise_variance_for(const ComplexVector& signal, double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return 0.0;
    }
    return signal_power(signal) / std::pow(10.0, snr_db / 10.0);
}

ComplexVector awgn(const ComplexVector& signal, double snr_db, Rng& rng) {
    if (signal.empty()) {
        throw InvalidInputError("awgn needs a non-empty signal");
    }
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return signal;
    }
    const double power = signal_power(signal);
    if (power <= 0.0) {
        throw InvalidInputError("degenerate input: zero-power signal with finite SNR");
    }
    const double sigma2 = power / std::pow(10.0, snr_db / 10.0);
    const double component_sigma = std::sqrt(sigma2 / 2.0);
    ComplexVector out(signal.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = signal[i] + Complex(component_sigma * rng.normal(), component_sigma * rng.normal());
    }
    return out;
}

ComplexVector apply_channel(const ComplexVector& frame_time, const ChannelRealization& r,
                            const OfdmConfig& cfg, double snr_db, Rng& rng) {
    ComplexVector out = convolve(frame_time, r, cfg);
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return out;
    }
    return awgn(out, snr_db, rng);
}

TrajectoryRealizer::TrajectoryRealizer(const ChannelModel& model, int num_subcarriers, Rng& rng)
    : model_(model), num_subcarriers_(num_subcarriers) {
    validate(model_.large_scale);
    validate(model_.profile);
    validate(model_.trajectory);
    static_phases_ = draw_static_phases(model_.profile, rng);
    // One fading draw per trajectory; along the trajectory only the
    // deterministic pathloss and the Doppler phases evolve.
    const double fast = rng.exponential(model_.large_scale.fast_fading_mean);
    const double shadow = std::pow(10.0, model_.large_scale.shadow_sigma_db * rng.normal() / 10.0);
    fading_gain_ = fast * shadow;
    const Trajectory& t = model_.trajectory;
    along_track_m_ = -std::sqrt(std::max(
        t.initial_distance_m * t.initial_distance_m - t.bs_offset_m * t.bs_offset_m, 0.0));
}

double TrajectoryRealizer::distance_at(long step) const {
    const Trajectory& t = model_.trajectory;
    const double elapsed_s = static_cast<double>(step) * static_cast<double>(t.step_samples) *
                             model_.profile.sample_period_s;
    const double x = along_track_m_ + t.speed_mps * elapsed_s;
    const double d = std::hypot(x, t.bs_offset_m);
    if (d <= std::numeric_limits<double>::min()) {
        throw InvalidInputError("invalid geometry: trajectory reached the base station (d <= 0)");
    }
    return d;
}

ChannelRealization TrajectoryRealizer::at_step(long step) const {
    const long n = step * model_.trajectory.step_samples;
    ChannelRealization r;
    r.tap_delays = model_.profile.tap_delays;
    r.tap_gains = evolve_taps(model_.profile, static_phases_, n);
    r.cfr = cir_to_cfr(r.tap_gains, r.tap_delays, num_subcarriers_);
    r.large_scale_gain = fading_gain_ * path_gain(model_.large_scale, distance_at(step));
    r.position_index = n;
    return r;
}

std::vector<ChannelRealization> evolve_trajectory(const ChannelModel& model, int n_steps,
                                                  int num_subcarriers, Rng& rng) {
    if (n_steps < 1) {
        throw InvalidInputError("n_steps must be >= 1");
    }
    TrajectoryRealizer realizer(model, num_subcarriers, rng);
    std::vector<ChannelRealization> out;
    out.reserve(static_cast<std::size_t>(n_steps));
    for (int s = 0; s < n_steps; ++s) {
        out.push_back(realizer.at_step(s));
    }
    return out;
}

}  // namespace v2isim::channel
