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
#include <vector>

#include "v2isim/rng.hpp"
#include "v2isim/types.hpp"

namespace v2isim::channel {

/// Distance-dependent power gain G * beta * A * d^-gamma with exponential
/// fast fading G and log-normal shadowing beta.
struct LargeScaleParams {
    double pathloss_constant = 1.0;  ///< A
    double pathloss_exponent = 2.0;  ///< gamma > 0
    double shadow_sigma_db = 3.0;    ///< std dev of the log-normal shadowing, dB
    double fast_fading_mean = 1.0;   ///< mean of the exponential fast-fading gain
};
void validate(const LargeScaleParams& params);

/// Frequency-selective tapped-delay-line profile. Tap magnitudes are fixed
/// (sum of tap powers = 1); each tap's phase rotates at its own Doppler rate.
struct MultipathProfile {
    std::vector<int> tap_delays;         ///< samples, strictly increasing, first = 0
    std::vector<double> tap_powers;      ///< C_l^2, sums to 1
    std::vector<double> tap_doppler_hz;  ///< per-tap maximum Doppler shift
    double carrier_freq_hz = 5.9e9;
    double sample_period_s = 1e-6;

    std::size_t num_taps() const { return tap_delays.size(); }
    int max_delay() const { return tap_delays.empty() ? 0 : tap_delays.back(); }
};
void validate(const MultipathProfile& profile);

/// Straight-road geometry: the vehicle moves at constant speed along a road
/// with the base station bs_offset_m to the side. step_samples is the
/// sample-time spacing between consecutive channel realizations (one pilot
/// period).
struct Trajectory {
    double initial_distance_m = 150.0;
    double speed_mps = 30.0;
    double bs_offset_m = 20.0;
    long step_samples = 160;
};
void validate(const Trajectory& traj);

struct ChannelModel {
    LargeScaleParams large_scale;
    MultipathProfile profile;
    Trajectory trajectory;
};

/// Snapshot of the channel at one sample-time index.
struct ChannelRealization {
    std::vector<Complex> tap_gains;  ///< alpha_l = C_l exp(j phi_l(n))
    std::vector<int> tap_delays;     ///< samples
    ComplexVector cfr;               ///< H(k) of the unit-power multipath part, length N
    double large_scale_gain = 1.0;   ///< power gain from LargeScaleParams
    long position_index = 0;         ///< sample-time index n
};

/// Per-subcarrier response including the large-scale amplitude,
/// sqrt(large_scale_gain) * cfr. This is what the receiver must estimate.
ComplexVector effective_cfr(const ChannelRealization& r);

/// Deterministic pathloss component A * d^-gamma.
double path_gain(const LargeScaleParams& params, double distance_m);

/// One draw of the full power gain G * beta * A * d^-gamma.
double large_scale_gain(const LargeScaleParams& params, double distance_m, Rng& rng);

/// Phase of tap l at sample-time index n:
///   static_phase - 2 pi f_c tau_l + 2 pi f_D,l n T_s
/// with tau_l = tap_delays[l] * T_s. Advances linearly in elapsed time.
double tap_phase(const MultipathProfile& profile, double static_phase, std::size_t l, long n);

/// H(k) = sum_l alpha_l exp(-j 2 pi k tau_l / N): the unnormalized DFT of the
/// zero-padded impulse response, so per-bin multiplication matches circular
/// convolution under the unitary OFDM transforms.
ComplexVector cir_to_cfr(const std::vector<Complex>& tap_gains, const std::vector<int>& tap_delays,
                         int num_subcarriers);

/// Draws static tap phases uniform in [0, 2 pi) from rng, evolves them to
/// index n, and returns the realization (large_scale_gain = 1).
ChannelRealization generate_cir(const MultipathProfile& profile, long n, Rng& rng, int num_subcarriers);

/// Noise-free channel output: linear convolution of the frame's time samples
/// with sqrt(large_scale_gain) * tap impulse response, truncated to the frame
/// length. Requires cp_len >= max tap delay.
ComplexVector convolve(const ComplexVector& frame_time, const ChannelRealization& r, const OfdmConfig& cfg);

/// Per-sample complex noise variance for the given SNR; 0 for infinite SNR.
double noise_variance_for(const ComplexVector& signal, double snr_db);

/// Adds circularly-symmetric complex Gaussian noise at the given SNR measured
/// against the input's mean power. An infinite snr_db returns the input.
ComplexVector awgn(const ComplexVector& signal, double snr_db, Rng& rng);

/// convolve() followed by awgn() at the post-channel signal power.
ComplexVector apply_channel(const ComplexVector& frame_time, const ChannelRealization& r,
                            const OfdmConfig& cfg, double snr_db, Rng& rng);

/// Realizes one trajectory: static tap phases and the fading draw G * beta
/// happen once at construction, after which every step is a pure function of
/// the step index. Step s sits at sample-time index s * step_samples.
class TrajectoryRealizer {
  public:
    TrajectoryRealizer(const ChannelModel& model, int num_subcarriers, Rng& rng);

    ChannelRealization at_step(long step) const;
    double distance_at(long step) const;
    const ChannelModel& model() const { return model_; }

  private:
    ChannelModel model_;
    int num_subcarriers_;
    std::vector<double> static_phases_;
    double fading_gain_ = 1.0;  ///< G * beta, one draw per trajectory
    double along_track_m_ = 0.0;
};

/// Realizations at steps 0 .. n_steps-1 sharing one set of static phases.
std::vector<ChannelRealization> evolve_trajectory(const ChannelModel& model, int n_steps,
                                                  int num_subcarriers, Rng& rng);

}  // namespace v2isim::channel
