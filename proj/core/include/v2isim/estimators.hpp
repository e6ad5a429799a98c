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

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "v2isim/types.hpp"

namespace v2isim::est {

/// One pilot frame as seen by the receiver: y = X F g + w with X the known
/// diagonal pilot (stored as its diagonal).
struct PilotObservation {
    ComplexVector pilot;         ///< diagonal of X, |X(k)| > 0
    ComplexVector received;      ///< y, frequency domain after demodulation
    double noise_variance = 0.0; ///< sigma_w^2 per bin
};

/// Covariance of the time-domain channel vector g, Hermitian PSD.
struct ChannelCovariance {
    Eigen::MatrixXcd r_gg;
};

/// Time-domain channel vector g from a frequency response h = F g, i.e. the
/// unitary inverse DFT of the CFR.
ComplexVector time_domain_channel(const ComplexVector& cfr);

/// Sample covariance (1/M) sum g g^H over the given realizations (zero mean
/// assumed). Hermitian PSD by construction.
ChannelCovariance sample_covariance(const std::vector<ComplexVector>& realizations);

/// Least-squares estimate X^-1 y, element-wise. For unit-modulus pilots this
/// equals the full normal-equations form.
ComplexVector ls_estimate(const PilotObservation& obs);

/// Linear MMSE channel estimate
///   h = F R_gg [ (F^H X^H X F)^-1 sigma^2 + R_gg ]^-1 (F^H X^H X F)^-1 F^H X^H y
/// computed with solver decompositions. When the inner system is too
/// ill-conditioned a Tikhonov ridge of 1e-12 * trace/N is added.
class MmseEstimator {
  public:
    MmseEstimator(ChannelCovariance cov, ComplexVector pilot);

    ComplexVector estimate(const ComplexVector& received, double noise_variance) const;

  private:
    void refresh_weights(double noise_variance) const;

    Eigen::MatrixXcd r_gg_;
    Eigen::VectorXcd pilot_;
    Eigen::MatrixXcd dft_;
    mutable Eigen::MatrixXcd weights_;
    mutable double cached_noise_variance_ = -1.0;
};

/// One-shot convenience wrapper around MmseEstimator.
ComplexVector mmse_estimate(const PilotObservation& obs, const ChannelCovariance& cov);

struct EqualizedFrame {
    ComplexVector symbols;                 ///< Y(k)/h_hat(k), or raw Y(k) on flagged bins
    std::vector<std::uint8_t> deep_fade;   ///< 1 where |h_hat(k)| <= threshold
};

inline constexpr double kDeepFadeThreshold = 1e-12;

/// One-tap equalization per parallel subchannel. Bins whose estimate falls
/// below kDeepFadeThreshold are flagged and passed through unequalized.
EqualizedFrame equalize(const ComplexVector& received, const ComplexVector& channel_estimate);

}  // namespace v2isim::est
