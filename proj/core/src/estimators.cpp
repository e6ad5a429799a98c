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

#include "v2isim/estimators.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "v2isim/errors.hpp"
#include "v2isim/ofdm.hpp"

namespace v2isim::est {

namespace {

Eigen::VectorXcd to_eigen(const ComplexVector& v) {
    return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ComplexVector from_eigen(const Eigen::VectorXcd& v) {
    return ComplexVector(v.data(), v.data() + v.size());
}

// Solves M x = b for Hermitian M via LDLT. When the factorization fails or
// the residual is poor (rank-deficient M at sigma^2 = 0), retries once with a
// Tikhonov ridge of 1e-12 * trace / N on the diagonal.
Eigen::MatrixXcd solve_hermitian(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& b) {
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(m);
    if (ldlt.info() == Eigen::Success) {
        Eigen::MatrixXcd x = ldlt.solve(b);
        const double residual = (m * x - b).norm();
        if (x.allFinite() && residual <= 1e-8 * (b.norm() + 1.0)) {
            return x;
        }
    }
    const double ridge = 1e-12 * m.trace().real() / static_cast<double>(m.rows());
    Eigen::MatrixXcd regularized = m;
    regularized.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXcd> retry(regularized);
    Eigen::MatrixXcd x = retry.solve(b);
    if (retry.info() != Eigen::Success || !x.allFinite()) {
        throw NumericalError("MMSE system is singular even after regularization");
    }
    return x;
}

}  // namespace

ComplexVector time_domain_channel(const ComplexVector& cfr) {
    OfdmConfig cfg;
    cfg.num_subcarriers = static_cast<int>(cfr.size());
    cfg.cp_len = 0;
    return ofdm::modulate(cfr, cfg);
}

ChannelCovariance sample_covariance(const std::vector<ComplexVector>& realizations) {
    if (realizations.size() < 2) {
        throw InvalidInputError("insufficient data: sample covariance needs >= 2 realizations");
    }
    const std::size_t n = realizations.front().size();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
    for (const ComplexVector& g : realizations) {
        if (g.size() != n) {
            throw InvalidInputError("covariance input vectors must have equal length");
        }
        const Eigen::VectorXcd v = to_eigen(g);
        acc.noalias() += v * v.adjoint();
    }
    acc /= static_cast<double>(realizations.size());
    // Symmetrize away rounding; the estimate is Hermitian by construction.
    ChannelCovariance cov;
    cov.r_gg = 0.5 * (acc + acc.adjoint().eval());
    return cov;
}

ComplexVector ls_estimate(const PilotObservation& obs) {
    if (obs.pilot.size() != obs.received.size() || obs.pilot.empty()) {
        throw InvalidInputError("pilot and received vectors must be non-empty and equal length");
    }
    ComplexVector h(obs.pilot.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (std::abs(obs.pilot[k]) == 0.0) {
            throw InvalidInputError("singular pilot: X(" + std::to_string(k) + ") = 0");
        }
        h[k] = obs.received[k] / obs.pilot[k];
    }
    return h;
}

MmseEstimator::MmseEstimator(ChannelCovariance cov, ComplexVector pilot)
    : r_gg_(std::move(cov.r_gg)), pilot_(to_eigen(pilot)) {
    const Eigen::Index n = pilot_.size();
    if (n == 0 || r_gg_.rows() != n || r_gg_.cols() != n) {
        throw InvalidInputError("covariance dimensions must match the pilot length");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (std::abs(pilot_(k)) == 0.0) {
            throw InvalidInputError("singular pilot: X(" + std::to_string(k) + ") = 0");
        }
    }
    dft_ = ofdm::dft_matrix(static_cast<int>(n));
}

void MmseEstimator::refresh_weights(double noise_variance) const {
    const Eigen::Index n = pilot_.size();
    Eigen::VectorXcd inv_pilot_power(n);
    Eigen::VectorXcd pilot_conj(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        inv_pilot_power(k) = Complex(1.0 / std::norm(pilot_(k)), 0.0);
        pilot_conj(k) = std::conj(pilot_(k));
    }
    // A = F^H X^H X F with diagonal X; F unitary gives A^-1 = F^H D^-1 F.
    const Eigen::MatrixXcd a_inv = dft_.adjoint() * inv_pilot_power.asDiagonal() * dft_;
    const Eigen::MatrixXcd m = noise_variance * a_inv + r_gg_;
    const Eigen::MatrixXcd rhs = a_inv * dft_.adjoint() * pilot_conj.asDiagonal();
    const Eigen::MatrixXcd z = solve_hermitian(m, rhs);
    weights_ = dft_ * r_gg_ * z;
    cached_noise_variance_ = noise_variance;
}

ComplexVector MmseEstimator::estimate(const ComplexVector& received, double noise_variance) const {
    if (static_cast<Eigen::Index>(received.size()) != pilot_.size()) {
        throw InvalidInputError("received vector length does not match the pilot");
    }
    if (noise_variance < 0.0) {
        throw InvalidInputError("noise variance must be >= 0");
    }
    if (noise_variance != cached_noise_variance_) {
        refresh_weights(noise_variance);
    }
    return from_eigen(weights_ * to_eigen(received));
}

ComplexVector mmse_estimate(const PilotObservation& obs, const ChannelCovariance& cov) {
    MmseEstimator estimator(cov, obs.pilot);
    return estimator.estimate(obs.received, obs.noise_variance);
}

EqualizedFrame equalize(const ComplexVector& received, const ComplexVector& channel_estimate) {
    if (received.size() != channel_estimate.size()) {
        throw InvalidInputError("received and channel_estimate must have equal length");
    }
    EqualizedFrame out;
    out.symbols.resize(received.size());
    out.deep_fade.assign(received.size(), 0);
    for (std::size_t k = 0; k < received.size(); ++k) {
        if (std::abs(channel_estimate[k]) <= kDeepFadeThreshold) {
            out.symbols[k] = received[k];  // flagged bin, decode from raw Y
            out.deep_fade[k] = 1;
        } else {
            out.symbols[k] = received[k] / channel_estimate[k];
        }
    }
    return out;
}

}  // namespace v2isim::est
