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

#include "v2isim/ofdm.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "v2isim/errors.hpp"
#include "v2isim/rng.hpp"

namespace v2isim {

void validate(const OfdmConfig& cfg) {
    if (!is_power_of_two(cfg.num_subcarriers)) {
        throw InvalidInputError("num_subcarriers must be a positive power of two, got " +
                                std::to_string(cfg.num_subcarriers));
    }
    if (cfg.cp_len < 0 || cfg.cp_len >= cfg.num_subcarriers) {
        throw InvalidInputError("cp_len must satisfy 0 <= cp_len < N, got " + std::to_string(cfg.cp_len));
    }
    if (cfg.bits_per_symbol != 2) {
        throw InvalidInputError("unsupported modulation: bits_per_symbol must be 2 (4-QAM), got " +
                                std::to_string(cfg.bits_per_symbol));
    }
}

double signal_power(const ComplexVector& x) {
    if (x.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (const Complex& v : x) {
        acc += std::norm(v);
    }
    return acc / static_cast<double>(x.size());
}

namespace ofdm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// In-place iterative radix-2 transform, exact for power-of-two sizes.
// sign = -1 forward, +1 inverse; no normalization.
void fft_radix2(ComplexVector& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex w = std::polar(1.0, ang * static_cast<double>(k));
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

}  // namespace

ComplexVector qam_map(const std::vector<std::uint8_t>& bits, int bits_per_symbol) {
    if (bits_per_symbol != 2) {
        throw InvalidInputError("unsupported modulation: bits_per_symbol must be 2, got " +
                                std::to_string(bits_per_symbol));
    }
    if (bits.size() % 2 != 0) {
        throw InvalidInputError("bit count must be divisible by bits_per_symbol, got " +
                                std::to_string(bits.size()));
    }
    ComplexVector symbols(bits.size() / 2);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const int b0 = bits[2 * s] & 1;      // selects the imaginary sign
        const int b1 = bits[2 * s + 1] & 1;  // selects the real sign
        symbols[s] = Complex((1 - 2 * b1) * kInvSqrt2, (1 - 2 * b0) * kInvSqrt2);
    }
    return symbols;
}

std::vector<std::uint8_t> qam_demap(const ComplexVector& symbols) {
    std::vector<std::uint8_t> bits(symbols.size() * 2);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        // Minimum-distance decision reduces to per-axis signs; ties at zero
        // take the 0 bit, i.e. the lexicographically smallest pattern.
        bits[2 * s] = symbols[s].imag() < 0.0 ? 1 : 0;
        bits[2 * s + 1] = symbols[s].real() < 0.0 ? 1 : 0;
    }
    return bits;
}

ComplexVector modulate(const ComplexVector& freq_symbols, const OfdmConfig& cfg) {
    validate(cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.num_subcarriers);
    if (freq_symbols.size() != n) {
        throw InvalidInputError("freq_symbols length " + std::to_string(freq_symbols.size()) +
                                " does not match N = " + std::to_string(n));
    }
    ComplexVector body = freq_symbols;
    fft_radix2(body, +1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Complex& v : body) {
        v *= scale;
    }
    ComplexVector out(n + static_cast<std::size_t>(cfg.cp_len));
    for (int i = 0; i < cfg.cp_len; ++i) {
        out[i] = body[n - cfg.cp_len + i];
    }
    std::copy(body.begin(), body.end(), out.begin() + cfg.cp_len);
    return out;
}

ComplexVector demodulate(const ComplexVector& time_samples, const OfdmConfig& cfg) {
    validate(cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.num_subcarriers);
    if (time_samples.size() != n + static_cast<std::size_t>(cfg.cp_len)) {
        throw InvalidInputError("time_samples length " + std::to_string(time_samples.size()) +
                                " does not match N + cp_len = " + std::to_string(n + cfg.cp_len));
    }
    ComplexVector out(time_samples.begin() + cfg.cp_len, time_samples.end());
    fft_radix2(out, -1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Complex& v : out) {
        v *= scale;
    }
    return out;
}

OfdmFrame make_frame(ComplexVector freq_symbols, const OfdmConfig& cfg) {
    OfdmFrame frame;
    frame.time_samples = modulate(freq_symbols, cfg);
    frame.freq_symbols = std::move(freq_symbols);
    return frame;
}

DftMatrix dft_matrix(int n) {
    if (n < 1) {
        throw InvalidInputError("DFT matrix dimension must be >= 1, got " + std::to_string(n));
    }
    DftMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(row) *
                               static_cast<double>(col) / static_cast<double>(n);
            f(row, col) = scale * Complex(std::cos(ang), std::sin(ang));
        }
    }
    return f;
}

ComplexVector generate_pilot(const OfdmConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    Rng rng(seed);
    ComplexVector pilot(static_cast<std::size_t>(cfg.num_subcarriers));
    for (Complex& v : pilot) {
        const std::uint64_t bits = rng.next_u64();
        v = Complex((bits & 1) ? -kInvSqrt2 : kInvSqrt2, (bits & 2) ? -kInvSqrt2 : kInvSqrt2);
    }
    return pilot;
}

}  // namespace ofdm
}  // namespace v2isim
