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

namespace v2isim::ofdm {

/// N x N matrix with entry (n, k) = (1/sqrt(N)) exp(-j 2 pi n k / N); unitary.
using DftMatrix = Eigen::MatrixXcd;

/// Gray-mapped 4-QAM, unit symbol energy:
///   00 -> (+1+j)/sqrt(2)   01 -> (-1+j)/sqrt(2)
///   11 -> (-1-j)/sqrt(2)   10 -> (+1-j)/sqrt(2)
/// Only bits_per_symbol == 2 is supported.
ComplexVector qam_map(const std::vector<std::uint8_t>& bits, int bits_per_symbol);

/// Hard minimum-distance decision per symbol, two bits per symbol. Points on
/// a decision boundary decode to the lexicographically smallest bit pattern.
std::vector<std::uint8_t> qam_demap(const ComplexVector& symbols);

/// Unitary inverse DFT (scale 1/sqrt(N)) of the frequency symbols with the
/// cyclic prefix prepended; output length N + cp_len.
ComplexVector modulate(const ComplexVector& freq_symbols, const OfdmConfig& cfg);

/// CP removal followed by the unitary forward DFT; inverse of modulate().
ComplexVector demodulate(const ComplexVector& time_samples, const OfdmConfig& cfg);

OfdmFrame make_frame(ComplexVector freq_symbols, const OfdmConfig& cfg);

DftMatrix dft_matrix(int n);

/// Deterministic length-N pilot of unit-modulus 4-QAM points. The induced
/// diagonal matrix X satisfies X^H X = I.
ComplexVector generate_pilot(const OfdmConfig& cfg, std::uint64_t seed);

}  // namespace v2isim::ofdm
