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

#include <complex>
#include <vector>

namespace v2isim {

using Complex = std::complex<double>;

/// Complex baseband samples / symbols; the universal signal currency.
using ComplexVector = std::vector<Complex>;

struct OfdmConfig {
    int num_subcarriers = 64;  ///< N, must be a power of two
    int cp_len = 16;           ///< cyclic prefix length in samples, < N
    int bits_per_symbol = 2;   ///< 2 = 4-QAM, the only supported constellation
};

constexpr bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Throws InvalidInputError when the config violates its invariants.
void validate(const OfdmConfig& cfg);

/// One OFDM symbol in both domains.
struct OfdmFrame {
    ComplexVector freq_symbols;  ///< length N
    ComplexVector time_samples;  ///< length N + cp_len, CP prepended
};

/// Mean per-sample power, (1/len) * sum |x|^2.
double signal_power(const ComplexVector& x);

}  // namespace v2isim
